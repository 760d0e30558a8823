"""Cuttings of line and polynomial arrangements, and the low-crossing partitioner."""

from semiramsey import build_cutting, partition_low_crossing, verify_cutting
from semiramsey.harness import generate_instance

lines = generate_instance("lines N=100", 1).surfaces
polys = generate_instance("polys N=100 deg=4", 1).surfaces
for name, surfaces in (("100 lines", lines), ("100 quartics on the line", polys)):
    for r in (2, 5, 10):
        K = build_cutting(surfaces, r, seed=1)
        rep = verify_cutting(surfaces, K, r=r)
        print("%-26s r=%-3d cells=%-5d max crossings %3d <= %5.1f  c1=%.2f" % (
            name, r, rep["cells"], rep["max_crossings"], len(surfaces) / r, rep["c1_min"]))

pts = generate_instance("random d=2 N=1000 den=16 span=20", 2).points
res = partition_low_crossing(pts, lines, 16, seed=2)
print("\npartition into %d parts, sizes %s" % (len(res.parts), [len(p) for p in res.parts]))
print("worst line crosses %d cells, c2 = %.2f" % (max(res.crossing_profile.values()), res.params["c2_min"]))
