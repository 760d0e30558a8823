"""Sum-free partitions, the distance coloring they induce, and its blow-up."""

from semiramsey import blowup, find_mono_triangle, schur_coloring, schur_search, verify_blowup
from semiramsey.multicolor import extend_partition, verify_translation_invariance
from semiramsey.relations import find_mono_triangle_bruteforce

for m in (1, 2, 3, 4):
    res = schur_search(m, mode="maximize")
    print("m=%d: largest N = %d, search nodes %d" % (m, res.n, res.nodes))

part = schur_search(3, mode="maximize").partition
print("\nclasses:", part.classes)
system = schur_coloring(part)
print("coloring |x - y| on %d points, monochromatic triangle:" % len(system.base), find_mono_triangle(system))
for c in range(3):
    bigger = schur_coloring(extend_partition(part, 14, c), validate=False)
    print("  adding distance 14 to class %d forces" % c, find_mono_triangle_bruteforce(bigger))

B = blowup(part, 2)
print("\nblow-up: %d points, %d relations, level constants %s" % (len(B.points), len(B.relations), B.C_schedule))
rep = verify_blowup(B)
print("covered:", rep["covered"], "triangle-free:", rep["triangle_free"], "exhaustive:", rep["exhaustive"])
inv = verify_translation_invariance(B, None, [1, 7] + B.C_schedule, sample_pairs=2000)
print("translation invariant on 2000 sampled pairs:", inv["invariant"])
