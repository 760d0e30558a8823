"""Extracting structured subsets from semi-algebraic relations.

Binary relations: an ordering in which every relation is transitive, then a
set avoiding all of them.  Ternary relations: homogeneous parts and a large
independent set for a collinearity-type relation.
"""

from fractions import Fraction

from semiramsey import empty_in_all, extract_independent, homogeneous_parts, transitive_subset
from semiramsey.relations import clique_number, distance_at_least, distance_at_most, max_independent
from semiramsey.harness import generate_instance

P = generate_instance("random d=1 N=64 den=1000 span=2", 5).points
rels = [distance_at_least(1), distance_at_most(Fraction(1, 2))]
levels: list = []
V = transitive_subset(P, rels, seed=5, report=levels)
print("transitive ordering of %d of %d points" % (len(V), len(P)))
omegas = [clique_number(R, P) for R in rels]
print("clique numbers", omegas, "-> pair-free subset", empty_in_all(P, rels, omegas, seed=5))

inst = generate_instance("symmetric N=60", 0)
H = homogeneous_parts(inst.points, inst.relations[0], 3, 3, seed=0)
print("\nhomogeneous parts for x+y+z >= 0:", H.verdict, "after", H.attempts, "attempt(s)")
for part in H.parts:
    print("  ", [str(inst.points[i][0]) for i in part])

grid = generate_instance("grid 5x5")
rep: dict = {}
out = extract_independent(grid.points, grid.relations[0], 4, report=rep)
print("\n5x5 grid, no three collinear: extracted %d points, optimum %d" % (
    len(out), len(max_independent(grid.relations[0], grid.points))))
print("premise (no 4 collinear) holds:", rep["premise"])
