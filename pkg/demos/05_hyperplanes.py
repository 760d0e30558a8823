"""One-sided families of lines via duality with monotone subsequences."""

import random

from semiramsey import dualize_hyperplanes, osh_extract
from semiramsey.geometry import GeneralPositionError, HyperplaneFamily, check_hyperplane_position, es_extremal_sequence, family_from_sequence, one_sided
from semiramsey.relations import tuple_in_relation

H = HyperplaneFamily(2, (((-1, 1), 1), ((1, 1), 1), ((2, 1), -3)))
P, E = dualize_hyperplanes(H)
for a in range(3):
    for b in range(a + 1, 3):
        print("lines %d,%d meet above the axis:" % (a, b), tuple_in_relation(E, [P[a], P[b]]))

ext = family_from_sequence(es_extremal_sequence(3, 4))
print("\nfamily of %d lines from a block sequence:" % len(ext), osh_extract(ext, 3, 4))

rng = random.Random(1)


def random_family(dim, size):
    while True:
        fam = HyperplaneFamily(dim, tuple((tuple(rng.randint(-9, 9) for _ in range(dim)), rng.randint(-9, 9)) for _ in range(size)))
        try:
            check_hyperplane_position(fam)
            return fam
        except GeneralPositionError:
            continue


fam = random_family(2, 7)
res = osh_extract(fam, 3, 4)
print("random family of 7 lines:", res, "verified:", one_sided(fam, res.indices, res.side))

planes = random_family(3, 6)
res = osh_extract(planes, 3, 3)
print("six planes in space:", res, "verified:", bool(res) and one_sided(planes, res.indices, res.side))
