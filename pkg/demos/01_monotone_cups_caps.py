"""Monotone subsequences, cups and caps: extremal constructions and detectors.

A block sequence of length (s-1)(n-1) avoids both an increasing s-run and a
decreasing n-run; adding one more value forces one of them.  The planar
analogue uses cups and caps with binomial thresholds.
"""

import math
import random

from semiramsey import cupcap_extremal, es_extremal_sequence, find_cup_cap, longest_monotone
from semiramsey.harness import generate_instance

seq = es_extremal_sequence(4, 3)
m = longest_monotone(seq)
print("block sequence", seq)
print("longest increasing", m.inc, "longest decreasing", m.dec)

rng = random.Random(0)
longer = rng.sample(range(100), len(seq) + 1)
m = longest_monotone(longer)
print("one value longer:", longer, "->", "inc" if m.inc >= 4 else "dec", [longer[i] for i in (m.inc_witness if m.inc >= 4 else m.dec_witness)])

cfg = cupcap_extremal(5, 4)
print("\nextremal cups/caps set: %d points (binomial %d)" % (len(cfg.points), math.comb(5, 3)))
print("detector on it:", find_cup_cap(cfg, 5, 4))
P = generate_instance("gpset N=%d" % (len(cfg.points) + 1), 3).points
print("random general-position set one larger:", find_cup_cap(P, 5, 4))
