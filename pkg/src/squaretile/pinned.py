"""Measured constants that acceptance checks compare against.

``KENYON_C`` is the largest value of (count - q/p) / log2(p), rounded up at
the fourth decimal, over all 76115 coprime pairs 2 <= p < q <= 500 with the
default logarithmic tiler.  The maximum is attained at (311, 415).  The run
is recorded in ``data/kenyon_fit_q500.json`` and can be reproduced with
``squaretile bench --max-q 500 --fit --pin FILE``.

``EPSILON_C2`` bounds (count - x) / log(1/eps) for the corner-avoiding tiler,
measured over x in {1, 3/2, 7/3, 2, 987/610, 31/7, 577/100, 10} and
eps = 10^-1 ... 10^-6, 2^-21 ... 2^-36.
"""
from fractions import Fraction

KENYON_C = Fraction(50317, 10000)
KENYON_C_FIT_RANGE = 500
GROWTH_SLACK = Fraction(115, 100)  # larger ranges may exceed the fit by 15%

EPSILON_C2 = Fraction(314, 100)
