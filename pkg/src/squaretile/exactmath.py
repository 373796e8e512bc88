"""Exact rationals, continued fractions and the Farey (Stern-Brocot) tree.

Every number in this package is a :class:`fractions.Fraction` or an ``int``;
nothing here touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import islice
from math import gcd
from typing import Callable, Iterable, Iterator, Union

Rational = Fraction

__all__ = [
    "Rational",
    "ContinuedFraction",
    "FareyInterval",
    "ROOT",
    "PreconditionError",
    "as_fraction",
    "cf_expand",
    "approximants",
    "greedy_cost",
    "farey_child",
    "farey_word",
    "farey_locate",
    "farey_bridge",
    "bridge_constant",
    "bridge_bound_ok",
    "letters_of",
    "run_lengths",
]


class PreconditionError(ValueError):
    """Raised when an operation's input falls outside its domain."""


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions and ``"num/den"`` strings without ever using floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class ContinuedFraction:
    """A finite continued fraction ``[a0; a1, ..., ak]``."""

    quotients: tuple[int, ...]

    def __post_init__(self):
        q = tuple(int(a) for a in self.quotients)
        if not q:
            raise ValueError("empty continued fraction")
        if q[0] < 0 or any(a < 1 for a in q[1:]):
            raise ValueError(f"invalid partial quotients {q}")
        object.__setattr__(self, "quotients", q)

    @property
    def is_canonical(self) -> bool:
        return len(self.quotients) == 1 or self.quotients[-1] >= 2

    def canonical(self) -> "ContinuedFraction":
        q = list(self.quotients)
        if len(q) > 1 and q[-1] == 1:
            q.pop()
            q[-1] += 1
        return ContinuedFraction(tuple(q))

    def alternate(self) -> "ContinuedFraction":
        """The other representation, ending in 1 (``[..., ak-1, 1]``)."""
        q = list(self.canonical().quotients)
        if len(q) == 1 and q[0] == 0:
            raise ValueError("0 has a single representation")
        q[-1] -= 1
        q.append(1)
        return ContinuedFraction(tuple(q))

    def value(self) -> Fraction:
        num, den = 1, 0
        for a in reversed(self.quotients):
            num, den = a * num + den, num
        return Fraction(num, den)

    def __iter__(self):
        return iter(self.quotients)

    def __len__(self):
        return len(self.quotients)

    def __str__(self):
        head, *tail = self.quotients
        if not tail:
            return f"[{head}]"
        return f"[{head};{','.join(map(str, tail))}]"


def cf_expand(x) -> ContinuedFraction:
    """Canonical continued fraction of a positive rational (Euclid's algorithm)."""
    x = as_fraction(x)
    if x <= 0:
        raise PreconditionError(f"cf_expand needs x > 0, got {x}")
    num, den = x.numerator, x.denominator
    out = []
    while den:
        a, r = divmod(num, den)
        out.append(a)
        num, den = den, r
    # Euclid always ends with a quotient >= 2 unless the input is an integer
    return ContinuedFraction(tuple(out))


def approximants(cf: Union[ContinuedFraction, Iterable[int]]) -> list[Fraction]:
    """Convergents p_k/q_k via the usual three-term recurrence."""
    out = []
    # seeded so that the first step gives p0/q0 = a0/1
    p_prev, p, q_prev, q = 0, 1, 1, 0
    for a in cf:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append(Fraction(p, q))
    return out


def convergent_pairs(quotients: Iterable[int]) -> Iterator[tuple[int, int, int]]:
    """Yield ``(a_k, p_k, q_k)`` lazily; works on infinite quotient streams."""
    p_prev, p, q_prev, q = 0, 1, 1, 0
    for a in quotients:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        yield a, p, q


def greedy_cost(p: int, q: int) -> int:
    """Number of squares the Euclidean algorithm uses on a p x q rectangle."""
    if p < 1 or q < 1:
        raise PreconditionError("greedy_cost needs p, q >= 1")
    total = 0
    while p:
        a, r = divmod(q, p)
        total += a
        q, p = p, r
    return total


# ---------------------------------------------------------------------------
# Farey intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FareyInterval:
    """``(p1/q1, p2/q2)`` with ``p2*q1 - p1*q2 == 1``; ``1/0`` stands for infinity."""

    p1: int
    q1: int
    p2: int
    q2: int
    word: str = field(default="", compare=False)

    def __post_init__(self):
        if self.p2 * self.q1 - self.p1 * self.q2 != 1:
            raise ValueError(f"not a Farey pair: {self.p1}/{self.q1}, {self.p2}/{self.q2}")

    @cached_property
    def lower(self) -> Fraction:
        return Fraction(self.p1, self.q1)

    @cached_property
    def upper(self) -> Fraction | None:
        """Upper endpoint, or ``None`` for infinity."""
        return Fraction(self.p2, self.q2) if self.q2 else None

    @property
    def finite(self) -> bool:
        return self.q2 > 0

    @cached_property
    def length(self) -> Fraction | None:
        return Fraction(1, self.q1 * self.q2) if self.q2 else None

    @property
    def mediant(self) -> Fraction:
        return Fraction(self.p1 + self.p2, self.q1 + self.q2)

    @property
    def depth(self) -> int:
        return len(self.word)

    def contains(self, x, closed: bool = False) -> bool:
        x = as_fraction(x)
        lo, hi = self.lower, self.upper
        if closed:
            return lo <= x and (hi is None or x <= hi)
        return lo < x and (hi is None or x < hi)

    def child(self, side: str) -> "FareyInterval":
        return farey_child(self, side)

    def endpoints_str(self) -> tuple[str, str]:
        return f"{self.p1}/{self.q1}", f"{self.p2}/{self.q2}"

    def __str__(self):
        a, b = self.endpoints_str()
        return f"({a}, {b})[{self.word or '-'}]"


ROOT = FareyInterval(0, 1, 1, 0, "")


def farey_child(interval: FareyInterval, side: str) -> FareyInterval:
    """``L`` keeps the lower endpoint, ``R`` keeps the upper one."""
    m1, m2 = interval.p1 + interval.p2, interval.q1 + interval.q2
    if side == "L":
        return FareyInterval(interval.p1, interval.q1, m1, m2, interval.word + "L")
    if side == "R":
        return FareyInterval(m1, m2, interval.p2, interval.q2, interval.word + "R")
    raise ValueError(f"side must be 'L' or 'R', got {side!r}")


def farey_word(word: str, start: FareyInterval = ROOT) -> FareyInterval:
    """Apply a word, read left to right as a descent from ``start``."""
    it = start
    for ch in word:
        it = farey_child(it, ch)
    return it


def run_lengths(word: str) -> list[int]:
    """Run-length encoding; a leading L-run means a0 = 0."""
    if not word:
        return []
    runs = [] if word[0] == "R" else [0]
    prev, n = word[0], 0
    for ch in word:
        if ch == prev:
            n += 1
        else:
            runs.append(n)
            prev, n = ch, 1
    runs.append(n)
    return runs


def max_run(word: str) -> int:
    best = cur = 0
    prev = ""
    for ch in word:
        cur = cur + 1 if ch == prev else 1
        prev = ch
        best = max(best, cur)
    return best


def letters_of(quotients: Iterable[int]) -> Iterator[str]:
    """Descent letters R^a0 L^a1 R^a2 ... of an (infinite) quotient stream."""
    side = "R"
    for a in quotients:
        for _ in range(a):
            yield side
        side = "L" if side == "R" else "R"


def _rational_letters(x: Fraction) -> Iterator[str]:
    """Descent toward a rational; stops right before x becomes a mediant."""
    it = ROOT
    while True:
        m = it.mediant
        if x == m:
            return
        side = "L" if x < m else "R"
        yield side
        it = farey_child(it, side)


def farey_locate(x, stop: Callable[[FareyInterval], bool], max_depth: int = 100_000):
    """Walk the chain of intervals toward ``x`` until ``stop`` accepts one.

    ``x`` is a rational (exact) or an iterable of partial quotients treated as
    the prefix of an irrational.  Returns ``(interval, terminal)``.  For a
    rational ``x`` that becomes a mediant before ``stop`` fires, the descent
    ends in the left child (``x`` is its upper endpoint) with
    ``terminal=True``.
    """
    if isinstance(x, (int, Fraction, str)):
        x = as_fraction(x)
        if x <= 0:
            raise PreconditionError("farey_locate needs x > 0")
        letters = _rational_letters(x)
        rational = True
    else:
        letters = letters_of(x)
        rational = False

    it = ROOT
    if stop(it):
        return it, False
    for depth, side in enumerate(letters):
        if depth >= max_depth:
            raise RuntimeError(f"farey_locate gave up after {max_depth} levels")
        it = farey_child(it, side)
        if stop(it):
            return it, False
    if rational:
        # x is now a mediant: keep it as the (closed) upper endpoint and
        # approach it from below until stop fires
        it = farey_child(it, "L")
        while not stop(it):
            if it.depth >= max_depth:
                raise RuntimeError(f"farey_locate gave up after {max_depth} levels")
            it = farey_child(it, "R")
        return it, True
    raise PreconditionError(f"quotient stream exhausted at depth {it.depth} before stop")


def bridge_constant(n: int = 4) -> int:
    """``(n+1)(n+2)^3``; 5*6^3 = 1080 for n = 4."""
    return (n + 1) * (n + 2) ** 3


def farey_bridge(x, k: int, p: int, n: int = 4, max_depth: int = 10_000) -> FareyInterval:
    """Farey interval containing both the n-aloof ``x`` and ``k/p``.

    Finds the first ``I`` on the chain toward ``x`` with
    ``|I| < (n+1)(n+2)/p``, then backs up at most ``n+1`` levels to the first
    ancestor ``J`` whose endpoints are at distance ``>= 1/p`` from ``I``.
    """
    if p < 1:
        raise PreconditionError("p must be positive")
    target = Fraction(k, p)
    tol = Fraction(1, p)
    scale = Fraction((n + 1) * (n + 2), p)
    if isinstance(x, (int, Fraction, str)):
        letters = _rational_letters(as_fraction(x))
    else:
        letters = letters_of(x)

    chain = [ROOT]
    found = None
    for side in islice(letters, max_depth):
        chain.append(farey_child(chain[-1], side))
        if found is None and chain[-1].finite and chain[-1].length < scale:
            found = len(chain) - 1
        if found is not None:
            # keep descending until I is narrow enough to decide |k/p - x| < 1/p
            I = chain[-1]
            if I.finite and I.lower > target - tol and I.upper < target + tol:
                break
            if I.finite and (I.upper <= target - tol or I.lower >= target + tol):
                raise PreconditionError(f"|k/p - x| >= 1/p for k/p = {target}")
    if found is None:
        raise PreconditionError("quotient stream too short to reach scale 1/p")

    I = chain[found]
    for back in range(1, n + 2):
        j = found - back
        if j < 0:
            break
        J = chain[j]
        lo_ok = I.lower - J.lower >= tol
        hi_ok = J.upper is None or J.upper - I.upper >= tol
        if lo_ok and hi_ok:
            return J
    # shallow case (tiny p): fall back to the deepest ancestor holding both points
    for j in range(found, -1, -1):
        J = chain[j]
        if J.contains(target, closed=True):
            return J
    return ROOT


def bridge_bound_ok(J: FareyInterval, p: int, n: int = 4) -> bool:
    """Exact test of ``min(q1, q2) >= sqrt(p) / ((n+1)(n+2)^3)``."""
    c = bridge_constant(n)
    qmin = min(J.q1, J.q2) if J.finite else J.q1
    return (qmin * c) ** 2 >= p


def reduced(p: int, q: int) -> tuple[int, int, int]:
    g = gcd(p, q)
    return p // g, q // g, g
