"""Monte Carlo statistics of the corner-avoiding greedy cost T_eps(x).

T_eps(x) = a_0 + ... + a_k for the first k with |q_k x - p_k| < eps.
Each test is exact even when only a digit stream of x is available:

    |q_k x - p_k| = 1 / (q_{k+1} + q_k * theta),   theta = [0; a_{k+2}, a_{k+3}, ...]

so deciding ``< eps`` means bounding theta, and as many further digits are
read as it takes to settle the comparison.
"""
from __future__ import annotations

import csv
import io
import json
import math
import random
import statistics
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .exactmath import PreconditionError, as_fraction, cf_expand

LOOKAHEAD_CAP = 10_000


class StreamExhausted(RuntimeError):
    """The digit prefix ran out before the stopping rule could be decided."""

    def __init__(self, msg: str, partial_sum: int, digits_used: int):
        super().__init__(f"{msg} (partial sum {partial_sum} after {digits_used} digits)")
        self.partial_sum = partial_sum
        self.digits_used = digits_used


@dataclass(frozen=True)
class CostSample:
    seed: Optional[int]
    digits: tuple  # continued-fraction prefix that was read
    epsilon: Fraction
    T: int
    N: int  # stopping index k
    terminated: bool = False  # stopped because x is rational and the expansion ended


class _Digits:
    """Buffered view of a digit stream; ``complete`` means the stream is all of x."""

    def __init__(self, stream: Iterable[int], complete: bool):
        self._it: Iterator[int] = iter(stream)
        self.buf: list[int] = []
        self.complete = complete
        self.ended = False

    def get(self, i: int) -> Optional[int]:
        while len(self.buf) <= i and not self.ended:
            try:
                self.buf.append(int(next(self._it)))
            except StopIteration:
                self.ended = True
        return self.buf[i] if i < len(self.buf) else None


def _theta_bounds(tail: Sequence[int], exact: bool) -> tuple[Fraction, Fraction]:
    """Closed range for [0; tail..., y] with the unread remainder y in [1, inf]."""
    def value(last):
        v = last
        for a in reversed(tail):
            v = a + (0 if v is None else 1 / v)
        return Fraction(0) if v is None else 1 / v

    if not tail:
        return (Fraction(0), Fraction(0)) if exact else (Fraction(0), Fraction(1))
    lo, hi = value(None), value(Fraction(1))  # y = inf, y = 1
    if exact:
        return lo, lo
    return min(lo, hi), max(lo, hi)


def _error_below(digits: _Digits, k: int, qk: int, qk1: int, inv_eps: Fraction) -> bool:
    """Exact test of |q_k x - p_k| < eps, i.e. q_{k+1} + q_k theta > 1/eps."""
    j = 0
    while True:
        tail = digits.buf[k + 2:k + 2 + j]
        exact = digits.ended and len(digits.buf) <= k + 2 + j
        lo, hi = _theta_bounds(tail, exact)
        if qk1 + qk * lo > inv_eps:
            return True
        if qk1 + qk * hi <= inv_eps:
            return False
        if digits.get(k + 2 + j) is None:
            if digits.complete:
                lo, _ = _theta_bounds(digits.buf[k + 2:], True)
                return qk1 + qk * lo > inv_eps
            raise StreamExhausted("digit prefix too short to decide the stopping rule",
                                  sum(digits.buf[:k + 1]), len(digits.buf))
        j += 1
        if j > LOOKAHEAD_CAP:
            raise StreamExhausted("lookahead cap reached", sum(digits.buf[:k + 1]), len(digits.buf))


def t_epsilon(x, epsilon, seed: Optional[int] = None) -> CostSample:
    """Greedy cost of covering x-by-1 except an eps-corner.

    ``x`` is either an exact positive rational (int, Fraction or
    ``"num/den"``), whose expansion is then complete, or an iterable of
    partial quotients treated as a prefix of a possibly irrational number.
    """
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise PreconditionError("epsilon must lie in (0, 1)")
    if isinstance(x, (int, Fraction, str)):
        fx = as_fraction(x)
        if fx <= 0:
            raise PreconditionError("x must be positive")
        digits = _Digits(cf_expand(fx).quotients, complete=True)
    else:
        digits = _Digits(x, complete=False)
    inv_eps = 1 / eps
    # x in (0,1) has a_0 = 0, and its first meaningful approximant is 1/a_1
    first = 1 if digits.get(0) == 0 else 0
    q_back2, q_back1 = 1, 0  # q_{k-2}, q_{k-1}
    total = 0
    k = 0
    while True:
        a = digits.get(k)
        if a is None:
            raise StreamExhausted("digit stream ended before stopping", total, len(digits.buf))
        total += a
        q_k = a * q_back1 + q_back2
        nxt = digits.get(k + 1)
        if nxt is None:
            if digits.complete:  # x = p_k/q_k exactly
                return CostSample(seed, tuple(digits.buf), eps, total, k, terminated=True)
            raise StreamExhausted("digit stream ended before stopping", total, len(digits.buf))
        if k >= first and _error_below(digits, k, q_k, nxt * q_k + q_back1, inv_eps):
            return CostSample(seed, tuple(digits.buf[:k + 1]), eps, total, k)
        q_back2, q_back1 = q_back1, q_k
        k += 1


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def precision_bits(epsilons: Sequence) -> int:
    """Bits for uniform rationals m/2^P: enough that q_k near 1/eps_min is far from 2^P."""
    worst = min(as_fraction(e) for e in epsilons)
    return 4 * math.ceil(math.log2(1 / worst)) + 64


def normalized_cost(T: int, eps: Fraction) -> float:
    """T / (log(1/eps) log log(1/eps)); the second log is taken in absolute value,
    which only matters for eps > 1/e where it would otherwise be negative."""
    L = math.log(1 / eps)
    return T / (L * abs(math.log(L)))


@dataclass(frozen=True)
class EpsilonSummary:
    epsilon: str
    samples: int
    median: float
    q1: float
    q3: float
    iqr: float
    median_T: float
    median_N: float
    terminated: int
    # N_eps grows like log(1/eps)/c1 with c1 = pi^2/(12 log 2); shown, never asserted
    median_log_ratio: float


@dataclass(frozen=True)
class McResult:
    seed: int
    precision: int
    samples: list  # list[CostSample]
    summaries: list  # list[EpsilonSummary]


def _quartiles(values: list[float]) -> tuple[float, float, float]:
    if len(values) == 1:
        return values[0], values[0], values[0]
    q1, med, q3 = statistics.quantiles(values, n=4, method="inclusive")
    return q1, med, q3


def peres_mc(samples: int, epsilons: Sequence, seed: int = 0, precision: Optional[int] = None) -> McResult:
    """Draw uniform x in (0,1) at fixed binary precision and summarize T_eps per eps.

    Reports the per-eps median and IQR of :func:`normalized_cost`.  Samples
    are drawn in index order from one seeded generator, so equal arguments
    give equal results.
    """
    if samples < 1:
        raise PreconditionError("samples must be at least 1")
    eps_list = [as_fraction(e) for e in epsilons]
    if not eps_list or any(not 0 < e < 1 for e in eps_list):
        raise PreconditionError("epsilons must be a non-empty list of values in (0, 1)")
    P = precision if precision is not None else precision_bits(eps_list)
    rng = random.Random(seed)
    xs = []
    for _ in range(samples):
        m = 0
        while m == 0:
            m = rng.getrandbits(P)
        xs.append(Fraction(m, 1 << P))
    out: list[CostSample] = []
    summaries = []
    for eps in eps_list:
        rows = [t_epsilon(x, eps, seed=i) for i, x in enumerate(xs)]
        out.extend(rows)
        ratios = sorted(normalized_cost(r.T, eps) for r in rows)
        q1, med, q3 = _quartiles(ratios)
        L = math.log(1 / eps)
        summaries.append(EpsilonSummary(
            epsilon=str(eps), samples=len(rows), median=med, q1=q1, q3=q3, iqr=q3 - q1,
            median_T=statistics.median(r.T for r in rows),
            median_N=statistics.median(r.N for r in rows),
            terminated=sum(r.terminated for r in rows),
            median_log_ratio=statistics.median(L / max(r.N, 1) for r in rows),
        ))
    return McResult(seed, P, out, summaries)


SAMPLE_CSV_HEADER = ("seed", "epsilon", "T", "N", "terminated", "digits")


def samples_to_csv(samples: Iterable[CostSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SAMPLE_CSV_HEADER)
    for s in samples:
        w.writerow((s.seed, str(s.epsilon), s.T, s.N, int(s.terminated), " ".join(map(str, s.digits))))
    return buf.getvalue()


def summary_to_json(result: McResult) -> str:
    doc = {
        "seed": result.seed,
        "precision_bits": result.precision,
        "c1_reference": math.pi ** 2 / (12 * math.log(2)),
        "summaries": [asdict(s) for s in result.summaries],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


__all__ = [
    "CostSample", "EpsilonSummary", "McResult", "StreamExhausted", "normalized_cost", "peres_mc",
    "precision_bits", "samples_to_csv", "summary_to_json", "t_epsilon",
]
