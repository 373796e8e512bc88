from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from squaretile.aloof import (AloofCover, DepthError, aloof_cover, certify_near, ell_split_t,
                              hall_decompose, split_ratios, subdivide_gaps, thickness_check,
                              windows)
from squaretile.exactmath import PreconditionError, cf_expand, farey_word, max_run


def test_cover_n4_depth1_is_the_eight_windows():
    got = [I.endpoints_str() for I in aloof_cover(4, 1)]
    assert got == [("1/5", "1/4"), ("1/4", "1/3"), ("1/3", "1/2"), ("1/2", "1/1"),
                   ("1/1", "2/1"), ("2/1", "3/1"), ("3/1", "4/1"), ("4/1", "5/1")]


def test_cover_n1_depth2_nests_toward_golden_ratio():
    golden = (1 + 5 ** 0.5) / 2
    ivs = aloof_cover(1, 2).intervals
    assert [I.word for I in ivs] == ["LRL", "RLR"]
    assert ivs[1].lower < golden < ivs[1].upper
    assert ivs[0].lower < golden - 1 < ivs[0].upper


@pytest.mark.parametrize("n,depth", [(4, 3), (2, 5), (5, 2)])
def test_cover_words_respect_run_bound(n, depth):
    cov = aloof_cover(n, depth)
    assert len(cov) <= (2 * n) ** depth
    assert all(max_run(I.word) <= n for I in cov)
    for a, b in zip(cov.intervals, cov.intervals[1:]):
        assert a.upper <= b.lower  # disjoint apart from endpoints


def test_cover_guards():
    with pytest.raises(PreconditionError):
        aloof_cover(0, 1)
    with pytest.raises(MemoryError):
        aloof_cover(4, 30, cap=1000)


def test_cover_jsonl_round_trip():
    cov = aloof_cover(4, 2)
    back = AloofCover.from_jsonl(cov.to_jsonl(), 4, 2)
    assert back.intervals == cov.intervals
    with pytest.raises(ValueError):
        AloofCover.from_jsonl('{"word": "LR", "lower": "0/1", "upper": "1/1"}\n', 4, 1)


@given(st.integers(1, 40).map(F(1, 1000).__mul__))
def test_cover_contains_aloof_numbers(frac):
    # a number with quotients <= 4 for three levels lies in some depth-3 piece
    x = 1 + frac
    qs = cf_expand(x).quotients
    if len(qs) < 4 or max(qs[:4]) > 4 or min(qs[1:4]) < 1:
        return
    cov = aloof_cover(4, 3)
    assert any(I.contains(x, closed=True) for I in cov)


@pytest.mark.parametrize("depth", [1, 2, 3, 4])
def test_c4_is_3_half_thick_at_shallow_depth(depth):
    r = thickness_check(aloof_cover(4, depth), 3, F(1, 2))
    assert r.passed and r.checks


def test_c1_is_not_thick_for_tiny_epsilon():
    r = thickness_check(aloof_cover(1, 3), 3, F(1, 100))
    assert not r.passed
    assert r.violations


def test_thickness_reports_every_gap_check():
    r = thickness_check(aloof_cover(4, 2), 3, F(1, 2))
    for c in r.checks:
        assert c.left[1] == c.gap[0] and c.gap[1] == c.right[0]


def test_subdivide_single_piece():
    s = subdivide_gaps(None, aloof_cover(4, 3), 1)
    assert s.pieces == (s.hull,) and s.gaps == ()


@pytest.mark.parametrize("N", [2, 5, 9])
def test_subdivide_lengths(N):
    s = subdivide_gaps(None, aloof_cover(4, 4), N)
    size = s.hull[1] - s.hull[0]
    for a, b in s.pieces:
        assert size / (5 * N) < b - a <= size / N
    for a, b in s.gaps:
        assert b - a < F(1, 5) * size
    total = sum(b - a for a, b in s.pieces) + sum(b - a for a, b in s.gaps)
    assert total == size


def test_subdivide_depth_error():
    with pytest.raises(DepthError) as info:
        subdivide_gaps(None, aloof_cover(4, 2), 10**6)
    assert info.value.required_depth > 2


def _check_split(h, x, n):
    I1, I2 = h.interval1, h.interval2
    assert max_run(I1.word) <= n and max_run(I2.word) <= n
    assert I1.lower + I2.lower <= x <= I1.upper + I2.upper
    assert all(a >= b for a, b in zip(h.widths, h.widths[1:]))


def test_hall_three_halves():
    h = hall_decompose(F(3, 2), 4, F(1, 100))
    _check_split(h, F(3, 2), 4)
    assert h.interval1.length < F(1, 100) and h.interval2.length < F(1, 100)


def test_hall_lower_endpoint_splits_evenly():
    # sqrt2 - 1 = [0;2,2,...] is twice [0;4,1,4,1,...], the smallest sum of two points of C_4
    h = hall_decompose([0] + [2] * 30, 4, F(1, 10**6))
    expected = "LLLLR" * 4
    assert h.word1.startswith(expected) and h.word2.startswith(expected)


def test_hall_integer_split():
    h = hall_decompose(F(2), 4, F(1, 89), p=89)
    assert h.k1 + h.k2 == 2 * 89
    mid = (h.interval1.lower + h.interval1.upper) / 2
    assert abs(F(h.k1, 89) - mid) <= F(1, 178)
    assert h.interval1.length < F(1, 89)


def test_hall_rejects_out_of_range():
    with pytest.raises(PreconditionError):
        hall_decompose(F(2, 5), 4)  # below sqrt2 - 1
    with pytest.raises(PreconditionError):
        hall_decompose(F(10), 4)  # above 4 + 4 sqrt2
    with pytest.raises(PreconditionError):
        hall_decompose(F(2), 3)


@given(st.integers(415, 9656))
def test_hall_certificates_property(thousandths):
    x = F(thousandths, 1000)
    h = hall_decompose(x, 4, F(1, 50))
    _check_split(h, x, 4)


def test_hall_larger_n_uses_its_own_windows():
    x = F(1, 2)
    h = hall_decompose(x, 6, F(1, 100))
    _check_split(h, x, 6)


def test_certify_near():
    assert certify_near(F(1, 10), F(1, 1000), 4) is None  # 1/10 is far below C_4
    # C_4 has a gap around 3/2: [1;2,y] <= 16/11 and [1;1,1,y] >= 17/11 for y <= 5
    assert certify_near(F(3, 2), F(1, 50), 4) is None
    J = certify_near(F(7, 5), F(1, 50), 4)
    assert J is not None and max_run(J.word) <= 4
    assert F(7, 5) - F(1, 50) <= J.lower and J.upper <= F(7, 5) + F(1, 50)


def _check_ell_split(a, b, c, d, n, res):
    assert 0 <= res.t <= a
    assert res.ratios == split_ratios(a, b, c, d, res.t)
    tols = (F(1, b + d), F(1, b), F(1, d))
    for r, tol, J in zip(res.ratios, tols, res.certificates):
        assert max_run(J.word) <= n
        assert r - tol <= J.lower and J.upper <= r + tol


def test_ell_split_square_ell():
    s = 1000
    res = ell_split_t(s, s, s, s, 25)
    _check_ell_split(s, s, s, s, 25, res)


def test_ell_split_unit_ell():
    res = ell_split_t(1, 1, 1, 1, 25)
    assert res.t in (0, 1)
    _check_ell_split(1, 1, 1, 1, 25, res)


def test_ell_split_ratio_edge():
    res = ell_split_t(8, 1, 1, 1, 25)
    _check_ell_split(8, 1, 1, 1, 25, res)


def test_ell_split_rejects_wide_ratios():
    with pytest.raises(PreconditionError):
        ell_split_t(100, 1, 1, 1)


def test_ell_split_refinement_path_agrees():
    res = ell_split_t(300, 250, 270, 200, 25, scan_bound=10)
    assert res.method == "refine"
    _check_ell_split(300, 250, 270, 200, 25, res)


@given(st.tuples(*[st.integers(20, 160)] * 4))
def test_ell_split_property(vals):
    a, b, c, d = vals
    if max(vals) > 8 * min(vals):
        return
    _check_ell_split(a, b, c, d, 25, ell_split_t(a, b, c, d, 25))


def test_windows_cover_range():
    ws = windows(3)
    assert ws[0].lower == F(1, 4) and ws[-1].upper == 4
    assert farey_word("RRRL") == ws[-1]
