import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowmoments import analytics as an
from lowmoments.eulerprod import exact_second_moment


def lpf(n):
    best, p = 1, 2
    while p * p <= n:
        while n % p == 0:
            best, n = p, n // p
        p += 1
    return max(best, n) if n > 1 else best


def spf(n):
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


def test_mertens_lambda_examples(lam):
    assert an.mertens_lambda(2, lam) == pytest.approx(0.140625, abs=1e-15)
    assert an.mertens_lambda(3, lam) == pytest.approx(0.260119, abs=1e-6)
    diff = an.mertens_lambda(10**4, lam) - an.mertens_lambda(10**3, lam)
    assert abs(diff - (math.log(math.log(1e4)) - math.log(math.log(1e3)))) <= 0.15
    with pytest.raises(ValueError):
        an.mertens_lambda(10**6, lam)


def test_mertens_classic_examples():
    assert an.mertens_classic(2) == 0.5
    assert an.mertens_classic(10) == pytest.approx(1 / 2 + 1 / 3 + 1 / 5 + 1 / 7, rel=1e-15)
    for a, b in ((10**3, 10**4), (10**4, 10**5)):
        diff = an.mertens_classic(b) - an.mertens_classic(a)
        assert abs(diff - math.log(math.log(b) / math.log(a))) <= 0.1


def test_rankin_examples(lam):
    assert an.rankin_partial(1, lam) == 1
    assert an.rankin_partial(5, lam) == pytest.approx(2.63411, abs=1e-5)


def test_smooth_example_x100(lam):
    cutoff = an.smoothness_cutoff(100)
    assert cutoff == pytest.approx(20.4, abs=0.05)
    assert lpf(100) <= cutoff < lpf(97)
    direct = math.fsum(lam[n] ** 2 for n in range(1, 101) if lpf(n) <= cutoff)
    assert an.smooth_restricted_sum(100, lam) == pytest.approx(direct, rel=1e-14)
    assert an.smooth_restricted_sum(100, lam) >= 1
    with pytest.raises(ValueError):
        an.smooth_restricted_sum(50, lam)


@settings(max_examples=15, deadline=None)
@given(st.integers(100, 10**5))
def test_smooth_partition(lam, x):
    total = an.smooth_restricted_sum(x, lam) + an.smooth_restricted_complement(x, lam)
    assert total == pytest.approx(an.rankin_partial(x, lam), rel=1e-13)


def test_rough_sum_oracle(lam):
    x, u, P = 3000, 3000, 2
    lo = an.smoothness_cutoff(x)
    direct = math.fsum(lam[m] ** 2 for m in range(2, u + 1) if m > lo and spf(m) > P)
    assert an.rough_sum(x, u, P, lam) == pytest.approx(direct, rel=1e-14)


def test_rough_sum_preconditions(lam):
    with pytest.raises(ValueError):
        an.rough_sum(10**5, 10**5, 4, lam)  # P >= u**0.1
    with pytest.raises(ValueError):
        an.rough_sum(10**5, 2, 1, lam)  # u < x**0.1


def test_rough_sum_doubling(lam):
    x = 10**5
    for u in (2 * 10**4, 5 * 10**4 // 2):
        a, b = an.rough_sum(x, u, 2, lam), an.rough_sum(x, 2 * u, 2, lam)
        assert a < b <= 3 * a


def test_rough_sum_ratio_grid(lam):
    ratios = []
    for x in (10**4, 10**5):
        for P in (2, 3):
            u = x
            if P < u**0.1:
                ratios.append(an.rough_sum(x, u, P, lam) * math.log(P) / u)
    assert ratios and max(ratios) / min(ratios) < 10


def test_smooth_series(lam):
    assert an.smooth_series(2, lam) == pytest.approx(1.42, abs=0.005)
    for P in (2, 30, 100):
        prod = an.smooth_series(P, lam)
        assert prod == pytest.approx(exact_second_moment(P, lam), rel=1e-14)
        assert prod >= an.smooth_series_direct(P, lam, 10**5)
    # the omitted tail shrinks as the truncation grows
    gaps = [an.smooth_series(30, lam) - an.smooth_series_direct(30, lam, N) for N in (10**3, 10**4, 10**5)]
    assert gaps[0] > gaps[1] > gaps[2] > 0
    ratios = [an.smooth_series(P, lam) / math.log(P) for P in (100, 1000, 10_000)]
    assert max(ratios) / min(ratios) < 2
    with pytest.raises(ValueError):
        an.smooth_series(20_000, lam)


def test_parseval_examples(lam):
    lhs, rhs = an.parseval_check(1, 0.5, lam)
    assert lhs == pytest.approx(1, abs=1e-12) and rhs == pytest.approx(1, abs=1e-12)
    for sigma in (0.25, 1.0, 2.0):
        l1, r1 = an.parseval_check(1, sigma, lam)
        assert l1 == pytest.approx(1 / (2 * sigma), rel=1e-12) and r1 == pytest.approx(1 / (2 * sigma), rel=1e-12)
    lhs, rhs = an.parseval_check(2, 0.5, lam)
    assert rhs == pytest.approx(lhs, rel=1e-4)
    lhs, rhs = an.parseval_check(20, 0.5, lam)
    assert rhs == pytest.approx(lhs, rel=1e-3)
    with pytest.raises(ValueError):
        an.parseval_check(2, 0.0, lam)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 40), st.floats(0.3, 2.0))
def test_parseval_closed_form(lam, cutoff, sigma):
    lhs = an.parseval_lhs(cutoff, sigma, lam)
    closed = an.parseval_rhs_closed(cutoff, sigma, lam)
    assert closed == pytest.approx(lhs, rel=1e-10)
    assert an.parseval_rhs_quadrature(cutoff, sigma, lam) == pytest.approx(lhs, rel=1e-4)


def test_sum_trace_increasing():
    tr = an.SumTrace("loglog")
    tr.add(10, 1.0)
    tr.add(100, 2.0)
    with pytest.raises(ValueError):
        tr.add(100, 3.0)


@pytest.mark.slow
def test_mertens_drift_together(lam_big):
    xs = [10**3, 3 * 10**3, 10**4, 3 * 10**4, 10**5, 3 * 10**5, 10**6]
    delta = [an.mertens_lambda(x, lam_big) - an.mertens_classic(x) for x in xs]
    assert all(abs(d - delta[0]) <= 0.5 for d in delta)


@pytest.mark.slow
def test_smooth_trend(lam_big):
    v5 = an.smooth_restricted_sum(10**5, lam_big) * math.log(math.log(1e5)) / 1e5
    v6 = an.smooth_restricted_sum(10**6, lam_big) * math.log(math.log(1e6)) / 1e6
    assert 0 < v6 <= 1.1 * v5 < 10
