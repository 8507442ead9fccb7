from __future__ import annotations

import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import comb

from l2n2 import (EULER_GAMMA, KJPair, c_kj_beta_oracle, c_kj_exact,
                  c_kj_limit, constants_grid, poisson_limit_oracle,
                  unit_ball_volume)

# Reference values frozen to five printed decimals.  The (8, 7) row of
# the conventional table carries a last-digit slip: the closed form
# gives gamma + log 7 = 2.5231258..., which prints as 2.52313 (rounded)
# or 2.52312 (truncated), never 2.52310.  That row is pinned through
# the adjacent-pair identity instead, with a loose check against the
# printed figure.
TABLE_5DP = {
    (2, 1): 0.57722,
    (3, 1): -0.05796,
    (5, 1): -0.14338,
    (5, 2): 0.03536,
    (6, 3): 0.14185,
    (8, 4): 0.10242,
    (10, 8): 0.85720,
}


@pytest.mark.parametrize("kj,expected", sorted(TABLE_5DP.items()))
def test_exact_constant_matches_frozen_table(kj, expected):
    assert abs(c_kj_exact(KJPair(*kj)) - expected) <= 1e-5


def test_exact_constant_8_7_identity_and_printed_value():
    got = c_kj_exact(KJPair(8, 7))
    assert abs(got - (EULER_GAMMA + math.log(7))) < 1e-12
    assert abs(got - 2.52310) < 3e-5  # printed figure is off in its last digit


@pytest.mark.parametrize("j", range(1, 21))
def test_adjacent_pair_identity(j):
    # k = j + 1 collapses the sum to a single term: gamma + log j.
    assert c_kj_exact(KJPair(j + 1, j)) == pytest.approx(
        EULER_GAMMA + math.log(j), abs=1e-12)


def test_2_1_equals_euler_gamma():
    assert c_kj_exact(KJPair(2, 1)) == pytest.approx(EULER_GAMMA, abs=1e-13)


def test_limit_constant_relation():
    # The limiting mean carries the Beta normalizer's extra (k - j); the
    # two conventions must agree exactly on adjacent pairs.
    for j in (1, 2, 5):
        assert c_kj_limit(KJPair(j + 1, j)) == c_kj_exact(KJPair(j + 1, j))
    assert c_kj_limit(KJPair(5, 3)) == pytest.approx(
        2.0 * c_kj_exact(KJPair(5, 3)), rel=1e-15)
    assert c_kj_limit(KJPair(8, 4)) == pytest.approx(
        4.0 * c_kj_exact(KJPair(8, 4)), rel=1e-15)


def test_limit_constant_is_the_beta_mean():
    # Direct Monte Carlo of E[-log(-log U)], U ~ Beta(j, k-j), without
    # the library's rescaling; this pins which convention c_kj_limit is.
    rng = np.random.default_rng(123)
    for k, j in [(3, 1), (5, 3), (8, 4)]:
        u = rng.beta(j, k - j, size=500_000)
        vals = -np.log(-np.log(u))
        vals = vals[np.isfinite(vals)]
        se = vals.std(ddof=1) / math.sqrt(vals.size)
        assert abs(vals.mean() - c_kj_limit(KJPair(k, j))) <= 4 * se


def _quad_oracle(k: int, j: int) -> float:
    # Independent evaluation through the order-statistic integral.
    pref = comb(k - 1, j - 1, exact=True)

    def integrand(u):
        return math.log(-math.log(u)) * u ** (j - 1) * (1.0 - u) ** (k - j - 1)

    val, err = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-11,
                              limit=200)
    assert err < 1e-8
    return -pref * val


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=13), st.integers(min_value=1, max_value=13))
def test_exact_agrees_with_integral_oracle(a, b):
    j, k = min(a, b), max(a, b) + 1
    assert c_kj_exact(KJPair(k, j)) == pytest.approx(_quad_oracle(k, j), abs=1e-9)


def test_wide_gap_uses_stable_path():
    # Gap > 12 switches from the alternating sum (catastrophic
    # cancellation) to quadrature; check against the Monte Carlo oracle.
    pair = KJPair(16, 2)
    exact = c_kj_exact(pair)
    est, se = c_kj_beta_oracle(pair, samples=400_000, seed=91)
    assert abs(exact - est) <= 4 * se
    assert math.isfinite(exact)


@pytest.mark.parametrize("kj", [(2, 1), (3, 2), (5, 3), (5, 2), (8, 4), (10, 1)])
def test_beta_oracle_brackets_exact(kj):
    pair = KJPair(*kj)
    est, se = c_kj_beta_oracle(pair, samples=200_000, seed=7)
    assert se < 0.02
    assert abs(est - c_kj_exact(pair)) <= 4 * se


def test_poisson_oracle_small_grid():
    for k, j in [(2, 1), (5, 3)]:
        pair = KJPair(k, j)
        c = c_kj_limit(pair)
        for d in (1, 3):
            mean, se = poisson_limit_oracle(d, rate=1.0, pair=pair,
                                            trials=40_000, seed=d)
            assert abs(mean - (math.log(d) + c)) <= 4 * se


def test_poisson_oracle_rate_invariance():
    pair = KJPair(3, 1)
    target = math.log(2) + c_kj_limit(pair)
    for rate in (0.5, 10.0):
        mean, se = poisson_limit_oracle(2, rate=rate, pair=pair,
                                        trials=40_000, seed=17)
        assert abs(mean - target) <= 4 * se


def test_unit_ball_volume_known_values():
    assert unit_ball_volume(1) == pytest.approx(2.0, rel=1e-14)
    assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-14)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)


def test_constants_grid_shape_and_finiteness():
    rows = constants_grid(6)
    assert len(rows) == 15  # all 1 <= j < k <= 6
    assert rows[0][:2] == (2, 1)
    assert all(math.isfinite(c) for _, _, c in rows)
    ks = {(k, j) for k, j, _ in rows}
    assert (6, 5) in ks and (6, 1) in ks


def test_evaluation_under_one_millisecond():
    pairs = [KJPair(*kj) for kj in TABLE_5DP] + [KJPair(8, 7)]
    for pair in pairs:
        c_kj_exact(pair)  # warm any caches
        t0 = time.perf_counter()
        c_kj_exact(pair)
        assert time.perf_counter() - t0 < 1e-3


def test_pair_validation():
    with pytest.raises(ValueError):
        KJPair(2, 2)
    with pytest.raises(ValueError):
        KJPair(1, 0)
    with pytest.raises(ValueError):
        c_kj_beta_oracle(KJPair(2, 1), samples=100, seed=0)
    with pytest.raises(ValueError):
        poisson_limit_oracle(0, rate=1.0, pair=KJPair(2, 1), trials=40_000, seed=0)
    with pytest.raises(ValueError):
        poisson_limit_oracle(2, rate=-1.0, pair=KJPair(2, 1), trials=40_000, seed=0)
