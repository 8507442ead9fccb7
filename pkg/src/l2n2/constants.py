"""The universal constant C_kj of the loglog neighbor-ratio statistic.

For a homogeneous Poisson process (and in the large-sample limit for any
well-behaved density), the mean of L_kj = -log(log(R_k/R_j)) at a point
equals log(d) plus a constant depending only on (k, j).  Two
normalizations of that constant are in circulation and this module
carries both, because they disagree for non-adjacent pairs:

* :func:`c_kj_exact` -- the conventional tabulated closed form
  (alternating binomial sum with prefactor binom(k-1, j-1), quadrature
  fallback where the sum cancels catastrophically);
* :func:`c_kj_limit` -- the actual limiting mean E[-log(-log U)] with
  U ~ Beta(j, k-j), which works out to exactly (k - j) * c_kj_exact.
  The Beta(j, k-j) density normalizer is (k-j) * binom(k-1, j-1), not
  binom(k-1, j-1), hence the extra factor.  The two coincide for every
  adjacent pair k = j + 1 -- in particular for the default (2, 1).

Anything comparing against simulated radii (the Poisson oracle, the
asymptotic estimator fallback) must use ``c_kj_limit``; the tabulated
``c_kj_exact`` is what the printed constant tables list.

Two independent stochastic oracles cross-check the closed forms:
:func:`c_kj_beta_oracle` (Monte Carlo over the Beta(j, k-j) law of the
limiting ratio (R_j/R_k)^d) and :func:`poisson_limit_oracle` (direct
simulation of the k nearest points of a rate-lambda Poisson process).
They are deliberately not implemented in terms of the closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

__all__ = [
    "EULER_GAMMA",
    "KJPair",
    "unit_ball_volume",
    "c_kj_exact",
    "c_kj_limit",
    "c_kj_beta_oracle",
    "poisson_limit_oracle",
    "constants_grid",
]

#: Euler-Mascheroni constant, full double precision.
EULER_GAMMA = 0.5772156649015329

# Above this k-j the alternating sum loses more than ~1e-10 relative
# accuracy to cancellation and the integral form is used instead.
_ALTERNATING_SUM_MAX_GAP = 12


@dataclass(frozen=True)
class KJPair:
    """Neighbor orders (k, j) with k > j >= 1."""

    k: int
    j: int

    def __post_init__(self) -> None:
        if not (isinstance(self.k, (int, np.integer)) and isinstance(self.j, (int, np.integer))):
            raise ValueError("k and j must be integers")
        if not self.k > self.j >= 1:
            raise ValueError(f"need k > j >= 1, got (k, j) = ({self.k}, {self.j})")


def _as_pair(pair) -> KJPair:
    if isinstance(pair, KJPair):
        return pair
    k, j = pair
    return KJPair(int(k), int(j))


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d: pi^(d/2) / Gamma(d/2 + 1)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def c_kj_exact(pair) -> float:
    """Closed-form universal constant C_kj.

    Evaluates

        C_kj = binom(k-1, j-1) * sum_{i=0}^{k-j-1} (-1)^i binom(k-j-1, i)
               * (gamma + log(i+j)) / (i+j),

    which reduces to gamma + log(j) when k = j + 1.  The alternating sum
    cancels catastrophically once k - j grows; beyond a gap of
    ``_ALTERNATING_SUM_MAX_GAP`` the equivalent integral

        C_kj = -binom(k-1, j-1) * int_0^1 log(-log u) u^(j-1) (1-u)^(k-j-1) du

    is evaluated by adaptive quadrature instead, so the function never
    returns silently inaccurate values.
    """
    pair = _as_pair(pair)
    k, j = pair.k, pair.j
    if k == j + 1:
        return EULER_GAMMA + math.log(j)
    gap = k - j
    prefactor = math.comb(k - 1, j - 1)
    if gap <= _ALTERNATING_SUM_MAX_GAP:
        total = 0.0
        for i in range(gap):
            term = math.comb(gap - 1, i) * (EULER_GAMMA + math.log(i + j)) / (i + j)
            total += term if i % 2 == 0 else -term
        return prefactor * total
    value, _err = integrate.quad(
        lambda u: math.log(-math.log(u)) * u ** (j - 1) * (1.0 - u) ** (gap - 1),
        0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    return -prefactor * value


def c_kj_limit(pair) -> float:
    """Exact limiting mean of L_kj minus log d.

    Equals E[-log(-log U)] for U ~ Beta(j, k-j): the constant that the
    mean statistic actually converges to (see the module docstring for
    how it relates to the tabulated :func:`c_kj_exact`).  Identical to
    ``c_kj_exact`` whenever k = j + 1.
    """
    pair = _as_pair(pair)
    return (pair.k - pair.j) * c_kj_exact(pair)


def c_kj_beta_oracle(pair, samples: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate of the tabulated C_kj via its Beta law.

    In the Poisson limit the ratio U = (R_j/R_k)^d is Beta(j, k-j)
    distributed, independent of d and of the process rate, with
    E[-log(log(1/U))] = (k-j) * C_kj in the tabulated normalization.
    Draws ``samples`` variates, averages -log(-log u), and rescales by
    1/(k-j) so the returned (estimate, standard error) target
    :func:`c_kj_exact` directly.  Deterministic per seed.
    """
    pair = _as_pair(pair)
    if samples < 10_000:
        raise ValueError("use at least 1e4 samples for a meaningful standard error")
    rng = np.random.default_rng(seed)
    u = rng.beta(pair.j, pair.k - pair.j, size=samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = -np.log(-np.log(u))
    vals = vals[np.isfinite(vals)]  # u rounding to exactly 0 or 1 is ~1e-16 rare
    gap = pair.k - pair.j
    est = float(vals.mean()) / gap
    stderr = float(vals.std(ddof=1) / math.sqrt(vals.size)) / gap
    return est, stderr


def poisson_limit_oracle(d: int, rate: float, pair, trials: int,
                         seed: int) -> tuple[float, float]:
    """Simulate L_kj at the origin of a rate-lambda Poisson process in R^d.

    Uses the arrival-time construction: with Z_1, Z_2, ... i.i.d.
    standard exponentials and Y_m = Z_1 + ... + Z_m, the m-th nearest
    process point to the origin lies at radius

        R_m = ( Y_m / (rate * omega_d) )^(1/d),

    omega_d the unit-ball volume.  Returns the empirical mean of
    -log(log(R_k/R_j)) over ``trials`` independent processes and its
    standard error.  The mean converges to log(d) + c_kj_limit(pair)
    for every rate, which is what makes this an independent oracle for
    the constant (use c_kj_limit, not the tabulated c_kj_exact, as the
    reference whenever k > j + 1).
    """
    pair = _as_pair(pair)
    if d < 1:
        raise ValueError("d must be >= 1")
    if rate <= 0:
        raise ValueError("rate must be positive")
    if trials < 10_000:
        raise ValueError("use at least 1e4 trials for a meaningful standard error")
    rng = np.random.default_rng(seed)
    z = rng.exponential(scale=1.0, size=(trials, pair.k))
    y = np.cumsum(z, axis=1)
    scale = rate * unit_ball_volume(d)
    r_k = (y[:, pair.k - 1] / scale) ** (1.0 / d)
    r_j = (y[:, pair.j - 1] / scale) ** (1.0 / d)
    vals = -np.log(np.log(r_k / r_j))
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(trials))
    return mean, stderr


def constants_grid(k_max: int) -> list[tuple[int, int, float]]:
    """All (k, j, C_kj) rows for 1 <= j < k <= k_max, in (k, j) order."""
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    return [(k, j, c_kj_exact(KJPair(k, j)))
            for k in range(2, k_max + 1) for j in range(1, k)]
