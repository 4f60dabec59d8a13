"""Accuracy probabilities, expected quadratic-loss utility and welfare
comparisons built on signal counts."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import expit, roots_hermitenorm
from scipy.optimize import brentq
from scipy.stats import norm

from .tolerances import QUAD_MAX_NODES, QUAD_NODES, QUAD_TOL, WELFARE_CONVERGENCE_TOL

__all__ = [
    "Attainment",
    "QuadratureError",
    "UtilityCurve",
    "WelfareWeights",
    "accuracy_prob",
    "accuracy_prob_mirror",
    "attainment",
    "expected_utility",
    "expected_utility_mc",
    "patient_compare",
    "utility_curve",
    "utility_series",
]


class QuadratureError(ArithmeticError):
    pass


def _check_r_sigma(r, sigma2):
    if not r >= 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")


def _check_eps(eps):
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 0.5), got {eps}")


def accuracy_prob(r: float, sigma2: float, eps: float) -> float:
    """P[a > 1 - eps | state 1] for an agent holding ``r`` signals."""
    _check_r_sigma(r, sigma2)
    _check_eps(eps)
    L = math.log((1 - eps) / eps)
    m = 2 * r / sigma2
    s = 2 * math.sqrt(r / sigma2)
    return float(norm.sf((L - m) / s))


def accuracy_prob_mirror(r: float, sigma2: float, eps: float) -> float:
    """P[a < eps | state 0]; equals :func:`accuracy_prob` by state symmetry."""
    _check_r_sigma(r, sigma2)
    _check_eps(eps)
    L = math.log((1 - eps) / eps)
    m = 2 * r / sigma2
    s = 2 * math.sqrt(r / sigma2)
    # l ~ N(-m, s^2); a < eps  <=>  l < -L
    return float(norm.cdf((m - L) / s))


@lru_cache(maxsize=None)
def _hermite(n: int):
    x, w = roots_hermitenorm(n)
    with np.errstate(divide="ignore"):
        return x, np.log(w)


def _log_integrand(l, m, s):
    # log of (1 - logistic(l))^2 times the N(m, s^2) density
    return -2 * np.logaddexp(0.0, l) - (l - m) ** 2 / (2 * s * s) - math.log(s * math.sqrt(2 * math.pi))


def _laplace_center(m: float, s: float):
    """Mode and curvature width of the integrand, so the Hermite rule sits on
    its mass even when that mass lies far in the Gaussian tail."""
    f = lambda l: -2 * expit(l) - (l - m) / (s * s)
    lo, hi = m - 2 * s * s - 1.0, m + 1.0
    c = brentq(f, lo, hi, xtol=1e-14)
    p = expit(c)
    return c, 1.0 / math.sqrt(2 * p * (1 - p) + 1 / (s * s))


def _gh(m: float, s: float, n: int) -> float:
    x, logw = _hermite(n)
    c, tau = _laplace_center(m, s)
    l = c + tau * x
    logs = logw + x * x / 2 + math.log(tau) + _log_integrand(l, m, s)
    return -float(np.exp(logs).sum())


def expected_utility(r: float, sigma2: float) -> float:
    """E[-(1 - a)^2 | state 1] with ``a = logistic(l)``, ``l ~ N(2r/s2, 4r/s2)``.

    Gauss-Hermite quadrature centred at the integrand's mode, starting from
    ``QUAD_NODES`` nodes and refined until two successive estimates agree to
    ``QUAD_TOL``.
    """
    _check_r_sigma(r, sigma2)
    m = 2 * r / sigma2
    s = 2 * math.sqrt(r / sigma2)
    n = QUAD_NODES
    prev = _gh(m, s, n)
    while n < QUAD_MAX_NODES:
        n = 2 * n - 1
        cur = _gh(m, s, n)
        if abs(cur - prev) < QUAD_TOL:
            return cur
        prev = cur
    raise QuadratureError(f"quadrature did not settle for r={r}, sigma2={sigma2}")


def expected_utility_mc(r: float, sigma2: float, draws: int, seed: int = 0,
                        proposal_mean: float | None = 0.0, chunk: int = 1_000_000):
    """Monte Carlo estimate of :func:`expected_utility` and its standard error.

    Draws come from ``N(proposal_mean, 4r/s2)`` with likelihood-ratio weights;
    ``proposal_mean=None`` samples the log-action law directly.  Since the
    variance is twice the mean, a proposal centred at 0 keeps the weighted
    integrand bounded, which plain sampling cannot when ``r/s2`` is large.
    """
    _check_r_sigma(r, sigma2)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    m = 2 * r / sigma2
    s = 2 * math.sqrt(r / sigma2)
    mp = m if proposal_mean is None else proposal_mean
    total = total2 = 0.0
    left = draws
    while left > 0:
        k = min(chunk, left)
        l = rng.normal(mp, s, size=k)
        logratio = ((l - mp) ** 2 - (l - m) ** 2) / (2 * s * s)
        u = -np.exp(-2 * np.logaddexp(0.0, l) + logratio)
        total += u.sum()
        total2 += (u * u).sum()
        left -= k
    mean = total / draws
    var = (total2 - draws * mean * mean) / (draws - 1)
    return mean, math.sqrt(max(var, 0.0) / draws)


@dataclass(frozen=True)
class UtilityCurve:
    sigma2: float
    r: np.ndarray
    v: np.ndarray

    def is_increasing(self) -> bool:
        return bool(np.all(np.diff(self.v) > 0))

    def in_bounds(self) -> bool:
        return bool(np.all((self.v > -0.25) & (self.v < 0)))


def utility_curve(sigma2: float, r_values) -> UtilityCurve:
    r = np.asarray(r_values, dtype=float)
    return UtilityCurve(sigma2, r, np.array([expected_utility(x, sigma2) for x in r]))


def utility_series(r_series, sigma2: float) -> np.ndarray:
    """Per-agent expected utility for a series of signal counts."""
    return np.array([expected_utility(float(x), sigma2) for x in r_series])


@dataclass(frozen=True)
class Attainment:
    # 1-based agent indices, None when not attained within the horizon
    strong: int | None
    weak: int | None
    horizon: int


def attainment(r_series, sigma2: float, v_bar: float) -> Attainment:
    """First agent reaching ``v_bar`` (weak) and first agent from which every
    later agent in the series reaches it (strong).  Strong attainment is
    relative to the finite horizon of the series."""
    if not -0.25 < v_bar < 0:
        raise ValueError("v_bar must lie in (-0.25, 0)")
    v = utility_series(r_series, sigma2)
    ok = v >= v_bar
    weak = int(np.argmax(ok)) + 1 if ok.any() else None
    strong = None
    if ok[-1]:
        bad = np.flatnonzero(~ok)
        strong = int(bad[-1]) + 2 if len(bad) else 1
    return Attainment(strong, weak, len(v))


@dataclass(frozen=True)
class WelfareWeights:
    gammas: np.ndarray
    gamma_inf: float = 0.0
    T: int = 1

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        object.__setattr__(self, "gammas", g)
        if np.any(g < 0) or self.gamma_inf < 0:
            raise ValueError("welfare weights must be nonnegative")
        if not np.isfinite(g.sum()):
            raise ValueError("weights must have a finite sum")

    @classmethod
    def discounted(cls, n: int, T: int, delta: float, gamma_inf: float = 0.0) -> "WelfareWeights":
        """``gamma_i = delta**(i - T)`` for ``i >= T`` and 0 before."""
        if not 1 <= T <= n or not 0 < delta < 1:
            raise ValueError("need 1 <= T <= n and 0 < delta < 1")
        i = np.arange(1, n + 1)
        return cls(np.where(i >= T, delta ** (i - T).clip(min=0), 0.0), gamma_inf, T)

    def is_patient(self) -> bool:
        i = np.arange(1, len(self.gammas) + 1)
        return bool(np.all(self.gammas[i < self.T] == 0) and np.all(self.gammas[i >= self.T] > 0))


def patient_compare(v_a, v_b, weights: WelfareWeights, K: int = 1):
    """Welfare of two utility series; the final value stands in for the limit.

    Returns ``(gamma_a, gamma_b, sign)`` with ``sign`` in {-1, 0, 1}.
    """
    v_a = np.asarray(v_a, dtype=float)
    v_b = np.asarray(v_b, dtype=float)
    if len(v_a) != len(v_b):
        raise ValueError(f"series lengths differ: {len(v_a)} vs {len(v_b)}")
    if len(weights.gammas) != len(v_a):
        raise ValueError("weights must match the series length")
    if weights.gamma_inf > 0:
        for v in (v_a, v_b):
            if len(v) > K and abs(v[-1] - v[-1 - K]) > WELFARE_CONVERGENCE_TOL:
                warnings.warn("series has not converged; limit proxy is the final value", RuntimeWarning)
    ga = float(weights.gammas @ v_a + weights.gamma_inf * v_a[-1])
    gb = float(weights.gammas @ v_b + weights.gamma_inf * v_b[-1])
    return ga, gb, (ga > gb) - (ga < gb)
