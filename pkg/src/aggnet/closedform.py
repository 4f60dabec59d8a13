"""Closed-form rates for generations networks, the per-generation moment
recursion for symmetric observation sets, and the planner profile."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np

from . import linalg
from .equilibrium import StrategyProfile, WeightMatrix, induced_weights, signal_counts
from .netcore import GenerationsSpec, build_generations, validate_symmetry
from .tolerances import STATIONARY_MAX_SQUARINGS, STATIONARY_TOL

__all__ = [
    "GenSummary",
    "GenerationMoments",
    "Increments",
    "NotConvergedError",
    "PositionChain",
    "block_design_pairs",
    "cancellation_efficiency",
    "generation_summary",
    "increment_series",
    "maximal_beta",
    "maximal_efficiency",
    "moment_recursion",
    "monotonicity_violations",
    "per_generation_rate",
    "planner_counts",
    "planner_profile",
    "silo_rates",
    "stationary_distribution",
    "symmetric_efficiency",
]


class NotConvergedError(ArithmeticError):
    pass


def maximal_efficiency(K: int) -> Fraction:
    if K < 1:
        raise ValueError("K must be >= 1")
    return Fraction(2 * K - 1, K * K)


def _check_dc(d: int, c: int) -> None:
    if d < 1 or not 0 <= c <= d:
        raise ValueError(f"need d >= 1 and 0 <= c <= d, got d={d}, c={c}")
    if c == 0 and d >= 2:
        raise ValueError(f"c=0 forces d=1 in a symmetric network, got d={d}")


def per_generation_rate(d: int, c: int) -> Fraction:
    """Signals aggregated per generation in the long run, ``1 + (d^2-d)/(d^2-d+c)``."""
    _check_dc(d, c)
    num, den = d * d - d, d * d - d + c
    # 0/0 = 0 when d = 1, c = 0
    return 1 + (Fraction(num, den) if den else Fraction(0))


def symmetric_efficiency(d: int, c: int, K: int) -> Fraction:
    if K < 1:
        raise ValueError("K must be >= 1")
    return per_generation_rate(d, c) / K


def monotonicity_violations(d_max: int = 10) -> list[tuple]:
    """Pairs on the grid ``2 <= d <= d_max``, ``1 <= c <= d`` where the
    per-generation rate fails to increase in ``d`` or decrease in ``c``."""
    bad = []
    for d in range(2, d_max + 1):
        for c in range(1, d + 1):
            for c2 in range(c + 1, d + 1):
                if not per_generation_rate(d, c) > per_generation_rate(d, c2):
                    bad.append(("c", d, c, c2))
            for d2 in range(d + 1, d_max + 1):
                if not per_generation_rate(d2, c) > per_generation_rate(d, c):
                    bad.append(("d", c, d, d2))
    return bad


def block_design_pairs(K: int) -> list[tuple[int, int]]:
    """``(d, c)`` with ``d >= 2``, ``1 <= c < d`` and ``K = (d^2-d+c)/c``."""
    out = []
    for d in range(2, K + 1):
        for c in range(1, d):
            if (d * d - d + c) == K * c:
                out.append((d, c))
    return out


def cancellation_efficiency(K: int) -> Fraction:
    if K < 2:
        raise ValueError("K must be >= 2")
    value = (2 - Fraction(1, K)) / K
    for d, c in block_design_pairs(K):
        if symmetric_efficiency(d, c, K) != value:
            raise ArithmeticError(f"(d, c, K)=({d}, {c}, {K}) breaks the cancellation identity")
    return value


def silo_rates(partition) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Executive and per-silo signals aggregated per generation."""
    parts = [frozenset(p) for p in partition]
    if not parts or any(not p for p in parts):
        raise ValueError("silos must be nonempty")
    if sum(len(p) for p in parts) != len(frozenset().union(*parts)):
        raise ValueError("silos overlap")
    rates = tuple(Fraction(2 * len(p) - 1, len(p)) for p in parts)
    return sum(rates, Fraction(0)), rates


@dataclass(frozen=True)
class GenerationMoments:
    t: int
    var: object
    cov: object
    # weight on each neighbor in generation t; None for t = 1
    beta: object
    sigma2: object

    @property
    def r(self):
        return self.var * self.sigma2 / 4


def moment_recursion(d: int, c: int, sigma2, T: int, exact: bool = False) -> list[GenerationMoments]:
    """Var_t, Cov_t and beta_t of a symmetric generations network.

    With ``exact=True`` everything is rational (``sigma2`` must then be
    rational too).  Exact denominators double in length every generation,
    so the arithmetic runs on GMP and converts back to ``Fraction``.
    """
    _check_dc(d, c)
    if T < 1:
        raise ValueError("T must be >= 1")
    if exact:
        s2 = gmpy2.mpq(Fraction(sigma2).numerator, Fraction(sigma2).denominator)
        unit = gmpy2.mpq(4) / s2
        zero = gmpy2.mpq(0)
    else:
        s2 = float(sigma2)
        unit, zero = 4.0 / s2, 0.0
    var, cov = unit, zero
    raw = [(1, var, cov, None)]
    for t in range(2, T + 1):
        beta = var / (var + (d - 1) * cov)
        var, cov = (
            unit + beta * beta * (d * var + (d * d - d) * cov),
            beta * beta * (c * var + (d * d - c) * cov),
        )
        raw.append((t, var, cov, beta))
    conv = _to_fraction if exact else float
    sig = Fraction(sigma2) if exact else float(sigma2)
    return [
        GenerationMoments(t, conv(v), conv(cv), None if b is None else conv(b), sig)
        for t, v, cv, b in raw
    ]


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def maximal_beta(mu_sum, sigma2_sum, sigma2, K: int):
    """Equilibrium weight on each observed action in a maximal generations
    network.

    ``mu_sum`` and ``sigma2_sum`` are the conditional mean and variance of
    the summed log-actions of the generation that every observed agent saw,
    i.e. generation ``t - 2`` for an observer in generation ``t``.
    """
    if not sigma2_sum > 0:
        raise ValueError("sigma2_sum must be positive")
    exact = all(isinstance(x, (int, Fraction)) for x in (mu_sum, sigma2_sum, sigma2))
    inv = Fraction(1) / Fraction(sigma2) if exact else 1.0 / sigma2
    snr = Fraction(mu_sum) ** 2 / Fraction(sigma2_sum) if exact else mu_sum * mu_sum / sigma2_sum
    return (snr + inv) / (K * snr + inv)


@dataclass(frozen=True)
class GenSummary:
    mu_sum: object
    sigma2_sum: object

    def snr(self):
        return self.mu_sum * self.mu_sum / self.sigma2_sum


def generation_summary(W: WeightMatrix, K: int, t: int, sigma2) -> GenSummary:
    """Conditional moments of the sum of generation-``t`` log-actions."""
    rows = W.dense[(t - 1) * K : t * K]
    total = rows.sum(axis=0)
    s2 = Fraction(sigma2) if W.backend == "rational" else float(sigma2)
    return GenSummary(2 / s2 * total.sum(), 4 / s2 * (total * total).sum())


@dataclass(frozen=True)
class PositionChain:
    transition: np.ndarray
    stationary: np.ndarray
    squarings: int = 0


def _transition(spec: GenerationsSpec, exact: bool) -> np.ndarray:
    K = spec.K
    P = linalg.zeros((K, K), "rational" if exact else "float")
    for k, obs in enumerate(spec.psi):
        for j in obs:
            P[k, j - 1] = Fraction(1, len(obs)) if exact else 1.0 / len(obs)
    return P


def stationary_distribution(spec: GenerationsSpec, exact: bool = False) -> PositionChain:
    """Limit of the position chain ``k -> psi_k`` (uniform over ``psi_k``).

    The float path squares the transition matrix until successive powers
    agree to ``STATIONARY_TOL``; all rows of the limit must coincide.  The
    exact path solves ``pi P = pi, sum(pi) = 1`` with rational arithmetic.
    """
    P = _transition(spec, exact=False)
    power = P.copy()
    for step in range(1, STATIONARY_MAX_SQUARINGS + 1):
        nxt = power @ power
        if np.abs(nxt - power).max() < STATIONARY_TOL:
            power = nxt
            break
        power = nxt
    else:
        raise NotConvergedError("transition powers did not converge")
    if np.abs(power - power[0]).max() > STATIONARY_TOL * 10:
        raise NotConvergedError("limit rows differ: chain is reducible or periodic")
    pi = power.mean(axis=0)
    if not exact:
        return PositionChain(P, pi / pi.sum(), step)
    Pq = _transition(spec, exact=True)
    K = spec.K
    # (P' - I) pi = 0 with the last equation replaced by sum(pi) = 1
    A = [[Pq[j, i] - (1 if i == j else 0) for j in range(K)] for i in range(K)]
    b = [Fraction(0)] * K
    A[-1] = [Fraction(1)] * K
    b[-1] = Fraction(1)
    pi_exact = linalg.exact_solve(A, b)
    if np.abs(np.array([float(x) for x in pi_exact]) - pi).max() > 1e-9:
        raise NotConvergedError("exact and iterated stationary distributions disagree")
    return PositionChain(Pq, pi_exact, step)


def planner_profile(spec: GenerationsSpec, T: int | None = None, backend: str = "float") -> StrategyProfile:
    """Rescaled log-linear planner strategy for a symmetric, strongly
    connected generations network with ``c >= 1``.

    Start from own weight ``1/pi_k`` and weight ``1/|psi_k|`` on each
    observed action, then multiply each agent's log-action by ``b_i =
    sum(w') / sum(w'^2)`` (twice mean over variance) so every action admits
    a signal count.
    """
    linalg.check_backend(backend)
    rep = validate_symmetry(spec)
    if not (rep.is_symmetric and rep.strongly_connected and rep.c >= 1):
        raise ValueError("planner needs symmetric, strongly connected observation sets with c >= 1")
    if T is not None:
        spec = spec.with_generations(T)
    exact = backend == "rational"
    net = build_generations(spec)
    pi = stationary_distribution(spec, exact=exact).stationary
    K = spec.K
    one = Fraction(1) if exact else 1.0
    own_raw, nb_raw = [], []
    for i in range(1, net.n + 1):
        k = (i - 1) % K
        own_raw.append(one / pi[k])
        m = len(net.neighbors[i - 1])
        nb_raw.append(np.array([one / m for _ in range(m)], dtype=object if exact else float))
    raw = StrategyProfile(tuple(own_raw), tuple(nb_raw), "planner")
    Wr = induced_weights(net, raw).dense
    b = Wr.sum(axis=1) / (Wr * Wr).sum(axis=1)
    own, nbw = [], []
    for i in range(1, net.n + 1):
        nb = net.neighbors[i - 1]
        own.append(b[i - 1] * own_raw[i - 1])
        nbw.append(np.array([b[i - 1] * w / b[j - 1] for w, j in zip(nb_raw[i - 1], nb)],
                            dtype=object if exact else float))
    return StrategyProfile(tuple(own), tuple(nbw), "planner")


def planner_counts(spec: GenerationsSpec, T: int | None = None, backend: str = "float"):
    """Planner profile, its weight matrix and (identity-checked) signal counts."""
    if T is not None:
        spec = spec.with_generations(T)
    profile = planner_profile(spec, backend=backend)
    W = induced_weights(build_generations(spec), profile)
    return profile, W, signal_counts(W)


@dataclass(frozen=True)
class Increments:
    # values[t - 2] = max r in generation t  -  min r in generation t-1, for t >= 2
    values: np.ndarray
    violations: tuple[int, ...]

    def per_generation(self) -> np.ndarray:
        return np.array([float(x) for x in self.values])


def increment_series(r, K: int, bound=3, check_from: int = 3) -> Increments:
    """Generation-to-generation growth of signal counts.

    ``violations`` lists generations ``t >= check_from`` where some agent
    aggregates more than ``bound`` signals beyond some agent of ``t-1``.
    """
    r = np.asarray(getattr(r, "r", r))
    if len(r) % K:
        raise ValueError(f"{len(r)} agents do not split into generations of {K}")
    gens = r.reshape(-1, K)
    vals = [max(gens[t]) - min(gens[t - 1]) for t in range(1, len(gens))]
    bad = tuple(t + 2 for t, v in enumerate(vals) if t + 2 >= check_from and v > bound)
    return Increments(np.array(vals, dtype=object if r.dtype == object else float), bad)
