"""Equilibrium log-linear weights and signal counts.

Every log-action is a linear combination of log-signals, ``l_i = sum_j
W[i, j] * lambda_j``.  Rows of ``W`` are built in agent order: agent ``i``
looks at the rows ``W_hat`` of whatever it observes and puts weights

    beta = (W_hat W_hat')^{-1} W_hat 1

on those observations, which gives row ``beta' W_hat`` plus its own signal.
Nothing here depends on the signal variance.

Agents are 1-based in function arguments; arrays are 0-based, so the row of
agent ``i`` is ``W.dense[i - 1]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .netcore import Network, NetworkError
from .tolerances import IDENTITY_ATOL, IDENTITY_RTOL

__all__ = [
    "BestResponse",
    "BetaProfile",
    "DegenerateProfileWarning",
    "LogSignalParams",
    "SignalCountingError",
    "SignalCounts",
    "StrategyProfile",
    "WeightMatrix",
    "action_moments",
    "beta_from_moments",
    "best_response",
    "efficiency_estimate",
    "equilibrium",
    "equilibrium_profile",
    "equilibrium_weights",
    "induced_weights",
    "mentorship_weights",
    "signal_counts",
]


class SignalCountingError(ArithmeticError):
    """A weight row violates ``sum(w) == sum(w**2)``."""


class DegenerateProfileWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class LogSignalParams:
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def mean2(self):
        """Conditional mean of one log-signal given state 1."""
        return 2 / self.sigma2

    @property
    def var4(self):
        """Conditional variance of one log-signal."""
        return 4 / self.sigma2


@dataclass(frozen=True)
class WeightMatrix:
    dense: np.ndarray
    backend: str = "float"

    @property
    def n(self) -> int:
        return self.dense.shape[0]

    def row(self, i: int) -> np.ndarray:
        return self.dense[i - 1, :i]

    def support(self, i: int) -> list[tuple[int, object]]:
        """Nonzero ``(j, w_ij)`` pairs of agent ``i``'s row, 1-based ``j``."""
        row = self.row(i)
        return [(j + 1, w) for j, w in enumerate(row) if w != 0]

    def rows(self) -> list[list[tuple[int, object]]]:
        return [self.support(i) for i in range(1, self.n + 1)]


@dataclass(frozen=True)
class BetaProfile:
    """Weights on observed log-actions, parallel to ``Network.neighbors``."""

    betas: tuple[np.ndarray, ...]
    degenerate: tuple[bool, ...] = ()

    def __getitem__(self, i: int) -> np.ndarray:
        return self.betas[i - 1]


@dataclass(frozen=True)
class StrategyProfile:
    """Log-linear strategies: ``l_i = own[i] * lambda_i + neighbor[i] . l_N(i)``."""

    own: tuple
    neighbor: tuple[np.ndarray, ...]
    tag: str = "custom"

    def __post_init__(self):
        if len(self.own) != len(self.neighbor):
            raise ValueError("own and neighbor weights must cover the same agents")
        for i, (a, nb) in enumerate(zip(self.own, self.neighbor), start=1):
            vals = [a, *nb]
            if not all(np.isfinite(float(v)) for v in vals):
                raise ValueError(f"non-finite weight for agent {i}")

    @property
    def n(self) -> int:
        return len(self.own)


@dataclass(frozen=True)
class SignalCounts:
    r: np.ndarray
    backend: str = "float"

    @property
    def n(self) -> int:
        return len(self.r)

    def ratio(self) -> np.ndarray:
        """``r_i / i`` as floats."""
        return np.array([float(x) for x in self.r]) / np.arange(1, self.n + 1)

    def as_float(self) -> np.ndarray:
        return np.array([float(x) for x in self.r])

    def by_generation(self, K: int) -> np.ndarray:
        """Reshape to ``(T, K)``; row ``t-1`` holds generation ``t``."""
        if self.n % K:
            raise ValueError(f"{self.n} agents do not split into generations of {K}")
        return self.r.reshape(-1, K)


@dataclass(frozen=True)
class BestResponse:
    beta: np.ndarray
    own_weight: object
    r: object
    row: np.ndarray
    degenerate: bool = False


def _observation_rows(W: np.ndarray, i: int, neighbors, link: int, backend: str):
    """Rows (over columns ``< i``) of what agent ``i`` observes."""
    cols = max([*neighbors, link, 0])
    obs = W[[j - 1 for j in neighbors], :cols]
    if link:
        unit = linalg.zeros((1, cols), backend)
        unit[0, link - 1] = 1 if backend == "float" else Fraction(1)
        obs = np.vstack([obs, unit]) if len(neighbors) else unit
    return obs, cols


def _optimal_row(obs: np.ndarray, backend: str, strict: bool):
    G = obs @ obs.T
    rhs = obs.sum(axis=1)
    if strict:
        try:
            beta = linalg.spd_solve(G, rhs, backend)
        except linalg.SingularSystemError as exc:
            raise linalg.NotPositiveDefiniteError(
                f"observed rows are linearly dependent: {exc}"
            ) from None
        degenerate = False
    else:
        beta, degenerate = linalg.gram_solve(G, rhs, backend)
    if backend == "float":
        beta = np.asarray(beta, dtype=float)
    return beta, beta @ obs, degenerate


def _one(backend: str):
    return 1.0 if backend == "float" else Fraction(1)


def _weights(net: Network, backend: str, use_links: bool, strict: bool):
    backend = linalg.check_backend(backend)
    n = net.n
    W = linalg.zeros((n, n), backend)
    betas, flags = [], []
    for i in range(1, n + 1):
        nb = net.neighbors[i - 1]
        link = net.signal_links[i - 1] if use_links else 0
        W[i - 1, i - 1] = _one(backend)
        if not nb and not link:
            betas.append(linalg.zeros(0, backend))
            flags.append(False)
            continue
        obs, cols = _observation_rows(W, i, nb, link, backend)
        beta, row, degenerate = _optimal_row(obs, backend, strict)
        W[i - 1, :cols] = row
        betas.append(beta)
        flags.append(degenerate)
    return WeightMatrix(W, backend), BetaProfile(tuple(betas), tuple(flags))


def equilibrium_weights(net: Network, backend: str = "float") -> tuple[WeightMatrix, BetaProfile]:
    """Unique equilibrium weight matrix and neighbor weights of ``net``.

    Observed rows always come from a unit-triangular matrix, so every Gram
    system is positive definite; a failed Cholesky or a non-positive exact
    pivot raises :class:`linalg.NotPositiveDefiniteError`.
    """
    if net.has_signal_links:
        raise NetworkError("network has signal links; use mentorship_weights")
    return _weights(net, backend, use_links=False, strict=True)


def equilibrium(net: Network, backend: str = "float") -> tuple[WeightMatrix, BetaProfile, SignalCounts]:
    """Weights, neighbor weights and checked signal counts in one call."""
    W, B = equilibrium_weights(net, backend)
    return W, B, signal_counts(W)


def equilibrium_profile(net: Network, betas: BetaProfile) -> StrategyProfile:
    one = 1.0 if not betas.betas or betas.betas[0].dtype != object else Fraction(1)
    return StrategyProfile(tuple(one for _ in betas.betas), betas.betas, "equilibrium")


def beta_from_moments(mu, cov, backend: str = "float") -> np.ndarray:
    """Neighbor weights ``2 * cov^{-1} mu`` from conditional moments given state 1."""
    mu = np.asarray(mu, dtype=object if backend == "rational" else float)
    cov = np.asarray(cov, dtype=object if backend == "rational" else float)
    if backend == "rational":
        mu = linalg.to_fraction_array(mu)
        cov = linalg.to_fraction_array(cov)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] != mu.shape[0]:
        raise ValueError("cov must be square and match mu")
    if backend == "float" and not np.allclose(cov, cov.T):
        raise linalg.NotPositiveDefiniteError("covariance matrix is not symmetric")
    if backend == "rational" and not (cov == cov.T).all():
        raise linalg.NotPositiveDefiniteError("covariance matrix is not symmetric")
    return 2 * linalg.spd_solve(cov, mu, backend)


def _identity_holds(s1, s2, backend: str) -> bool:
    if backend == "rational":
        return s1 == s2
    return abs(s1 - s2) <= max(IDENTITY_ATOL, IDENTITY_RTOL * max(abs(s1), abs(s2)))


def signal_counts(W: WeightMatrix, check: bool = True) -> SignalCounts:
    """``r_i = sum_j w_ij``, asserting ``sum_j w_ij == sum_j w_ij**2`` per row."""
    D = W.dense
    sums = D.sum(axis=1)
    if check:
        squares = (D * D).sum(axis=1)
        for i, (s1, s2) in enumerate(zip(sums, squares), start=1):
            if not _identity_holds(s1, s2, W.backend):
                raise SignalCountingError(
                    f"agent {i}: sum of weights {s1} != sum of squared weights {s2}"
                )
    return SignalCounts(sums, W.backend)


def action_moments(W: WeightMatrix, i: int, params: LogSignalParams):
    """Mean and variance of agent ``i``'s log-action given state 1."""
    row = W.row(i)
    return params.mean2 * row.sum(), params.var4 * (row * row).sum()


def induced_weights(net: Network, profile: StrategyProfile, upto: int | None = None) -> WeightMatrix:
    """Weight matrix of a log-linear profile, by forward substitution."""
    m = net.n if upto is None else upto
    if profile.n < m:
        raise ValueError(f"profile covers {profile.n} agents, need {m}")
    backend = "rational" if any(isinstance(v, Fraction) for v in profile.own[:m]) else "float"
    W = linalg.zeros((m, m), backend)
    for i in range(1, m + 1):
        nb = net.neighbors[i - 1]
        beta = profile.neighbor[i - 1]
        if len(beta) != len(nb):
            raise ValueError(f"agent {i}: {len(beta)} neighbor weights for {len(nb)} neighbors")
        W[i - 1, i - 1] = profile.own[i - 1]
        for b, j in zip(beta, nb):
            W[i - 1, :j] += b * W[j - 1, :j]
    return WeightMatrix(W, backend)


def best_response(
    net: Network,
    predecessors: StrategyProfile,
    i: int,
    own_signal: bool = True,
) -> BestResponse:
    """Optimal log-linear play of agent ``i`` against fixed predecessor strategies.

    With ``own_signal=False`` this is an outside observer with no private
    signal who only sees ``N(i)``; its count measures how informative those
    actions are.  Singular Gram systems (e.g. two neighbors with proportional
    rows) are solved by least squares and flagged.
    """
    Wp = induced_weights(net, predecessors, upto=i - 1)
    backend = Wp.backend
    nb = net.neighbors[i - 1]
    W = linalg.zeros((i, i), backend)
    W[: i - 1, : i - 1] = Wp.dense
    own = _one(backend) if own_signal else 0 * _one(backend)
    row = linalg.zeros(i, backend)
    row[i - 1] = own
    if not nb:
        return BestResponse(linalg.zeros(0, backend), own, row.sum(), row)
    obs, cols = _observation_rows(W, i, nb, 0, backend)
    beta, part, degenerate = _optimal_row(obs, backend, strict=False)
    if degenerate:
        warnings.warn(
            f"agent {i}: observed actions are linearly dependent; using a least-squares solution",
            DegenerateProfileWarning,
            stacklevel=2,
        )
    row[:cols] += part
    r = row.sum()
    if not _identity_holds(r, (row * row).sum(), backend):
        raise SignalCountingError(f"best response of agent {i} fails the counting identity")
    return BestResponse(beta, own, r, row, degenerate)


def _mentor_k(net: Network) -> int:
    spec = net.spec
    if spec is None or spec.kind != "mentorship":
        raise NetworkError("mentorship_weights needs a network from build_mentorship")
    K = spec.K
    for i, link in enumerate(net.signal_links, start=1):
        expected = i - K if i > K else 0
        if link != expected:
            raise NetworkError(f"agent {i} has signal link {link}, expected {expected}")
    return K


def mentorship_weights(net: Network, backend: str = "float") -> tuple[WeightMatrix, SignalCounts]:
    """Equilibrium when each agent also sees one previous-generation signal.

    Computed with the general engine, treating the mentor's signal as one
    more observed row, then checked against the closed form: weight 1 on
    the own signal and on every signal of generations ``1..t-1``.
    """
    K = _mentor_k(net)
    W, _ = _weights(net, backend, use_links=True, strict=False)
    counts = signal_counts(W)
    for i in range(1, net.n + 1):
        t = (i - 1) // K + 1
        expected = np.zeros(i)
        expected[: (t - 1) * K] = 1
        expected[i - 1] = 1
        got = np.array([float(x) for x in W.row(i)])
        if not np.allclose(got, expected, rtol=0, atol=1e-9):
            raise SignalCountingError(f"agent {i}: mentorship row deviates from closed form")
    return W, counts


def efficiency_estimate(r: SignalCounts, window: int) -> float:
    """Mean of ``r_i / i`` over the last ``window`` agents."""
    if not 1 <= window <= r.n:
        raise ValueError(f"window {window} must be in 1..{r.n}")
    return float(r.ratio()[-window:].mean())
