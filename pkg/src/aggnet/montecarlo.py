"""Sample-path simulation of log-linear play and random-network ensembles.

Replications are cut into fixed blocks of ``BLOCK`` draws; block ``b`` always
uses the Philox stream ``(seed, b)``, so results do not depend on how many
workers process the blocks.  Block statistics are merged in block order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .equilibrium import StrategyProfile, equilibrium_weights, signal_counts
from .netcore import Network, RandomNetSpec, draw_generator, sample_fixed_degree

__all__ = [
    "BLOCK",
    "EmpiricalMoments",
    "EnsembleResult",
    "SignalCountEstimate",
    "SimConfig",
    "empirical_signal_count",
    "random_ensemble",
    "simulate_agent_samples",
    "simulate_paths",
    "worker_count",
]

BLOCK = 8192


def worker_count(default: int = 1) -> int:
    """Parallelism cap from ``AGGNET_THREADS``."""
    try:
        return max(1, int(os.environ.get("AGGNET_THREADS", default)))
    except ValueError:
        return default


@dataclass(frozen=True)
class SimConfig:
    sigma2: float = 1.0
    replications: int = 10_000
    seed: int = 0
    state: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.state not in (0, 1):
            raise ValueError("state must be 0 or 1")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")


@dataclass(frozen=True)
class EmpiricalMoments:
    mean: np.ndarray
    var: np.ndarray
    replications: int
    sigma2: float
    state: int = 1

    @property
    def sign(self) -> int:
        return 1 if self.state == 1 else -1

    @property
    def se_mean(self) -> np.ndarray:
        return np.sqrt(self.var / self.replications)

    @property
    def se_var(self) -> np.ndarray:
        # Gaussian sampling error of the unbiased variance
        return self.var * np.sqrt(2.0 / max(self.replications - 1, 1))

    @property
    def r_hat_mean(self) -> np.ndarray:
        return self.sign * self.mean * self.sigma2 / 2

    @property
    def r_hat_var(self) -> np.ndarray:
        return self.var * self.sigma2 / 4

    @property
    def se_r_mean(self) -> np.ndarray:
        return self.sigma2 / 2 * self.se_mean

    @property
    def se_r_var(self) -> np.ndarray:
        return self.sigma2 / 4 * self.se_var


def _propagate(lam: np.ndarray, net: Network, profile: StrategyProfile) -> np.ndarray:
    L = np.empty_like(lam)
    for i in range(net.n):
        col = float(profile.own[i]) * lam[:, i]
        for b, j in zip(profile.neighbor[i], net.neighbors[i]):
            col = col + float(b) * L[:, j - 1]
        L[:, i] = col
    return L


def _block_draws(net, profile, cfg: SimConfig, block: int) -> np.ndarray:
    size = min(BLOCK, cfg.replications - block * BLOCK)
    rng = draw_generator(cfg.seed, (block,))
    mu = 1.0 if cfg.state == 1 else -1.0
    s = rng.normal(mu, np.sqrt(cfg.sigma2), size=(size, net.n))
    return _propagate(2.0 / cfg.sigma2 * s, net, profile)


def _block_stats(args):
    net, profile, cfg, block = args
    L = _block_draws(net, profile, cfg, block)
    m = L.mean(axis=0)
    return len(L), m, ((L - m) ** 2).sum(axis=0)


def _check(net: Network, profile: StrategyProfile):
    if profile.n < net.n:
        raise ValueError(f"profile covers {profile.n} agents, network has {net.n}")


def simulate_paths(net: Network, profile: StrategyProfile, cfg: SimConfig, workers: int | None = None) -> EmpiricalMoments:
    """Per-agent conditional mean and unbiased variance of simulated log-actions."""
    _check(net, profile)
    nblocks = -(-cfg.replications // BLOCK)
    jobs = [(net, profile, cfg, b) for b in range(nblocks)]
    workers = worker_count() if workers is None else workers
    if workers > 1 and nblocks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_block_stats, jobs))
    else:
        parts = [_block_stats(j) for j in jobs]
    # pairwise (Chan et al.) merge in block order
    count, mean, m2 = parts[0]
    for nb, mb, m2b in parts[1:]:
        tot = count + nb
        delta = mb - mean
        mean = mean + delta * nb / tot
        m2 = m2 + m2b + delta**2 * count * nb / tot
        count = tot
    var = m2 / (count - 1) if count > 1 else np.zeros_like(m2)
    return EmpiricalMoments(mean, var, count, cfg.sigma2, cfg.state)


def simulate_agent_samples(net: Network, profile: StrategyProfile, cfg: SimConfig, agent: int) -> np.ndarray:
    """Raw log-action draws of one agent, same streams as :func:`simulate_paths`."""
    _check(net, profile)
    nblocks = -(-cfg.replications // BLOCK)
    return np.concatenate([_block_draws(net, profile, cfg, b)[:, agent - 1] for b in range(nblocks)])


@dataclass(frozen=True)
class SignalCountEstimate:
    r_hat_mean: np.ndarray
    r_hat_var: np.ndarray
    gap: np.ndarray
    z: np.ndarray

    def consistent(self, z_max: float = 4.0) -> np.ndarray:
        return np.abs(self.z) <= z_max


def empirical_signal_count(moments: EmpiricalMoments) -> SignalCountEstimate:
    """Mean- and variance-based signal counts and a z-test of their equality.

    For Gaussian draws the sample mean and variance are independent, so the
    standard error of the difference is the root sum of squares.
    """
    a, b = moments.r_hat_mean, moments.r_hat_var
    se = np.sqrt(moments.se_r_mean**2 + moments.se_r_var**2)
    gap = a - b
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, gap / se, np.where(gap == 0, 0.0, np.inf))
    return SignalCountEstimate(a, b, np.abs(gap), z)


@dataclass(frozen=True)
class EnsembleResult:
    n_grid: tuple[int, ...]
    d: int
    seed: int
    # r[k, g] = r_n for draw k at n = n_grid[g]
    r: np.ndarray

    @property
    def draws(self) -> int:
        return self.r.shape[0]

    @property
    def ratio(self) -> np.ndarray:
        return self.r / np.asarray(self.n_grid)

    def summary(self, values: np.ndarray | None = None) -> np.ndarray:
        """Rows of (q25, median, q75) per grid point."""
        v = self.r if values is None else values
        return np.percentile(v, [25, 50, 75], axis=0).T

    def median_r(self) -> np.ndarray:
        return np.median(self.r, axis=0)

    def median_ratio(self) -> np.ndarray:
        return np.median(self.ratio, axis=0)

    def trend_ok(self) -> bool:
        """Median ``r_n`` strictly increasing and median ``r_n / n`` strictly
        decreasing along the grid."""
        mr, mq = self.median_r(), self.median_ratio()
        return bool(np.all(np.diff(mr) > 0) and np.all(np.diff(mq) < 0))


def _ensemble_draw(args):
    n_grid, d, seed, k = args
    net = sample_fixed_degree(RandomNetSpec(max(n_grid), d, seed, (k,)))
    W, _ = equilibrium_weights(net)
    r = signal_counts(W).r
    return [float(r[n - 1]) for n in n_grid]


def random_ensemble(n_grid, d: int, draws: int, seed: int = 0, workers: int | None = None) -> EnsembleResult:
    """Exact equilibrium ``r_n`` over independent fixed-degree network draws.

    Each draw samples one network on ``max(n_grid)`` agents and reads ``r_n``
    at every grid point; the first ``n`` agents of a fixed-degree network are
    themselves a fixed-degree network on ``n`` agents.
    """
    n_grid = tuple(int(n) for n in n_grid)
    if d < 2 or draws < 1 or not n_grid or min(n_grid) < 1:
        raise ValueError("need d >= 2, draws >= 1 and a nonempty grid of positive sizes")
    jobs = [(n_grid, d, seed, k) for k in range(draws)]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_ensemble_draw, jobs))
    else:
        rows = [_ensemble_draw(j) for j in jobs]
    return EnsembleResult(n_grid, d, seed, np.array(rows))
