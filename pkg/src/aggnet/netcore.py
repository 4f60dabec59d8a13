"""Observation networks.

Agents are numbered 1..n in order of arrival, and every neighbor of agent
``i`` is an earlier agent.  All public indices in this module are 1-based;
``Network.neighbors[i - 1]`` is the neighborhood of agent ``i``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np

__all__ = [
    "GENERATION_KINDS",
    "GenerationsSpec",
    "Network",
    "NetworkError",
    "RandomNetSpec",
    "SymmetryReport",
    "build_generations",
    "build_maximal",
    "build_mentorship",
    "build_network_from_spec",
    "build_silo",
    "build_silo_spec",
    "chain",
    "complete_prefix",
    "draw_generator",
    "expanding_obs_series",
    "load_generations_spec",
    "load_network",
    "longest_paths",
    "maximal_spec",
    "position_graph_strongly_connected",
    "sample_fixed_degree",
    "save_network",
    "validate_symmetry",
]

GENERATION_KINDS = ("general", "maximal", "silo", "mentorship")


class NetworkError(ValueError):
    """Raised for malformed networks or generations specs."""


@dataclass(frozen=True)
class Network:
    n: int
    neighbors: tuple[tuple[int, ...], ...]
    signal_links: tuple[int, ...] = ()
    # set by the generations builders; None for custom/random networks
    spec: GenerationsSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        nb = tuple(tuple(int(j) for j in row) for row in self.neighbors)
        links = tuple(int(j) for j in self.signal_links) or (0,) * self.n
        object.__setattr__(self, "neighbors", nb)
        object.__setattr__(self, "signal_links", links)
        if self.n < 0 or len(nb) != self.n:
            raise NetworkError(f"expected {self.n} neighbor lists, got {len(nb)}")
        if len(links) != self.n:
            raise NetworkError(f"expected {self.n} signal links, got {len(links)}")
        for i, row in enumerate(nb, start=1):
            if len(set(row)) != len(row):
                raise NetworkError(f"agent {i} has duplicate neighbors {row}")
            bad = [j for j in row if not 1 <= j < i]
            if bad:
                raise NetworkError(f"agent {i} observes {bad}, outside 1..{i - 1}")
            if not 0 <= links[i - 1] < i:
                raise NetworkError(f"agent {i} has signal link {links[i - 1]}")

    def degree(self, i: int) -> int:
        return len(self.neighbors[i - 1])

    @property
    def has_signal_links(self) -> bool:
        return any(self.signal_links)

    def adjacency(self) -> np.ndarray:
        """0/1 matrix with ``M[i-1, j-1] = 1`` iff ``j`` is a neighbor of ``i``."""
        m = np.zeros((self.n, self.n), dtype=np.int8)
        for i, row in enumerate(self.neighbors):
            for j in row:
                m[i, j - 1] = 1
        return m

    def prefix(self, m: int) -> Network:
        """The sub-network of the first ``m`` agents."""
        return Network(m, self.neighbors[:m], self.signal_links[:m])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "neighbors": [list(row) for row in self.neighbors],
            "signal_links": list(self.signal_links),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Network:
        try:
            n = int(data["n"])
            neighbors = data["neighbors"]
        except (KeyError, TypeError) as exc:
            raise NetworkError(f"network JSON missing field: {exc}") from None
        return cls(n, neighbors, data.get("signal_links") or ())


@dataclass(frozen=True)
class GenerationsSpec:
    K: int
    psi: tuple[frozenset[int], ...]
    generations: int
    kind: str = "general"
    partition: tuple[frozenset[int], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "psi", tuple(frozenset(int(x) for x in p) for p in self.psi))
        if self.partition is not None:
            object.__setattr__(
                self, "partition", tuple(frozenset(int(x) for x in p) for p in self.partition)
            )
        if self.K < 1:
            raise NetworkError(f"generation size K={self.K} must be >= 1")
        if self.generations < 1:
            raise NetworkError(f"horizon T={self.generations} must be >= 1")
        if self.kind not in GENERATION_KINDS:
            raise NetworkError(f"unknown generations kind {self.kind!r}")
        if len(self.psi) != self.K:
            raise NetworkError(f"need {self.K} observation sets, got {len(self.psi)}")
        for k, p in enumerate(self.psi, start=1):
            if not p:
                raise NetworkError(f"observation set of position {k} is empty")
            bad = sorted(x for x in p if not 1 <= x <= self.K)
            if bad:
                raise NetworkError(f"position {k} observes {bad}, outside 1..{self.K}")

    @property
    def n(self) -> int:
        return self.K * self.generations

    def agent(self, t: int, k: int) -> int:
        """Index of the agent in position ``k`` of generation ``t``."""
        return (t - 1) * self.K + k

    def position(self, i: int) -> tuple[int, int]:
        """``(t, k)`` for agent ``i``."""
        t, k = divmod(i - 1, self.K)
        return t + 1, k + 1

    def with_generations(self, T: int) -> GenerationsSpec:
        return GenerationsSpec(self.K, self.psi, T, self.kind, self.partition)

    def to_dict(self) -> dict:
        out = {
            "K": self.K,
            "psi": [sorted(p) for p in self.psi],
            "generations": self.generations,
            "kind": self.kind,
        }
        if self.partition is not None:
            out["partition"] = [sorted(p) for p in self.partition]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> GenerationsSpec:
        try:
            K = int(data["K"])
            T = int(data["generations"])
        except (KeyError, TypeError, ValueError) as exc:
            raise NetworkError(f"generations JSON missing field: {exc}") from None
        kind = data.get("kind", "general")
        partition = data.get("partition")
        if kind == "maximal" and "psi" not in data:
            psi = [range(1, K + 1)] * K
        elif kind == "silo" and "psi" not in data:
            if partition is None:
                raise NetworkError("silo spec needs a partition")
            return build_silo_spec(K, partition, T)
        else:
            if "psi" not in data:
                raise NetworkError("generations JSON missing field: 'psi'")
            psi = data["psi"]
        return cls(K, tuple(psi), T, kind, None if partition is None else tuple(partition))


@dataclass(frozen=True)
class SymmetryReport:
    is_symmetric: bool
    d: int | None
    c: int | None
    strongly_connected: bool
    # block-design identity K = (d^2 - d + c)/c, None when it does not apply
    design_consistent: bool | None = None


@dataclass(frozen=True)
class RandomNetSpec:
    n: int
    d: int
    seed: int = 0
    # extra SeedSequence spawn key, used to give each ensemble draw its own stream
    stream: tuple[int, ...] = ()


def chain(n: int) -> Network:
    """Line network ``n -> n-1 -> ... -> 1``."""
    return Network(n, [() if i == 1 else (i - 1,) for i in range(1, n + 1)])


def complete_prefix(n: int) -> Network:
    """Every agent observes all predecessors."""
    return Network(n, [tuple(range(1, i)) for i in range(1, n + 1)])


def build_generations(spec: GenerationsSpec) -> Network:
    K = spec.K
    nbrs = [()] * K
    for t in range(2, spec.generations + 1):
        for k in range(1, K + 1):
            nbrs.append(tuple(sorted((t - 2) * K + p for p in spec.psi[k - 1])))
    return Network(spec.n, nbrs, spec=spec)


def maximal_spec(K: int, T: int) -> GenerationsSpec:
    full = frozenset(range(1, K + 1))
    return GenerationsSpec(K, (full,) * K, T, "maximal")


def build_maximal(K: int, T: int) -> Network:
    return build_generations(maximal_spec(K, T))


def build_silo_spec(K: int, partition, T: int) -> GenerationsSpec:
    if K < 2:
        raise NetworkError("silo networks need K >= 2")
    parts = [frozenset(int(x) for x in p) for p in partition]
    if any(not p for p in parts):
        raise NetworkError("silos must be nonempty")
    seen: set[int] = set()
    for p in parts:
        if seen & p:
            raise NetworkError(f"silos overlap on {sorted(seen & p)}")
        seen |= p
    if seen != set(range(2, K + 1)):
        raise NetworkError(f"silos must partition 2..{K}, got {sorted(seen)}")
    psi = [frozenset(range(2, K + 1))]
    for k in range(2, K + 1):
        psi.append(next(p for p in parts if k in p))
    return GenerationsSpec(K, tuple(psi), T, "silo", tuple(parts))


def build_silo(K: int, partition, T: int) -> Network:
    return build_generations(build_silo_spec(K, partition, T))


def build_mentorship(K: int, T: int) -> Network:
    """Maximal generations network where each agent also sees the private
    signal of the same-position agent one generation back."""
    spec = maximal_spec(K, T)
    spec = GenerationsSpec(K, spec.psi, T, "mentorship")
    base = build_generations(spec)
    links = [0] * K + [i - K for i in range(K + 1, spec.n + 1)]
    return Network(base.n, base.neighbors, links, spec=spec)


def draw_generator(seed: int, stream: tuple[int, ...] = ()) -> np.random.Generator:
    """Counter-based Philox generator for ``(seed, stream)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def sample_fixed_degree(spec: RandomNetSpec) -> Network:
    n, d = spec.n, spec.d
    if d < 2:
        raise NetworkError("fixed-degree random networks need d >= 2")
    if n < 1:
        raise NetworkError("need at least one agent")
    rng = draw_generator(spec.seed, spec.stream)
    nbrs = []
    for i in range(1, n + 1):
        if i <= d + 1:
            # i - 1 <= d predecessors: take them all
            nbrs.append(tuple(range(1, i)))
        else:
            pick = rng.choice(i - 1, size=d, replace=False)
            nbrs.append(tuple(sorted(int(j) + 1 for j in pick)))
    return Network(n, nbrs)


def longest_paths(net: Network) -> list[int]:
    pl: list[int] = []
    for row in net.neighbors:
        pl.append(1 + max(pl[j - 1] for j in row) if row else 0)
    return pl


def expanding_obs_series(net: Network) -> list[int]:
    return [max(row) if row else 0 for row in net.neighbors]


def position_graph_strongly_connected(psi) -> bool:
    """Every position reaches every position along ``k1 -> k2`` iff ``k2 in psi[k1]``."""
    K = len(psi)
    for start in range(1, K + 1):
        seen = {start}
        stack = [start]
        while stack:
            k = stack.pop()
            for nxt in psi[k - 1]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if len(seen) != K:
            return False
    return True


def validate_symmetry(spec: GenerationsSpec) -> SymmetryReport:
    degrees = {len(p) for p in spec.psi}
    overlaps = {len(a & b) for a, b in combinations(spec.psi, 2)}
    strong = position_graph_strongly_connected(spec.psi)
    if len(degrees) != 1 or len(overlaps) > 1:
        return SymmetryReport(False, None, None, strong)
    d = degrees.pop()
    # K = 1 has no pairs; treat the lone position as overlapping itself fully
    c = overlaps.pop() if overlaps else d
    consistent = None
    if d >= 2 and c < d:
        consistent = c > 0 and Fraction(d * d - d + c, c) == spec.K
    elif c == 0:
        consistent = d == 1
    return SymmetryReport(True, d, c, strong, consistent)


def load_network(path) -> Network:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise NetworkError(f"{path}: invalid JSON ({exc})") from None
    if "K" in data:
        return build_network_from_spec(GenerationsSpec.from_dict(data))
    return Network.from_dict(data)


def build_network_from_spec(spec: GenerationsSpec) -> Network:
    if spec.kind == "mentorship":
        return build_mentorship(spec.K, spec.generations)
    return build_generations(spec)


def load_generations_spec(path) -> GenerationsSpec:
    try:
        return GenerationsSpec.from_dict(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise NetworkError(f"{path}: invalid JSON ({exc})") from None


def save_network(net: Network, path) -> None:
    Path(path).write_text(json.dumps(net.to_dict()) + "\n")
