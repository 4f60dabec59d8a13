import json
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aggnet.netcore import (
    GenerationsSpec,
    Network,
    NetworkError,
    RandomNetSpec,
    build_generations,
    build_maximal,
    build_mentorship,
    build_silo,
    chain,
    expanding_obs_series,
    load_network,
    longest_paths,
    maximal_spec,
    sample_fixed_degree,
    save_network,
    validate_symmetry,
)

RING3 = ({1, 2}, {2, 3}, {1, 3})


def test_generations_ring_neighbors():
    net = build_generations(GenerationsSpec(3, RING3, 2))
    assert net.neighbors[3:] == ((1, 2), (2, 3), (1, 3))
    assert net.neighbors[:3] == ((), (), ())


def test_single_position_is_chain():
    net = build_generations(GenerationsSpec(1, ({1},), 3))
    assert net.neighbors == ((), (1,), (2,))


def test_maximal_small_cases():
    assert build_maximal(3, 2).neighbors[3:] == ((1, 2, 3),) * 3
    assert build_maximal(1, 5).neighbors == chain(5).neighbors
    assert build_maximal(2, 3).neighbors[4:] == ((3, 4), (3, 4))
    assert build_generations(GenerationsSpec(2, ({1, 2}, {1, 2}), 2)).neighbors[2:] == ((1, 2), (1, 2))


def test_silo_two_silos():
    net = build_silo(4, [{2}, {3, 4}], 2)
    assert net.neighbors[4:] == ((2, 3, 4), (2,), (3, 4), (3, 4))
    assert build_silo(2, [{2}], 2).neighbors[2:] == ((2,), (2,))


def test_silo_overlap_rejected():
    with pytest.raises(NetworkError):
        build_silo(3, [{2}, {2, 3}], 2)


def test_mentorship_links():
    net = build_mentorship(2, 2)
    assert net.neighbors[2] == (1, 2)
    assert net.signal_links == (0, 0, 1, 2)
    assert build_mentorship(1, 2).signal_links == (0, 1)
    assert not build_mentorship(3, 1).has_signal_links


def test_network_validation():
    with pytest.raises(NetworkError):
        Network(3, [(), (2,), ()])
    with pytest.raises(NetworkError):
        Network(3, [(), (1,), (1, 1)])
    with pytest.raises(NetworkError):
        Network(2, [(), ()], signal_links=(0, 2))


def test_fixed_degree_forced_small():
    for seed in range(5):
        net = sample_fixed_degree(RandomNetSpec(3, 2, seed))
        assert net.neighbors == ((), (1,), (1, 2))


def test_fixed_degree_degrees_and_reproducible():
    a = sample_fixed_degree(RandomNetSpec(1000, 2, 42))
    b = sample_fixed_degree(RandomNetSpec(1000, 2, 42))
    assert a.neighbors == b.neighbors
    for i in range(3, 1001):
        nb = a.neighbors[i - 1]
        assert len(set(nb)) == 2 and max(nb) < i


def test_fixed_degree_uniform_neighborhood():
    # agent 4 picks 2 of 3 predecessors: each pair has probability 1/3
    counts = Counter(sample_fixed_degree(RandomNetSpec(4, 2, s)).neighbors[3] for s in range(6000))
    assert set(counts) == {(1, 2), (1, 3), (2, 3)}
    freq = np.array(list(counts.values())) / 6000
    se = np.sqrt(1 / 3 * 2 / 3 / 6000)
    assert np.all(np.abs(freq - 1 / 3) < 4 * se)


def test_symmetry_reports():
    rep = validate_symmetry(GenerationsSpec(3, RING3, 2))
    assert (rep.is_symmetric, rep.d, rep.c, rep.strongly_connected) == (True, 2, 1, True)
    assert rep.design_consistent
    rep = validate_symmetry(maximal_spec(4, 2))
    assert (rep.d, rep.c) == (4, 4)
    assert not validate_symmetry(GenerationsSpec(2, ({1}, {1, 2}), 2)).is_symmetric


def test_longest_paths():
    assert longest_paths(chain(3)) == [0, 1, 2]
    assert longest_paths(build_maximal(3, 2)) == [0, 0, 0, 1, 1, 1]
    assert longest_paths(Network(4, [()] * 4)) == [0, 0, 0, 0]


def test_expanding_observations():
    assert expanding_obs_series(chain(4)) == [0, 1, 2, 3]
    assert expanding_obs_series(build_maximal(2, 2)) == [0, 0, 2, 2]
    star = Network(5, [()] + [(1,)] * 4)
    assert expanding_obs_series(star) == [0, 1, 1, 1, 1]


def test_json_roundtrip(tmp_path):
    net = build_mentorship(3, 3)
    path = tmp_path / "net.json"
    save_network(net, path)
    back = load_network(path)
    assert back.neighbors == net.neighbors and back.signal_links == net.signal_links
    spec = GenerationsSpec(3, RING3, 4)
    path.write_text(json.dumps(spec.to_dict()))
    assert load_network(path).neighbors == build_generations(spec).neighbors


@settings(max_examples=40, deadline=None)
@given(K=st.integers(1, 5), T=st.integers(2, 5), data=st.data())
def test_psi_roundtrip(K, T, data):
    psi = tuple(
        frozenset(data.draw(st.sets(st.integers(1, K), min_size=1)))
        for _ in range(K)
    )
    spec = GenerationsSpec(K, psi, T)
    net = build_generations(spec)
    for t in range(2, T + 1):
        for k in range(1, K + 1):
            i = spec.agent(t, k)
            assert frozenset(j - (t - 2) * K for j in net.neighbors[i - 1]) == psi[k - 1]


@settings(max_examples=60, deadline=None)
@given(K=st.integers(2, 6), data=st.data())
def test_block_design_identity(K, data):
    psi = tuple(
        frozenset(data.draw(st.sets(st.integers(1, K), min_size=1)))
        for _ in range(K)
    )
    rep = validate_symmetry(GenerationsSpec(K, psi, 2))
    if rep.is_symmetric and rep.d >= 2 and rep.c < rep.d:
        assert rep.design_consistent == (K * rep.c == rep.d**2 - rep.d + rep.c)
