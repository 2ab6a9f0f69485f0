import numpy as np
import pytest

from magic_cd.exceptions import EmptyOrFullSet
from magic_cd.graph import NodeRecord, build_network
from magic_cd.model.init import (
    conductance, init_affiliations, init_interactions, locally_minimal_seeds,
    neighborhood_conductances,
)
from magic_cd.model.likelihood import Mode

from conftest import random_temporal_network


def test_conductance_half():
    # S = {a, b}: a-b inside, a-c and b-d cut; complement c-d-e-f path carries the rest
    nodes = [NodeRecord(x, i + 1) for i, x in enumerate("abcdef")]
    edges = [("a", "b"), ("a", "c"), ("b", "d"), ("c", "e"), ("d", "f"), ("e", "f")]
    net = build_network(nodes, edges)
    # vol(S) = 2 + 2 = 4, vol(rest) = 12 - 4 = 8
    assert conductance(net, ["a", "b"]) == pytest.approx(2 / 4)


def test_conductance_cut_four_over_ten():
    nodes = [NodeRecord(x, i + 1) for i, x in enumerate("abcdefg")]
    # S={a,b}: vol 4 (a-b, a-c, b-d), cut 2; complement volume 10
    edges = [("a", "b"), ("a", "c"), ("b", "d"), ("c", "e"), ("d", "f"), ("e", "g"), ("f", "g")]
    net = build_network(nodes, edges)
    assert conductance(net, ["a", "b"]) == 0.5


def test_conductance_degenerate_cases():
    net = build_network([NodeRecord("a", 1), NodeRecord("b", 2), NodeRecord("z", 3)],
                        [("a", "b")])
    assert conductance(net, ["z"]) == 1.0
    assert conductance(net, ["a", "b"]) == 0.0
    with pytest.raises(EmptyOrFullSet):
        conductance(net, [])
    with pytest.raises(EmptyOrFullSet):
        conductance(net, ["a", "b", "z"])


def test_neighborhood_conductances_match_direct(rng):
    net = random_temporal_network(25, rng, density=0.15)
    phi = neighborhood_conductances(net)
    for u in range(net.n_nodes):
        S = np.union1d(net.in_neighbors(u), [u])
        if len(S) == net.n_nodes:
            assert phi[u] == 0.0
        else:
            assert phi[u] == pytest.approx(conductance(net, S.tolist()), abs=1e-12)


def test_star_seed():
    nodes = [NodeRecord("a", 5), NodeRecord("b", 1), NodeRecord("c", 2), NodeRecord("d", 3)]
    net = build_network(nodes, [("b", "a"), ("c", "a"), ("d", "a")])
    seeds, _ = locally_minimal_seeds(net)
    assert seeds == [net.index("a")]
    F = init_affiliations(net, 1, seed=0)
    assert F[:, 0].tolist() == [1.0, 1.0, 1.0, 1.0]


def test_random_fill_is_reproducible():
    nodes = [NodeRecord("a", 5), NodeRecord("b", 1), NodeRecord("c", 2), NodeRecord("d", 3)]
    net = build_network(nodes, [("b", "a"), ("c", "a"), ("d", "a")])
    F1 = init_affiliations(net, 3, seed=7)
    F2 = init_affiliations(net, 3, seed=7)
    assert np.array_equal(F1, F2)
    # each random column gets ceil(4/3) = 2 members
    assert F1[:, 1:].sum(axis=0).tolist() == [2.0, 2.0]


def test_init_entries_are_binary(rng):
    net = random_temporal_network(60, rng, density=0.08)
    for mode in (Mode.NET, Mode.RAW):
        F = init_affiliations(net, 4, seed=1, mode=mode)
        assert set(np.unique(F)) <= {0.0, 1.0}
        assert F.any(axis=0).all()


def test_init_interactions():
    assert init_interactions(1).tolist() == [[0.9]]
    assert init_interactions(2).tolist() == [[0.9, 0.1], [0.1, 0.9]]
    for K in range(1, 7):
        eta = init_interactions(K)
        assert np.array_equal(eta, eta.T)
    with pytest.raises(ValueError):
        init_interactions(0)
