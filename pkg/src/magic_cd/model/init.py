"""Starting points for the optimizer: conductance-seeded F and a fixed eta."""
from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from ..exceptions import EmptyOrFullSet
from ..graph import TemporalTextNetwork
from .likelihood import Mode


def conductance(net: TemporalTextNetwork, S) -> float:
    """cut(S) / min(vol(S), vol(V \\ S)), ignoring edge direction.

    A set with zero volume scores 1 (worst); a set whose complement has zero
    volume scores 0.
    """
    members = np.zeros(net.n_nodes, dtype=bool)
    members[[net.index(s) if isinstance(s, str) else int(s) for s in S]] = True
    k = int(members.sum())
    if k == 0 or k == net.n_nodes:
        raise EmptyOrFullSet("conductance needs a nonempty proper subset")
    deg = net.degree()
    vol = int(deg[members].sum())
    vol_rest = 2 * net.n_edges - vol
    cut = int((members[net.src] != members[net.dst]).sum())
    return _ratio(cut, vol, vol_rest)


def _ratio(cut, vol, vol_rest):
    if vol == 0:
        return 1.0
    denom = min(vol, vol_rest)
    if denom == 0:
        return 0.0
    return cut / denom


def neighborhood_conductances(net: TemporalTextNetwork, mode=Mode.NET) -> np.ndarray:
    """Conductance of S_u = inN(u) + {u} for every u (full neighborhood in raw mode)."""
    n = net.n_nodes
    ones = np.ones(net.n_edges)
    A = sp.csr_matrix((ones, (net.src, net.dst)), shape=(n, n))
    if Mode(mode).timed:
        M = A.T.tocsr()
    else:
        M = ((A + A.T) > 0).astype(float).tocsr()
    M = (M + sp.identity(n, format="csr")).tocsr()
    M.data[:] = 1.0
    deg = net.degree().astype(float)
    vol = M @ deg
    internal = np.asarray((M @ A).multiply(M).sum(axis=1)).ravel()
    cut = vol - 2.0 * internal
    vol_rest = 2.0 * net.n_edges - vol
    return np.array([_ratio(c, v, r) for c, v, r in zip(cut, vol, vol_rest)])


def locally_minimal_seeds(net: TemporalTextNetwork, mode=Mode.NET):
    """Nodes whose neighborhood has strictly lower conductance than that of every out-neighbor.

    Returned sorted ascending by conductance (ties by node index).
    """
    phi = neighborhood_conductances(net, mode)
    timed = Mode(mode).timed
    seeds = []
    for u in range(net.n_nodes):
        others = net.out_neighbors(u) if timed else net.neighbors(u)
        if len(others) == 0 or np.all(phi[u] < phi[others]):
            seeds.append(u)
    seeds.sort(key=lambda u: (phi[u], u))
    return seeds, phi


def neighborhood(net: TemporalTextNetwork, u: int, mode=Mode.NET) -> np.ndarray:
    nbrs = net.in_neighbors(u) if Mode(mode).timed else net.neighbors(u)
    return np.union1d(nbrs, [u])


def init_affiliations(net: TemporalTextNetwork, K: int, seed=None, mode=Mode.NET) -> np.ndarray:
    """0/1 affiliation matrix from the K lowest-conductance locally minimal neighborhoods.

    If fewer than K seeds exist, each leftover community gets ceil(N/K) nodes
    drawn uniformly at random.
    """
    n = net.n_nodes
    F = np.zeros((n, K))
    seeds, _ = locally_minimal_seeds(net, mode)
    for k, u in enumerate(seeds[:K]):
        F[neighborhood(net, u, mode), k] = 1.0
    missing = K - min(K, len(seeds))
    if missing and n:
        rng = np.random.default_rng(seed)
        size = min(n, math.ceil(n / K))
        for k in range(K - missing, K):
            F[rng.choice(n, size=size, replace=False), k] = 1.0
    return F


def init_interactions(K: int, within=0.9, between=0.1) -> np.ndarray:
    if K < 1:
        raise ValueError("K must be >= 1")
    eta = np.full((K, K), between)
    np.fill_diagonal(eta, within)
    return eta
