"""Edge probabilities, the log-likelihood and its gradients.

A link u -> v is generated with probability ``1 - exp(-F_u^T eta F_v)`` when
``t(u) < t(v)`` and never otherwise.  The log-likelihood sums the log
probability of every observed edge and ``-F_u^T eta F_v`` over every absent
but allowed pair; absent pairs that go backwards or sideways in time
("impossible links") contribute nothing.

Internally the network is compiled into a :class:`PairIndex` whose positions
are sorted by (timestamp, id).  Sums over all allowed pairs are then prefix
sums over tie groups, which keeps every gradient evaluation linear in the
number of edges.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from ..exceptions import ShapeMismatch, StaleCache
from ..graph import TemporalTextNetwork, time_ordered_view

EPS_FLOOR = 1e-10


class Mode(str, enum.Enum):
    """Model variant.

    ``ALL`` fits a projected (word + document) network, ``NET`` the plain
    document network, both under the time constraint.  ``RAW`` ignores time
    and treats the network as undirected.
    """

    ALL = "all"
    NET = "net"
    RAW = "raw"

    @property
    def timed(self) -> bool:
        return self is not Mode.RAW


def delta(t_u, t_v, mode=Mode.NET) -> int:
    if Mode(mode) is Mode.RAW:
        return 1
    return int(t_u < t_v)


def edge_probability(F_u, eta, F_v, delta=1) -> float:
    x = float(np.asarray(F_u) @ np.asarray(eta) @ np.asarray(F_v))
    return float(-np.expm1(-x)) * delta


def _clamped_log1mexp(x, eps):
    return np.log(-np.expm1(-np.maximum(x, eps)))


def _odds(x, eps):
    """exp(-x) / (1 - exp(-x)), the derivative of log(1 - exp(-x))."""
    return 1.0 / np.expm1(np.maximum(x, eps))


@dataclass(frozen=True, eq=False)
class PairIndex:
    """A network compiled for likelihood evaluation.

    ``order[p]`` is the network index of internal position ``p`` and
    ``position`` its inverse.  Positions are grouped into tie groups
    ``bounds[g]:bounds[g+1]``; a pair (p, q) is allowed iff
    ``group[p] < group[q]``.  Edges ``src -> dst`` are the observed allowed
    edges in internal positions.
    """

    mode: Mode
    order: np.ndarray
    position: np.ndarray
    group: np.ndarray
    bounds: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    in_ptr: np.ndarray
    in_nbr: np.ndarray
    out_ptr: np.ndarray
    out_nbr: np.ndarray
    n_dropped: int = 0

    @property
    def n_nodes(self) -> int:
        return len(self.order)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    @property
    def n_groups(self) -> int:
        return len(self.bounds) - 1

    def n_allowed_pairs(self) -> int:
        sizes = np.diff(self.bounds)
        n = int(sizes.sum())
        return (n * n - int((sizes * sizes).sum())) // 2

    def in_neighbors(self, p):
        return self.in_nbr[self.in_ptr[p]:self.in_ptr[p + 1]]

    def out_neighbors(self, p):
        return self.out_nbr[self.out_ptr[p]:self.out_ptr[p + 1]]

    def to_internal(self, F):
        return np.asarray(F, dtype=float)[self.order]

    def to_network(self, Fi):
        return Fi[self.position]


def _adjacency(n, keys, values):
    perm = np.lexsort((values, keys))
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, keys + 1, 1)
    np.cumsum(ptr, out=ptr)
    return ptr, values[perm]


def pair_index(net: TemporalTextNetwork, mode=Mode.NET, warn=True) -> PairIndex:
    """Compile ``net`` for the given mode.

    In timed modes, edges with ``t(src) >= t(dst)`` have probability zero and
    are dropped (with a warning).  In raw mode nodes are ordered by id, every
    node is its own tie group, and each edge becomes the unordered pair
    (earlier position, later position), so each unordered pair is counted once.
    """
    mode = Mode(mode)
    n = net.n_nodes
    if mode.timed:
        view = time_ordered_view(net)
        order, bounds = view.order, view.bounds
    else:
        order = np.argsort(np.asarray(net.ids, dtype=object), kind="stable").astype(np.int64)
        bounds = np.arange(n + 1, dtype=np.int64)
    position = np.empty(n, dtype=np.int64)
    position[order] = np.arange(n)
    group = np.repeat(np.arange(len(bounds) - 1), np.diff(bounds))

    src, dst = position[net.src], position[net.dst]
    n_dropped = 0
    if mode.timed:
        ok = group[src] < group[dst]
        n_dropped = int((~ok).sum())
        if n_dropped and warn:
            warnings.warn(f"{n_dropped} edge(s) violate t(src) < t(dst) and are ignored",
                          stacklevel=2)
        src, dst = src[ok], dst[ok]
    else:
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        src, dst = lo, hi
    if len(src):
        pairs = np.unique(np.stack([src, dst], axis=1), axis=0)
        src, dst = pairs[:, 0].copy(), pairs[:, 1].copy()
    in_ptr, in_nbr = _adjacency(n, dst, src)
    out_ptr, out_nbr = _adjacency(n, src, dst)
    return PairIndex(mode, order, position, group, bounds, src, dst,
                     in_ptr, in_nbr, out_ptr, out_nbr, n_dropped)


def _check_shapes(n, F, eta):
    F = np.asarray(F, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if F.ndim != 2 or F.shape[0] != n:
        raise ShapeMismatch(f"F must be ({n}, K), got {F.shape}")
    if eta.shape != (F.shape[1], F.shape[1]):
        raise ShapeMismatch(f"eta must be ({F.shape[1]}, {F.shape[1]}), got {eta.shape}")
    return F, eta


def group_sums(idx: PairIndex, Fi):
    """Per tie-group row sums of ``Fi`` and, per group, the sum over all later groups."""
    if idx.n_nodes == 0:
        K = Fi.shape[1]
        return np.zeros((0, K)), np.zeros((0, K))
    gs = np.add.reduceat(Fi, idx.bounds[:-1], axis=0)
    later = np.cumsum(gs[::-1], axis=0)[::-1]
    later = np.vstack([later[1:], np.zeros((1, Fi.shape[1]))])
    return gs, later


def edge_affinities(idx: PairIndex, Fi, eta):
    return np.einsum("ek,kl,el->e", Fi[idx.src], eta, Fi[idx.dst])


def _allowed_pair_mass(idx: PairIndex, Fi):
    """sum over allowed ordered pairs (u, v) of F_u F_v^T."""
    gs, later = group_sums(idx, Fi)
    return gs.T @ later


def _log_likelihood_internal(idx: PairIndex, Fi, eta, eps=EPS_FLOOR):
    x = edge_affinities(idx, Fi, eta)
    observed = _clamped_log1mexp(x, eps).sum()
    absent = np.sum(eta * _allowed_pair_mass(idx, Fi)) - x.sum()
    return float(observed - absent)


def log_likelihood(net: TemporalTextNetwork, F, eta, mode=Mode.NET, eps=EPS_FLOOR,
                   index: PairIndex | None = None) -> float:
    """Log-likelihood of ``net`` under affiliations ``F`` (N x K) and interactions ``eta``."""
    F, eta = _check_shapes(net.n_nodes, F, eta)
    idx = index if index is not None else pair_index(net, mode)
    return _log_likelihood_internal(idx, idx.to_internal(F), eta, eps)


def _gradient_eta_internal(idx: PairIndex, Fi, eta, eps=EPS_FLOOR):
    Fs, Fd = Fi[idx.src], Fi[idx.dst]
    x = np.einsum("ek,kl,el->e", Fs, eta, Fd)
    w = _odds(x, eps) + 1.0
    return (Fs * w[:, None]).T @ Fd - _allowed_pair_mass(idx, Fi)


def gradient_eta(net: TemporalTextNetwork, F, eta, mode=Mode.NET, eps=EPS_FLOOR,
                 index: PairIndex | None = None):
    """Gradient of the log-likelihood with respect to ``eta``.

    The absent-pair term is the total over allowed pairs minus the observed
    edges, so the cost is one pass over edges plus one over tie groups.
    """
    F, eta = _check_shapes(net.n_nodes, F, eta)
    idx = index if index is not None else pair_index(net, mode)
    return _gradient_eta_internal(idx, idx.to_internal(F), eta, eps)


class AffinityCache:
    """Time-ordered sums used by the per-node gradient.

    Holds its own internal-order copy of F together with per-group sums.
    ``past(p)`` is the sum of F over strictly earlier tie groups and
    ``future(p)`` the sum over strictly later ones.  :meth:`set_row` keeps
    the group sums current in O(K); the prefix table is rebuilt lazily.
    The fitting loop keeps its own running sums instead, since it visits
    nodes in time order.
    """

    def __init__(self, idx: PairIndex, F, eta, internal=False):
        self.idx = idx
        self.F = np.array(F, dtype=float) if internal else idx.to_internal(F)
        self.eta = np.array(eta, dtype=float)
        self.refresh()

    def refresh(self):
        self.gsum, self._later = group_sums(self.idx, self.F)
        self._dirty = False

    def past(self, p):
        g = self.idx.group[p]
        return self.total - self.gsum[g] - self.future(p)

    def future(self, p):
        if self._dirty:
            self._later = np.vstack([np.cumsum(self.gsum[::-1], axis=0)[::-1][1:],
                                     np.zeros((1, self.F.shape[1]))])
            self._dirty = False
        return self._later[self.idx.group[p]]

    @property
    def total(self):
        return self.gsum.sum(axis=0) if len(self.gsum) else np.zeros(self.F.shape[1])

    def set_row(self, p, row):
        self.gsum[self.idx.group[p]] += row - self.F[p]
        self.F[p] = row
        self._dirty = True

    def set_eta(self, eta):
        self.eta = np.array(eta, dtype=float)

    def check(self, F, eta):
        if F is not None and F is not self.F:
            raise StaleCache("affinity cache was built for a different F")
        if eta is not None and eta is not self.eta and not np.array_equal(eta, self.eta):
            raise StaleCache("affinity cache was built for a different eta")


def node_problem(cache: AffinityCache, p):
    """Coefficients of the single-node objective for internal position ``p``.

    Returns ``(C, lin)`` such that the part of the log-likelihood involving
    F_p is ``sum_j log(1 - exp(-C_j . F_p)) - (lin - C.sum(0)) . F_p``: rows of
    C are eta^T F_v for in-neighbors and eta F_v for out-neighbors, and ``lin``
    is the linear term of all allowed pairs through p.
    """
    idx, F, eta = cache.idx, cache.F, cache.eta
    ins, outs = idx.in_neighbors(p), idx.out_neighbors(p)
    C = np.vstack([F[ins] @ eta, F[outs] @ eta.T])
    lin = cache.past(p) @ eta + eta @ cache.future(p)
    return C, lin


def node_objective(C, lin, f, eps=EPS_FLOOR):
    penalty = lin - C.sum(axis=0)
    return float(_clamped_log1mexp(C @ f, eps).sum() - penalty @ f)


def node_gradient(C, lin, f, eps=EPS_FLOOR):
    w = _odds(C @ f, eps) + 1.0
    return w @ C - lin


def gradient_F_u(net: TemporalTextNetwork, F, eta, u: int, mode=Mode.NET, eps=EPS_FLOOR,
                 cache: AffinityCache | None = None):
    """Gradient of the log-likelihood with respect to row ``u`` of ``F``.

    Pass a prebuilt ``cache`` (with ``F=None`` to use the cache's own copy) to
    get the O(deg(u) K^2) evaluation; otherwise one is built from ``F``.
    """
    if cache is None:
        F, eta = _check_shapes(net.n_nodes, F, eta)
        cache = AffinityCache(pair_index(net, mode), F, eta)
    else:
        cache.check(F, eta)
    p = cache.idx.position[u]
    C, lin = node_problem(cache, p)
    return node_gradient(C, lin, cache.F[p], eps)


def gradient_F(net: TemporalTextNetwork, F, eta, mode=Mode.NET, eps=EPS_FLOOR,
               index: PairIndex | None = None):
    """Full N x K gradient with respect to F, row by row through the cache."""
    F, eta = _check_shapes(net.n_nodes, F, eta)
    idx = index if index is not None else pair_index(net, mode)
    cache = AffinityCache(idx, F, eta)
    G = np.empty_like(cache.F)
    for p in range(idx.n_nodes):
        C, lin = node_problem(cache, p)
        G[p] = node_gradient(C, lin, cache.F[p], eps)
    return idx.to_network(G)


# -- dense O(N^2) reference versions, kept for verification ----------------

def dense_pair_masks(net: TemporalTextNetwork, mode=Mode.NET):
    """Dense (observed, absent-allowed) 0/1 matrices over network indices.

    Built straight from timestamps (or id ranks in raw mode), without tie
    groups, prefix sums or the compiled index.
    """
    mode = Mode(mode)
    n = net.n_nodes
    if mode.timed:
        key = net.timestamps
    else:
        ids = net.ids
        key = np.empty(n, dtype=np.int64)
        key[sorted(range(n), key=lambda i: ids[i])] = np.arange(n)
    allowed = (key[:, None] < key[None, :]).astype(float)
    A = np.zeros((n, n))
    A[net.src, net.dst] = 1.0
    if not mode.timed:
        A = np.maximum(A, A.T)
    observed = A * allowed
    return observed, allowed - observed


def naive_log_likelihood(net, F, eta, mode=Mode.NET, eps=EPS_FLOOR):
    F, eta = _check_shapes(net.n_nodes, F, eta)
    observed, absent = dense_pair_masks(net, mode)
    X = F @ eta @ F.T
    return float(np.sum(observed * _clamped_log1mexp(X, eps)) - np.sum(absent * X))


def _dense_weights(net, F, eta, mode, eps):
    observed, absent = dense_pair_masks(net, mode)
    X = F @ eta @ F.T
    return observed * _odds(X, eps) - absent


def naive_gradient_F(net, F, eta, mode=Mode.NET, eps=EPS_FLOOR):
    F, eta = _check_shapes(net.n_nodes, F, eta)
    W = _dense_weights(net, F, eta, mode, eps)
    return W.T @ (F @ eta) + W @ (F @ eta.T)


def naive_gradient_F_u(net, F, eta, u, mode=Mode.NET, eps=EPS_FLOOR):
    return naive_gradient_F(net, F, eta, mode, eps)[u]


def naive_gradient_eta(net, F, eta, mode=Mode.NET, eps=EPS_FLOOR):
    F, eta = _check_shapes(net.n_nodes, F, eta)
    W = _dense_weights(net, F, eta, mode, eps)
    return F.T @ W @ F
