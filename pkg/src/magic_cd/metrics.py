"""Evaluation of overlapping covers: coverage, F1, overlapping modularity, omega.

All functions take :class:`CommunityCover` objects keyed by node id.
"""
from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import EmptyCover


@dataclass
class CommunityCover:
    """K node-id sets over a universe of ids.

    ``words`` optionally carries the word-node part of each community when the
    cover was extracted from a projected network; it never enters metrics.
    """

    communities: list[frozenset]
    universe: list[str]
    names: list[str] | None = None
    words: list[frozenset] | None = None

    def __post_init__(self):
        self.communities = [frozenset(c) for c in self.communities]
        self.universe = list(dict.fromkeys(self.universe))
        known = set(self.universe)
        for c in self.communities:
            stray = c - known
            if stray:
                raise ValueError(f"community members outside the universe: {sorted(stray)[:5]}")
        if self.names is None:
            self.names = [f"c{k}" for k in range(len(self.communities))]

    @classmethod
    def from_sets(cls, communities: Iterable[Iterable], universe: Iterable | None = None, names=None):
        comms = [frozenset(c) for c in communities]
        if universe is None:
            universe = sorted(set().union(*comms)) if comms else []
        return cls(comms, list(universe), names)

    @property
    def K(self) -> int:
        return len(self.communities)

    @property
    def N(self) -> int:
        return len(self.universe)

    @property
    def empty_communities(self) -> list[int]:
        return [k for k, c in enumerate(self.communities) if not c]

    def memberships(self) -> dict[str, list[int]]:
        out = {u: [] for u in self.universe}
        for k, c in enumerate(self.communities):
            for u in c:
                out[u].append(k)
        return out

    def restrict(self, universe: Iterable[str]) -> "CommunityCover":
        keep = set(universe)
        return CommunityCover([c & keep for c in self.communities],
                              [u for u in self.universe if u in keep], list(self.names))


@dataclass
class MetricReport:
    coverage: float
    f1: float
    modularity: float
    omega: float
    meta: dict = field(default_factory=dict)

    def rows(self):
        return [("coverage", self.coverage), ("f1", self.f1),
                ("modularity", self.modularity), ("omega", self.omega)]


def coverage_ratio(cover: CommunityCover) -> float:
    if cover.N == 0:
        raise EmptyCover("cover has an empty universe")
    covered = set().union(*cover.communities) if cover.communities else set()
    return len(covered) / cover.N


def _set_f1(a: frozenset, b: frozenset) -> float:
    common = len(a & b)
    if common == 0:
        return 0.0
    return 2.0 * common / (len(a) + len(b))


def _best_match(source: Sequence[frozenset], target: Sequence[frozenset]) -> np.ndarray:
    """For each source community, the best F1 against any target community.

    Candidates come from an inverted index over target members, which is exact
    because disjoint pairs have F1 0.
    """
    holders = defaultdict(list)
    for j, c in enumerate(target):
        for u in c:
            holders[u].append(j)
    best = np.zeros(len(source))
    for i, c in enumerate(source):
        candidates = {j for u in c for j in holders.get(u, ())}
        if candidates:
            best[i] = max(_set_f1(c, target[j]) for j in candidates)
    return best


def f1_score(detected: CommunityCover, truth: CommunityCover) -> float:
    """Average of best-match F1 from detected to truth and from truth to detected."""
    det = [c for c in detected.communities if c]
    tru = [c for c in truth.communities if c]
    if not det or not tru:
        raise EmptyCover("f1_score needs at least one nonempty community on each side")
    return float(0.5 * (_best_match(det, tru).mean() + _best_match(tru, det).mean()))


def _edge_pairs(net):
    return [(u, v) for u, v in net.edges()]


def overlapping_modularity(net, cover: CommunityCover) -> float:
    """Overlapping modularity in the form of Lazar et al. (2010).

    For community c: the mean over members i of (in_c(i) - out_c(i)) / (deg(i) s_i),
    scaled by the edge density e_c / C(|c|, 2).  Edges count as unordered
    incidences; the result is the mean over nonempty communities.
    """
    ids = net.ids
    deg = dict(zip(ids, net.degree().tolist()))
    nbrs = defaultdict(list)
    for u, v in _edge_pairs(net):
        nbrs[u].append(v)
        nbrs[v].append(u)
    counts = defaultdict(int)
    for c in cover.communities:
        for u in c:
            counts[u] += 1

    scores = []
    for c in cover.communities:
        if not c:
            continue
        size = len(c)
        if size < 2:
            scores.append(0.0)
            continue
        member_sum = 0.0
        twice_internal = 0
        for i in c:
            d = deg.get(i, 0)
            if d == 0:
                continue
            inside = sum(1 for j in nbrs[i] if j in c)
            twice_internal += inside
            member_sum += (inside - (d - inside)) / (d * counts[i])
        e_c = twice_internal / 2
        scores.append(member_sum / size * e_c / (size * (size - 1) / 2))
    return float(np.mean(scores)) if scores else 0.0


def _shared_counts(cover: CommunityCover, index: Mapping[str, int]):
    """Upper-triangular sparse matrix of shared-community counts for each node pair."""
    rows, cols = [], []
    for k, c in enumerate(cover.communities):
        for u in c:
            rows.append(index[u])
            cols.append(k)
    M = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(index), max(cover.K, 1)))
    S = sp.triu(M @ M.T, k=1).tocoo()
    S.eliminate_zeros()
    return S


def omega_index(detected: CommunityCover, truth: CommunityCover) -> float:
    """Chance-adjusted agreement on how many communities each node pair shares.

    Both covers are evaluated over the union of their universes.
    """
    universe = list(dict.fromkeys(list(truth.universe) + list(detected.universe)))
    n = len(universe)
    pairs = n * (n - 1) // 2
    if pairs == 0:
        return 1.0
    index = {u: i for i, u in enumerate(universe)}
    A = _shared_counts(detected, index)
    B = _shared_counts(truth, index)

    da = dict(zip(zip(A.row.tolist(), A.col.tolist()), A.data.astype(int).tolist()))
    db = dict(zip(zip(B.row.tolist(), B.col.tolist()), B.data.astype(int).tolist()))
    agree = pairs - len(da.keys() | db.keys())  # pairs sharing nothing in either cover
    agree += sum(1 for key, val in da.items() if db.get(key) == val)

    hist_a = np.bincount(A.data.astype(int), minlength=1).astype(float)
    hist_b = np.bincount(B.data.astype(int), minlength=1).astype(float)
    hist_a[0] = pairs - len(da)
    hist_b[0] = pairs - len(db)
    m = min(len(hist_a), len(hist_b))
    expected = float(hist_a[:m] @ hist_b[:m]) / pairs**2
    observed = agree / pairs
    if expected == 1.0:
        return 1.0 if observed == 1.0 else 0.0
    return (observed - expected) / (1.0 - expected)


def evaluate(net, detected: CommunityCover, truth: CommunityCover) -> MetricReport:
    """All four metrics, with detected restricted to the truth universe (documents)."""
    det = detected.restrict(truth.universe)
    return MetricReport(
        coverage=coverage_ratio(det),
        f1=f1_score(det, truth),
        modularity=overlapping_modularity(net, det),
        omega=omega_index(det, truth),
        meta={"n_detected": det.K, "n_truth": truth.K, "n_nodes": det.N,
              "empty_detected": len(det.empty_communities)},
    )


def composite_score(table: Mapping[str, Mapping[str, float]]) -> dict[str, float]:
    """Scale each metric by its best value across methods and sum per method.

    ``table`` maps method -> metric -> value.  A metric whose best value is not
    positive contributes 0 to every method.
    """
    methods = list(table)
    metrics = sorted({m for row in table.values() for m in row})
    out = {m: 0.0 for m in methods}
    for metric in metrics:
        col = np.array([table[m].get(metric, 0.0) for m in methods], dtype=float)
        top = col.max() if len(col) else 0.0
        if top <= 0:
            warnings.warn(f"metric {metric!r} has no positive value; it contributes 0")
            continue
        for m, v in zip(methods, col):
            out[m] += float(v / top)
    return out
