"""Community-interaction and text-similarity statistics on labeled networks.

Edges are treated as unordered incidences throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import TemporalTextNetwork
from .metrics import CommunityCover


@dataclass
class InteractionScores:
    """Internal/external connectivity per community.

    ``IR[k]`` is NaN for a community that no edge touched; such communities are
    also listed in ``undefined``.
    """

    names: list[str]
    IC: np.ndarray
    EC: np.ndarray
    skipped_edges: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def IR(self) -> np.ndarray:
        mass = self.IC + self.EC
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(mass > 0, self.EC / np.where(mass > 0, mass, 1.0), np.nan)

    @property
    def undefined(self) -> list[str]:
        return [n for n, m in zip(self.names, self.IC + self.EC) if m == 0]


def _membership_sets(net: TemporalTextNetwork, truth: CommunityCover):
    sets = [set() for _ in range(net.n_nodes)]
    for k, comm in enumerate(truth.communities):
        for u in comm:
            if u in net:
                sets[net.index(u)].add(k)
    return sets


def interaction_edge_ratio(net: TemporalTextNetwork, truth: CommunityCover) -> float:
    """Fraction of edges whose endpoints share no community."""
    if net.n_edges == 0:
        return 0.0
    C = _membership_sets(net, truth)
    hits = sum(1 for u, v in zip(net.src.tolist(), net.dst.tolist()) if not (C[u] & C[v]))
    return hits / net.n_edges


def ic_ec_scores(net: TemporalTextNetwork, truth: CommunityCover) -> InteractionScores:
    """Split each edge's unit mass into internal or external connectivity.

    An edge whose endpoints share communities gives 1/|shared| to each shared
    community.  Otherwise each endpoint's communities split half the mass
    evenly.  Edges with no labeled endpoint are skipped and counted.
    """
    K = truth.K
    IC = np.zeros(K)
    EC = np.zeros(K)
    C = _membership_sets(net, truth)
    skipped = 0
    for u, v in zip(net.src.tolist(), net.dst.tolist()):
        cu, cv = C[u], C[v]
        common = cu & cv
        if common:
            for c in common:
                IC[c] += 1.0 / len(common)
        elif cu or cv:
            for c in cu:
                EC[c] += 1.0 / (2 * len(cu))
            for c in cv:
                EC[c] += 1.0 / (2 * len(cv))
        else:
            skipped += 1
    return InteractionScores(list(truth.names), IC, EC, skipped)


def jaccard_similarity(a, b) -> float:
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def _mean_pairwise_jaccard(token_sets, members, max_pairs, rng):
    m = len(members)
    n_pairs = m * (m - 1) // 2
    if n_pairs == 0:
        return float("nan")
    if n_pairs <= max_pairs:
        total = 0.0
        for i in range(m):
            a = token_sets[members[i]]
            for j in range(i + 1, m):
                total += jaccard_similarity(a, token_sets[members[j]])
        return total / n_pairs
    # sample pairs uniformly (with replacement) by drawing distinct endpoints
    i = rng.integers(0, m, size=max_pairs)
    j = rng.integers(0, m - 1, size=max_pairs)
    j = j + (j >= i)
    return float(np.mean([jaccard_similarity(token_sets[members[a]], token_sets[members[b]])
                          for a, b in zip(i.tolist(), j.tolist())]))


@dataclass
class JaccardRow:
    community: str
    size: int
    mean: float
    baseline: float
    sampled: bool


def community_jaccard_study(net: TemporalTextNetwork, truth: CommunityCover, max_pairs: int = 100_000,
                            seed=0) -> list[JaccardRow]:
    """Mean pairwise token-set Jaccard inside each community vs. a random node set of equal size.

    Random sets are drawn from the documents of ``net``.
    """
    rng = np.random.default_rng(seed)
    docs = np.flatnonzero(net.document_mask)
    token_sets = [frozenset(node.tokens) for node in net.nodes]
    rows = []
    for name, comm in zip(truth.names, truth.communities):
        members = sorted(net.index(u) for u in comm if u in net)
        size = len(members)
        mean = _mean_pairwise_jaccard(token_sets, members, max_pairs, rng)
        random_set = rng.choice(docs, size=min(size, len(docs)), replace=False).tolist()
        baseline = _mean_pairwise_jaccard(token_sets, random_set, max_pairs, rng)
        rows.append(JaccardRow(name, size, mean, baseline, math.comb(size, 2) > max_pairs))
    return rows
