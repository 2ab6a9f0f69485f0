"""Choosing the number of communities by held-out link prediction."""
from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from ..exceptions import TooFewEdges
from ..graph import TemporalTextNetwork, build_network
from .likelihood import Mode, pair_index
from .optimize import FitConfig, fit


def auc(positive_scores, negative_scores) -> float:
    """Probability that a random positive outranks a random negative (ties count half)."""
    pos = np.asarray(positive_scores, dtype=float)
    neg = np.asarray(negative_scores, dtype=float)
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("AUC needs at least one positive and one negative score")
    ranks = rankdata(np.concatenate([pos, neg]))
    return float((ranks[:len(pos)].sum() - len(pos) * (len(pos) + 1) / 2) / (len(pos) * len(neg)))


def auc_standard_error(a: float, n_pos: int, n_neg: int) -> float:
    """Hanley-McNeil standard error of an AUC estimate."""
    q1 = a / (2.0 - a)
    q2 = 2.0 * a * a / (1.0 + a)
    var = (a * (1 - a) + (n_pos - 1) * (q1 - a * a) + (n_neg - 1) * (q2 - a * a)) / (n_pos * n_neg)
    return float(np.sqrt(max(var, 0.0)))


def sample_allowed_nonedges(net: TemporalTextNetwork, count: int, rng, mode=Mode.NET):
    """Uniform sample of absent allowed pairs (u, v), returned as network index arrays."""
    idx = pair_index(net, mode, warn=False)
    n = idx.n_nodes
    if idx.n_allowed_pairs() - idx.n_edges < count:
        raise TooFewEdges("not enough absent allowed pairs to sample")
    present = set(zip(idx.src.tolist(), idx.dst.tolist()))
    chosen = set()
    while len(chosen) < count:
        a = rng.integers(0, n, size=2 * (count - len(chosen)) + 16)
        b = rng.integers(0, n, size=len(a))
        for p, q in zip(a.tolist(), b.tolist()):
            if idx.group[p] >= idx.group[q] or (p, q) in present or (p, q) in chosen:
                continue
            chosen.add((p, q))
            if len(chosen) == count:
                break
    pairs = np.array(sorted(chosen), dtype=np.int64)
    return idx.order[pairs[:, 0]], idx.order[pairs[:, 1]]


def split_edges(net: TemporalTextNetwork, holdout: float, rng, mode=Mode.NET):
    """Hold out a uniform fraction of the usable edges; returns (training network, held-out pairs)."""
    idx = pair_index(net, mode, warn=False)
    m = idx.n_edges
    n_out = int(round(holdout * m))
    if n_out < 1 or n_out >= m:
        raise TooFewEdges(f"holding out {holdout:.0%} of {m} edges leaves no usable split")
    pick = rng.permutation(m)
    held, kept = pick[:n_out], pick[n_out:]
    ids = net.ids
    order = idx.order
    train_edges = [(ids[order[s]], ids[order[d]]) for s, d in zip(idx.src[kept], idx.dst[kept])]
    train = build_network(net.nodes, train_edges, net.directedness)
    return train, (order[idx.src[held]], order[idx.dst[held]])


def holdout_score(net: TemporalTextNetwork, K: int, holdout=0.2, seed=0, cfg: FitConfig | None = None,
                  mode=None) -> tuple[float, float]:
    """AUC (and its standard error) of held-out edges against as many absent allowed pairs.

    The split and the negative sample depend only on ``seed``, so scores for
    different K are computed on the same held-out data.
    """
    cfg = (cfg or FitConfig(K=K)).with_(K=K, seed=seed)
    if mode is not None:
        cfg = cfg.with_(mode=mode)
    rng = np.random.default_rng(seed)
    train, (hs, hd) = split_edges(net, holdout, rng, cfg.mode)
    ns, nd = sample_allowed_nonedges(net, len(hs), rng, cfg.mode)
    model = fit(train, cfg)
    F, eta = model.F, model.eta
    # 1 - exp(-x) is monotone in x, so ranking affinities ranks probabilities
    pos = np.einsum("ek,kl,el->e", F[hs], eta, F[hd])
    neg = np.einsum("ek,kl,el->e", F[ns], eta, F[nd])
    a = auc(pos, neg)
    return a, auc_standard_error(a, len(pos), len(neg))


def choose_K(net: TemporalTextNetwork, candidates, holdout=0.2, seed=0, cfg: FitConfig | None = None,
             mode=None, tie_tolerance="se", return_scores=False):
    """Pick K by held-out link prediction AUC.

    Scores within ``tie_tolerance`` of the best count as ties and go to the
    smallest such K.  The default ``"se"`` uses one standard error of the best
    AUC (the one-standard-error rule); pass 0 to take the strict maximum.
    """
    candidates = sorted(set(int(k) for k in candidates))
    if not candidates:
        raise ValueError("no candidate K given")
    if len(candidates) == 1:
        K = candidates[0]
        return (K, {K: float("nan")}) if return_scores else K
    results = {K: holdout_score(net, K, holdout, seed, cfg, mode) for K in candidates}
    scores = {K: a for K, (a, _) in results.items()}
    top = max(candidates, key=lambda k: (scores[k], -k))
    slack = results[top][1] if tie_tolerance == "se" else float(tie_tolerance)
    best = min(k for k in candidates if scores[k] >= scores[top] - slack)
    return (best, scores) if return_scores else best
