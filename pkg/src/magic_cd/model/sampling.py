"""Forward sampling from the generative model, plus planted test networks."""
from __future__ import annotations

import numpy as np

from ..graph import Directedness, NodeRecord, TemporalTextNetwork, build_network
from ..metrics import CommunityCover
from .likelihood import Mode

_CHUNK = 2_000_000  # pair entries materialized at once


def sample_edges(F, eta, timestamps, mode=Mode.NET, seed=None, ids=None):
    """Independent Bernoulli draw for every allowed pair; returns (src, dst) index arrays.

    Timed modes visit ordered pairs with t(u) < t(v).  Raw mode visits each
    unordered pair once, in id order.
    """
    F = np.asarray(F, dtype=float)
    eta = np.asarray(eta, dtype=float)
    ts = np.asarray(timestamps)
    n = F.shape[0]
    rng = np.random.default_rng(seed)
    timed = Mode(mode).timed
    if not timed:
        order = (np.argsort(np.asarray(ids, dtype=object), kind="stable")
                 if ids is not None else np.arange(n))
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(n)
        key = rank
    else:
        key = ts
    FE = F @ eta
    rows = max(1, _CHUNK // max(n, 1))
    srcs, dsts = [], []
    for start in range(0, n, rows):
        block = slice(start, min(n, start + rows))
        prob = -np.expm1(-(FE[block] @ F.T))
        prob *= key[block, None] < key[None, :]
        hit = rng.random(prob.shape) < prob
        r, c = np.nonzero(hit)
        srcs.append(r + start)
        dsts.append(c)
    src = np.concatenate(srcs) if srcs else np.zeros(0, dtype=np.int64)
    dst = np.concatenate(dsts) if dsts else np.zeros(0, dtype=np.int64)
    return src, dst


def sample_network(F, eta, timestamps, mode=Mode.NET, seed=None, ids=None,
                   tokens=None) -> TemporalTextNetwork:
    """Draw a network from the model; reproducible for a fixed seed."""
    n = np.asarray(F).shape[0]
    ids = list(ids) if ids is not None else [f"n{i}" for i in range(n)]
    src, dst = sample_edges(F, eta, timestamps, mode, seed, ids)
    nodes = [NodeRecord(ids[i], int(timestamps[i]), tokens[i] if tokens else ())
             for i in range(n)]
    directedness = Directedness.UNDIRECTED if Mode(mode) is Mode.RAW else Directedness.DIRECTED
    return build_network(nodes, [(ids[s], ids[d]) for s, d in zip(src.tolist(), dst.tolist())],
                         directedness)


def planted_blocks(n_nodes: int, K: int, strength: float = 1.0):
    """Disjoint equal-size blocks: F_uk = strength for u in block k."""
    labels = np.arange(n_nodes) * K // n_nodes
    F = np.zeros((n_nodes, K))
    F[np.arange(n_nodes), labels] = strength
    return F, labels


def planted_network(n_nodes=300, K=3, p_in=0.15, p_out=0.01, mode=Mode.NET, seed=0,
                    vocab_size=0, doc_length=8, shared_vocab=0):
    """A network drawn from known block affiliations with diagonal-dominant eta.

    Node u in block k has F_uk = 1, and eta is chosen so that within-block
    allowed pairs link with probability ``p_in`` and across-block pairs with
    ``p_out``.  Timestamps are a random permutation of 1..N.  With
    ``vocab_size > 0`` each document also carries ``doc_length`` tokens drawn
    from its block's private vocabulary (plus ``shared_vocab`` common words).

    Returns ``(network, truth cover, F, eta)``.
    """
    rng = np.random.default_rng(seed)
    F, labels = planted_blocks(n_nodes, K)
    eta = np.full((K, K), -np.log1p(-p_out))
    np.fill_diagonal(eta, -np.log1p(-p_in))
    timestamps = rng.permutation(n_nodes) + 1
    ids = [f"n{i:05d}" for i in range(n_nodes)]
    tokens = None
    if vocab_size:
        tokens = []
        for u in range(n_nodes):
            words = [f"b{labels[u]}w{j}" for j in rng.integers(0, vocab_size, doc_length)]
            if shared_vocab:
                words += [f"common{j}" for j in rng.integers(0, shared_vocab, doc_length // 2)]
            tokens.append(tuple(words))
    net = sample_network(F, eta, timestamps, mode, seed=rng.integers(2**63), ids=ids,
                         tokens=tokens)
    truth = CommunityCover([frozenset(ids[u] for u in np.flatnonzero(labels == k))
                            for k in range(K)], ids)
    return net, truth, F, eta
