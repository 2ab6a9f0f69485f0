"""Hard community membership from fitted affiliations."""
from __future__ import annotations

import numpy as np

from ..exceptions import ShapeMismatch, ZeroDiagonal
from ..metrics import CommunityCover

DIAGONAL_FLOOR = 1e-6


def community_thresholds(eta, n_nodes: int, floor: float | None = DIAGONAL_FLOOR) -> np.ndarray:
    """Per-community cutoffs sqrt(-log(1 - 1/N) / eta_kk).

    A node at the cutoff in community k links to another such node through k
    with probability exactly 1/N.  Diagonal entries are floored at ``floor``;
    pass ``floor=None`` to raise :class:`ZeroDiagonal` instead.
    """
    if n_nodes < 2:
        raise ValueError("thresholds need at least two nodes")
    diag = np.diag(np.asarray(eta, dtype=float)).copy()
    if floor is None:
        bad = np.flatnonzero(diag <= 0)
        if len(bad):
            raise ZeroDiagonal(int(bad[0]))
    else:
        diag = np.maximum(diag, floor)
    return np.sqrt(-np.log1p(-1.0 / n_nodes) / diag)


def extract_cover(F, thresholds, node_ids=None, word_mask=None) -> CommunityCover:
    """Community k = {u : F_uk >= threshold_k}.

    With ``word_mask`` set, word nodes are split off into ``cover.words`` and the
    cover's universe holds documents only.
    """
    F = np.asarray(F, dtype=float)
    thresholds = np.asarray(thresholds, dtype=float)
    if F.ndim != 2 or F.shape[1] != len(thresholds):
        raise ShapeMismatch("F columns and thresholds disagree")
    n = F.shape[0]
    ids = list(node_ids) if node_ids is not None else [str(i) for i in range(n)]
    is_word = np.zeros(n, dtype=bool) if word_mask is None else np.asarray(word_mask, dtype=bool)
    member = F >= thresholds[None, :]
    docs, words = [], []
    for k in range(F.shape[1]):
        rows = np.flatnonzero(member[:, k])
        docs.append(frozenset(ids[i] for i in rows if not is_word[i]))
        words.append(frozenset(ids[i] for i in rows if is_word[i]))
    universe = [ids[i] for i in range(n) if not is_word[i]]
    return CommunityCover(docs, universe, words=words if word_mask is not None else None)
