"""Directed temporal (text) networks.

Networks are immutable once built.  Nodes keep the order they were declared
in; every per-node array in the package (timestamps, rows of an affiliation
matrix, ...) is indexed by that position.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DuplicateNodeId, SelfLoop, UndirectedNetwork, UnknownEndpoint


class NodeKind(str, enum.Enum):
    DOCUMENT = "document"
    WORD = "word"


class Directedness(str, enum.Enum):
    DIRECTED = "directed"
    UNDIRECTED = "undirected"


class Temporality(str, enum.Enum):
    NATURAL = "natural"
    COMPLEX = "complex"


@dataclass(frozen=True)
class NodeRecord:
    id: str
    timestamp: int
    tokens: tuple[str, ...] = ()
    kind: NodeKind = NodeKind.DOCUMENT

    def __post_init__(self):
        object.__setattr__(self, "timestamp", int(self.timestamp))
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.kind is NodeKind.WORD and (self.timestamp != 0 or self.tokens):
            raise ValueError(f"word node {self.id!r} must have timestamp 0 and no tokens")

    @property
    def token_counts(self) -> Counter:
        return Counter(self.tokens)


@dataclass(frozen=True)
class TemporalityReport:
    kind: Temporality
    violations: list[tuple[str, str]] = field(default_factory=list)

    @property
    def is_natural(self) -> bool:
        return self.kind is Temporality.NATURAL


@dataclass(frozen=True)
class TimeOrderedIndex:
    """Node indices sorted by (timestamp, id) plus tie-group boundaries.

    ``order[bounds[g]:bounds[g + 1]]`` is the g-th tie group.
    """

    order: np.ndarray
    bounds: np.ndarray

    @property
    def n_groups(self) -> int:
        return len(self.bounds) - 1

    def groups(self):
        for g in range(self.n_groups):
            yield self.order[self.bounds[g]:self.bounds[g + 1]]

    def __len__(self):
        return len(self.order)


def _csr(n, keys, values):
    """Compressed adjacency: neighbors of i are values[ptr[i]:ptr[i+1]], sorted."""
    perm = np.lexsort((values, keys))
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, keys + 1, 1)
    np.cumsum(ptr, out=ptr)
    return ptr, values[perm]


class TemporalTextNetwork:
    """An immutable directed (or undirected) network of timestamped nodes.

    Use :func:`build_network` rather than calling the constructor directly.
    Edges are stored as index arrays ``src`` / ``dst`` sorted lexicographically;
    undirected edges are stored once with ``id(src) < id(dst)``.
    """

    def __init__(self, nodes: tuple[NodeRecord, ...], src: np.ndarray, dst: np.ndarray,
                 directedness: Directedness):
        self.nodes = nodes
        self.directedness = directedness
        self.src = src
        self.dst = dst
        self._index = {node.id: i for i, node in enumerate(nodes)}
        n = len(nodes)
        self.timestamps = np.array([node.timestamp for node in nodes], dtype=np.int64)
        self._out_ptr, self._out_nbr = _csr(n, src, dst)
        self._in_ptr, self._in_nbr = _csr(n, dst, src)
        for arr in (self.src, self.dst, self.timestamps, self._out_ptr, self._out_nbr,
                    self._in_ptr, self._in_nbr):
            arr.flags.writeable = False

    def __repr__(self):
        return (f"TemporalTextNetwork(n_nodes={self.n_nodes}, n_edges={self.n_edges}, "
                f"{self.directedness.value})")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    @property
    def directed(self) -> bool:
        return self.directedness is Directedness.DIRECTED

    @property
    def ids(self) -> list[str]:
        return [node.id for node in self.nodes]

    def index(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownEndpoint(node_id) from None

    def __contains__(self, node_id) -> bool:
        return node_id in self._index

    def out_neighbors(self, i: int) -> np.ndarray:
        return self._out_nbr[self._out_ptr[i]:self._out_ptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        return self._in_nbr[self._in_ptr[i]:self._in_ptr[i + 1]]

    def neighbors(self, i: int) -> np.ndarray:
        return np.union1d(self.in_neighbors(i), self.out_neighbors(i))

    def out_degree(self) -> np.ndarray:
        return np.diff(self._out_ptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self._in_ptr)

    def degree(self) -> np.ndarray:
        return self.in_degree() + self.out_degree()

    def edges(self) -> list[tuple[str, str]]:
        ids = self.ids
        return [(ids[s], ids[d]) for s, d in zip(self.src.tolist(), self.dst.tolist())]

    def has_edge(self, u: int, v: int) -> bool:
        nbr = self.out_neighbors(u)
        k = np.searchsorted(nbr, v)
        return bool(k < len(nbr) and nbr[k] == v)

    @property
    def kinds(self) -> np.ndarray:
        return np.array([node.kind is NodeKind.WORD for node in self.nodes], dtype=bool)

    @property
    def document_mask(self) -> np.ndarray:
        return ~self.kinds

    @property
    def word_mask(self) -> np.ndarray:
        return self.kinds


def build_network(node_records: Iterable[NodeRecord], edges: Iterable[tuple[str, str]],
                  directedness: Directedness | str = Directedness.DIRECTED) -> TemporalTextNetwork:
    """Validate nodes and edges and assemble a :class:`TemporalTextNetwork`.

    Duplicate edges are collapsed.  For undirected networks each pair is
    canonicalized so that the smaller id is the source.
    """
    directedness = Directedness(directedness)
    nodes = tuple(node_records)
    index: dict[str, int] = {}
    for i, node in enumerate(nodes):
        if node.id in index:
            raise DuplicateNodeId(node.id)
        index[node.id] = i

    pairs = set()
    for a, b in edges:
        if a not in index:
            raise UnknownEndpoint(a)
        if b not in index:
            raise UnknownEndpoint(b)
        if a == b:
            raise SelfLoop(a)
        if directedness is Directedness.UNDIRECTED and b < a:
            a, b = b, a
        pairs.add((index[a], index[b]))

    if pairs:
        arr = np.array(sorted(pairs), dtype=np.int64)
        src, dst = arr[:, 0].copy(), arr[:, 1].copy()
    else:
        src = np.zeros(0, dtype=np.int64)
        dst = np.zeros(0, dtype=np.int64)
    return TemporalTextNetwork(nodes, src, dst, directedness)


def classify_temporality(net: TemporalTextNetwork) -> TemporalityReport:
    """Natural iff every edge satisfies t(src) < t(dst); ties count as violations."""
    if not net.directed:
        raise UndirectedNetwork("temporality is only defined for directed networks")
    ts = net.timestamps
    bad = np.flatnonzero(ts[net.src] >= ts[net.dst])
    if len(bad) == 0:
        return TemporalityReport(Temporality.NATURAL)
    ids = net.ids
    violations = [(ids[net.src[e]], ids[net.dst[e]]) for e in bad.tolist()]
    return TemporalityReport(Temporality.COMPLEX, violations)


def time_ordered_view(net: TemporalTextNetwork) -> TimeOrderedIndex:
    return time_order(net.timestamps, net.ids)


def time_order(timestamps: Sequence[int], ids: Sequence[str]) -> TimeOrderedIndex:
    ts = np.asarray(timestamps, dtype=np.int64)
    if len(ts) == 0:
        empty = np.zeros(0, dtype=np.int64)
        return TimeOrderedIndex(empty, np.zeros(1, dtype=np.int64))
    # ids may be arbitrary strings, so rank them first for lexsort
    id_rank = np.empty(len(ids), dtype=np.int64)
    id_rank[np.argsort(np.asarray(ids, dtype=object), kind="stable")] = np.arange(len(ids))
    order = np.lexsort((id_rank, ts))
    sorted_ts = ts[order]
    starts = np.flatnonzero(np.diff(sorted_ts)) + 1
    bounds = np.concatenate(([0], starts, [len(ts)])).astype(np.int64)
    return TimeOrderedIndex(order, bounds)
