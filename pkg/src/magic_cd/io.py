"""Tab-separated file formats and the model container.

Nodes:        ``id<TAB>timestamp[<TAB>space-joined tokens[<TAB>word|document]]``
Edges:        ``src<TAB>dst``
Communities:  ``community_id<TAB>space-joined node ids``

Blank lines and lines starting with ``#`` are ignored.  All files are UTF-8.
"""
from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import FormatVersionMismatch, ParseError, UnknownEndpoint
from .graph import Directedness, NodeKind, NodeRecord, TemporalTextNetwork, build_network
from .metrics import CommunityCover
from .model.likelihood import Mode
from .model.optimize import FittedModel

MODEL_HEADER = "MAGIC-MODEL v1"


@dataclass(frozen=True)
class NetworkFileSet:
    nodes: Path
    edges: Path
    communities: Path | None = None


@contextmanager
def atomic_write(path):
    """Write to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _records(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            yield lineno, line.split("\t")


def read_nodes(path) -> list[NodeRecord]:
    nodes = []
    for lineno, cols in _records(path):
        if len(cols) < 2 or len(cols) > 4:
            raise ParseError(lineno, f"expected 2-4 tab-separated columns, got {len(cols)}", path)
        node_id = cols[0].strip()
        if not node_id:
            raise ParseError(lineno, "empty node id", path)
        try:
            ts = int(cols[1])
        except ValueError:
            raise ParseError(lineno, f"timestamp {cols[1]!r} is not an integer", path) from None
        tokens = tuple(cols[2].split()) if len(cols) > 2 else ()
        kind = NodeKind.DOCUMENT
        if len(cols) == 4:
            try:
                kind = NodeKind(cols[3].strip())
            except ValueError:
                raise ParseError(lineno, f"unknown node kind {cols[3]!r}", path) from None
        try:
            nodes.append(NodeRecord(node_id, ts, tokens, kind))
        except ValueError as err:
            raise ParseError(lineno, str(err), path) from None
    return nodes


def read_edges(path) -> list[tuple[str, str]]:
    edges = []
    for lineno, cols in _records(path):
        if len(cols) != 2 or not cols[0] or not cols[1]:
            raise ParseError(lineno, "expected 'src<TAB>dst'", path)
        edges.append((cols[0].strip(), cols[1].strip()))
    return edges


def read_communities(path, universe=None) -> CommunityCover:
    names, comms = [], []
    for lineno, cols in _records(path):
        if len(cols) != 2:
            raise ParseError(lineno, "expected 'community_id<TAB>member ids'", path)
        names.append(cols[0].strip())
        comms.append(frozenset(cols[1].split()))
    if universe is None:
        universe = sorted(set().union(*comms)) if comms else []
    known = set(universe)
    for comm in comms:
        for u in comm:
            if u not in known:
                raise UnknownEndpoint(u)
    return CommunityCover(comms, list(universe), names)


def parse_network(files: NetworkFileSet, directedness=Directedness.DIRECTED):
    """Read and validate a network; returns ``(network, truth cover or None)``.

    The truth cover's universe is the set of document nodes.
    """
    nodes = read_nodes(files.nodes)
    net = build_network(nodes, read_edges(files.edges), directedness)
    truth = None
    if files.communities is not None:
        docs = [node.id for node in net.nodes if node.kind is NodeKind.DOCUMENT]
        truth = read_communities(files.communities, docs)
    return net, truth


def write_network(net: TemporalTextNetwork, nodes_path, edges_path):
    """Write nodes sorted by id and edges sorted by (src id, dst id)."""
    with atomic_write(nodes_path) as fh:
        for node in sorted(net.nodes, key=lambda n: n.id):
            cols = [node.id, str(node.timestamp), " ".join(node.tokens)]
            if node.kind is NodeKind.WORD:
                cols.append(NodeKind.WORD.value)
            fh.write("\t".join(cols) + "\n")
    with atomic_write(edges_path) as fh:
        for a, b in sorted(net.edges()):
            fh.write(f"{a}\t{b}\n")


def write_communities(cover: CommunityCover, path, which="documents"):
    comms = cover.communities if which == "documents" else cover.words
    with atomic_write(path) as fh:
        for name, comm in zip(cover.names, comms):
            fh.write(f"{name}\t{' '.join(sorted(comm))}\n")


def write_table(path, header, rows):
    with atomic_write(path) as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_cell(v) for v in row) + "\n")


def _cell(v):
    if isinstance(v, float):
        return "nan" if np.isnan(v) else format(v, ".10g")
    return str(v)


def _num(x) -> str:
    return format(float(x), ".17g")


def save_model(path, model: FittedModel):
    """Versioned text container; floats are written with 17 significant digits."""
    ids = model.node_ids or [str(i) for i in range(model.N)]
    words = model.word_mask if model.word_mask is not None else np.zeros(model.N, dtype=bool)
    with atomic_write(path) as fh:
        fh.write(MODEL_HEADER + "\n")
        fh.write(f"K\t{model.K}\nN\t{model.N}\nmode\t{Mode(model.mode).value}\n")
        fh.write(f"sweeps\t{model.n_sweeps}\nconverged\t{int(model.converged)}\n")
        fh.write(f"loglik\t{_num(model.log_likelihood)}\n")
        fh.write("trace\t" + " ".join(_num(v) for v in model.trace) + "\n")
        fh.write("eta\n")
        for row in model.eta:
            fh.write(" ".join(_num(v) for v in row) + "\n")
        fh.write("F\n")
        for node_id, is_word, row in zip(ids, words, model.F):
            kind = NodeKind.WORD.value if is_word else NodeKind.DOCUMENT.value
            fh.write(f"{node_id}\t{kind}\t" + " ".join(_num(v) for v in row) + "\n")
        fh.write("end\n")


def load_model(path) -> FittedModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines or lines[0] != MODEL_HEADER:
        raise FormatVersionMismatch(f"{path}: first line must be {MODEL_HEADER!r}")
    pos = 1

    def take(lineno_hint):
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(pos + 1, f"file ends before {lineno_hint}", path)
        pos += 1
        return lines[pos - 1]

    def field(name):
        line = take(name)
        key, _, value = line.partition("\t")
        if key != name:
            raise ParseError(pos, f"expected field {name!r}, got {key!r}", path)
        return value

    def floats(text, expected=None):
        try:
            vals = [float(v) for v in text.split()]
        except ValueError:
            raise ParseError(pos, "malformed number", path) from None
        if expected is not None and len(vals) != expected:
            raise ParseError(pos, f"expected {expected} values, got {len(vals)}", path)
        return vals

    try:
        K = int(field("K"))
        N = int(field("N"))
        mode = Mode(field("mode"))
        sweeps = int(field("sweeps"))
        converged = bool(int(field("converged")))
    except ValueError as err:
        raise ParseError(pos, str(err), path) from None
    loglik = floats(field("loglik"), 1)[0]
    trace = floats(field("trace"))
    if take("eta") != "eta":
        raise ParseError(pos, "expected 'eta' section", path)
    eta = np.array([floats(take("eta rows"), K) for _ in range(K)]).reshape(K, K)
    if take("F") != "F":
        raise ParseError(pos, "expected 'F' section", path)
    F = np.zeros((N, K))
    ids, words = [], np.zeros(N, dtype=bool)
    for i in range(N):
        cols = take("F rows").split("\t")
        if len(cols) != 3:
            raise ParseError(pos, "expected 'id<TAB>kind<TAB>values'", path)
        ids.append(cols[0])
        words[i] = cols[1] == NodeKind.WORD.value
        F[i] = floats(cols[2], K)
    if take("end") != "end":
        raise ParseError(pos, "missing 'end' marker", path)
    return FittedModel(F=F, eta=eta, log_likelihood=loglik, n_sweeps=sweeps, trace=trace,
                       mode=mode, node_ids=ids, word_mask=words if mode is Mode.ALL else None,
                       converged=converged)
