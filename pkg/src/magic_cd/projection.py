"""Word/document projection of a temporal text network.

Every vocabulary term that survives the document-frequency filter becomes a
word node with timestamp 0, linked word -> document to every document that
contains it.  Since documents sit at t >= 1, the projection of a natural
network is again natural.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from .exceptions import NonPositiveDocumentTimestamp
from .graph import NodeKind, NodeRecord, TemporalTextNetwork, build_network

DEFAULT_STOPWORDS = frozenset("""
a an and are as at be by for from has have in is it its of on or that the this to was
were will with we our via using based towards toward into over under not no can
""".split())

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class ProjectionConfig:
    lowercase: bool = True
    stopwords: frozenset = field(default=DEFAULT_STOPWORDS)
    min_df: int = 2
    max_df_ratio: float = 0.5
    word_prefix: str = "w:"

    def __post_init__(self):
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if not 0 < self.max_df_ratio <= 1:
            raise ValueError("max_df_ratio must lie in (0, 1]")
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))

    def normalize(self, token: str) -> str | None:
        if self.lowercase:
            token = token.lower()
        if token in self.stopwords:
            return None
        return token


def tokenize(text: str, cfg: ProjectionConfig = ProjectionConfig()) -> Counter:
    """Split on whitespace and punctuation, fold case, drop stopwords."""
    out = Counter()
    for raw in _TOKEN.findall(text):
        tok = cfg.normalize(raw)
        if tok:
            out[tok] += 1
    return out


def document_terms(node: NodeRecord, cfg: ProjectionConfig) -> set[str]:
    terms = set()
    for raw in node.tokens:
        tok = cfg.normalize(raw)
        if tok:
            terms.add(tok)
    return terms


def project(net: TemporalTextNetwork, cfg: ProjectionConfig = ProjectionConfig()) -> TemporalTextNetwork:
    """Return the projected network: documents, surviving word nodes, and word->document edges.

    Word node ids are ``cfg.word_prefix + term``.  Token multiplicity is
    ignored; each (term, document) incidence yields one edge.
    """
    docs = [node for node in net.nodes if node.kind is NodeKind.DOCUMENT]
    for node in docs:
        if node.timestamp < 1:
            raise NonPositiveDocumentTimestamp(node.id, node.timestamp)

    terms_of = {node.id: document_terms(node, cfg) for node in docs}
    df = Counter()
    for terms in terms_of.values():
        df.update(terms)
    max_df = cfg.max_df_ratio * len(docs)
    vocab = sorted(t for t, c in df.items() if c >= cfg.min_df and c <= max_df)
    keep = set(vocab)

    words = [NodeRecord(cfg.word_prefix + t, 0, (), NodeKind.WORD) for t in vocab]
    word_edges = [(cfg.word_prefix + t, node.id)
                  for node in docs for t in sorted(terms_of[node.id] & keep)]
    return build_network(list(net.nodes) + words, net.edges() + word_edges, net.directedness)


def word_term(node_id: str, cfg: ProjectionConfig = ProjectionConfig()) -> str:
    return node_id[len(cfg.word_prefix):] if node_id.startswith(cfg.word_prefix) else node_id
