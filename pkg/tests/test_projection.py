from collections import Counter

import pytest

from magic_cd.exceptions import NonPositiveDocumentTimestamp
from magic_cd.graph import NodeRecord, build_network, classify_temporality
from magic_cd.projection import ProjectionConfig, project, tokenize

NO_FILTER = ProjectionConfig(stopwords=frozenset(), min_df=1, max_df_ratio=1.0)


def test_tokenize_examples():
    cfg = ProjectionConfig()
    assert tokenize("Information Retrieval retrieval", cfg) == Counter(information=1, retrieval=2)
    assert tokenize("the of", cfg) == Counter()
    assert tokenize("", cfg) == Counter()


def test_tokenize_splits_punctuation():
    assert tokenize("graph-based, (temporal) networks!", NO_FILTER) == Counter(
        graph=1, based=1, temporal=1, networks=1)


def docs():
    nodes = [NodeRecord("d1", 1, ("a", "b")), NodeRecord("d2", 2, ("b",))]
    return build_network(nodes, [("d1", "d2")])


def word_edges(pnet):
    word = pnet.word_mask
    return {(pnet.ids[s], pnet.ids[d]) for s, d in zip(pnet.src, pnet.dst) if word[s]}


def test_project_no_filter():
    pnet = project(docs(), NO_FILTER)
    words = {pnet.ids[i] for i in range(pnet.n_nodes) if pnet.word_mask[i]}
    assert words == {"w:a", "w:b"}
    assert word_edges(pnet) == {("w:a", "d1"), ("w:b", "d1"), ("w:b", "d2")}


def test_project_min_df():
    cfg = ProjectionConfig(stopwords=frozenset(), min_df=2, max_df_ratio=1.0)
    pnet = project(docs(), cfg)
    assert word_edges(pnet) == {("w:b", "d1"), ("w:b", "d2")}


def test_project_rejects_zero_timestamp():
    net = build_network([NodeRecord("d", 0, ("a",))], [])
    with pytest.raises(NonPositiveDocumentTimestamp):
        project(net, NO_FILTER)


def test_projection_preserves_documents_and_naturalness():
    nodes = [NodeRecord(f"d{i}", i + 1, ("x", "y", "y", f"t{i % 3}")) for i in range(9)]
    net = build_network(nodes, [("d0", "d3"), ("d1", "d5"), ("d2", "d8")])
    pnet = project(net, NO_FILTER)
    docs_only = [n for n in pnet.nodes if not n.kind.value == "word"]
    assert docs_only == list(net.nodes)
    doc_edges = {e for e in pnet.edges() if not e[0].startswith("w:")}
    assert doc_edges == set(net.edges())
    assert classify_temporality(pnet).is_natural
    # one edge per distinct (term, document) incidence; "y" appears twice per doc
    assert pnet.n_edges - net.n_edges == 9 * 3
