from __future__ import annotations

import numpy as np
import pytest

from cgtlab.corpus import SynthSpec, generate_synthetic
from cgtlab.qdtm import (
    QdtmConfig,
    Query,
    coherence_of_hierarchy,
    node_top_words,
    run_qdtm,
)
from cgtlab.selection import cv_score_wordsets

FAST = dict(iterations=120, background_topics=4, t_max=5, min_subtopic_docs=4,
            expansion_size=15)


@pytest.fixture(scope="module")
def planted():
    return generate_synthetic(SynthSpec(k_true=3, vocab_size=60, n_docs=240,
                                        doc_len_mean=30, alpha_true=0.08,
                                        beta_true=0.05, seed=17))


@pytest.fixture(scope="module")
def planted_query(planted):
    vocab = planted.corpus.vocabulary
    top = np.argsort(-planted.phi[0])[:3]
    return Query("planted-0", frozenset(vocab.terms[i] for i in top))


@pytest.fixture(scope="module")
def hierarchy(planted, planted_query):
    cfg = QdtmConfig(method="kl", seed=5, **FAST)
    return run_qdtm(planted.corpus, [planted_query], cfg)


def _cos(a, b):
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


def test_main_topic_recovers_planted(planted, hierarchy):
    assert len(hierarchy.mains) == 1
    main = hierarchy.mains[0]
    assert _cos(main.term_dist, planted.phi[0]) >= 0.7


def test_subtopics_partition_main_set(hierarchy):
    main = hierarchy.mains[0]
    covered = []
    for child in main.children:
        assert set(child.doc_ids) <= set(main.doc_ids)
        covered.extend(child.doc_ids)
    assert sorted(covered) == sorted(main.doc_ids)  # disjoint and covering
    assert len(covered) == len(set(covered))


def test_distributions_stochastic(hierarchy):
    for node in hierarchy.nodes():
        assert node.term_dist.min() >= 0
        assert node.term_dist.sum() == pytest.approx(1.0, abs=1e-9)
    for row in hierarchy.background:
        assert row.sum() == pytest.approx(1.0, abs=1e-9)


def test_oov_query_reported_not_crashed(planted, planted_query):
    cfg = QdtmConfig(method="frequency", seed=2, **FAST)
    ghost = Query("ghost", frozenset({"nosuchterm"}))
    h = run_qdtm(planted.corpus, [planted_query, ghost], cfg)
    assert [u["label"] for u in h.unmodelable] == ["ghost"]
    assert len(h.mains) == 1


def test_all_queries_unmodelable_is_a_finding(planted):
    cfg = QdtmConfig(method="frequency", seed=2, **FAST)
    h = run_qdtm(planted.corpus, [Query("ghost", frozenset({"zzz"}))], cfg)
    assert h.mains == ()
    assert len(h.unmodelable) == 1


def test_determinism(planted, planted_query):
    cfg = QdtmConfig(method="kl", seed=23, **FAST)
    a = run_qdtm(planted.corpus, [planted_query], cfg)
    b = run_qdtm(planted.corpus, [planted_query], cfg)
    assert a.mains[0].doc_ids == b.mains[0].doc_ids
    assert np.array_equal(a.mains[0].term_dist, b.mains[0].term_dist)
    assert [c.doc_ids for c in a.mains[0].children] == [
        c.doc_ids for c in b.mains[0].children
    ]


def test_raising_threshold_shrinks_main_set(planted, planted_query):
    lo = QdtmConfig(method="kl", seed=5, relevance_threshold=0.2, **FAST)
    hi = QdtmConfig(method="kl", seed=5, relevance_threshold=0.6, **FAST)
    h_lo = run_qdtm(planted.corpus, [planted_query], lo)
    h_hi = run_qdtm(planted.corpus, [planted_query], hi)
    lo_docs = set(h_lo.mains[0].doc_ids) if h_lo.mains else set()
    hi_docs = set(h_hi.mains[0].doc_ids) if h_hi.mains else set()
    assert hi_docs <= lo_docs


def test_coherence_scores_delegate(planted, hierarchy):
    scored = coherence_of_hierarchy(hierarchy, planted.corpus, top_n=8, window=20)
    nodes = scored.nodes()
    assert all(n.c_v is not None for n in nodes)
    word_lists = [node_top_words(n, planted.corpus, 8) for n in nodes]
    direct, _ = cv_score_wordsets(planted.corpus, word_lists, 20)
    assert [n.c_v for n in nodes] == pytest.approx(direct)


def test_planted_node_beats_random_words(planted, hierarchy):
    scored = coherence_of_hierarchy(hierarchy, planted.corpus, top_n=8, window=20)
    main_cv = scored.mains[0].c_v
    rng = np.random.default_rng(3)
    wins = 0
    for trial in range(10):
        random_words = rng.choice(len(planted.corpus.vocabulary), size=8,
                                  replace=False).tolist()
        random_cv, _ = cv_score_wordsets(planted.corpus, [random_words], 20)
        wins += main_cv > random_cv[0]
    assert wins >= 8


def test_hierarchy_recovers_planted_children():
    res = generate_synthetic(SynthSpec(k_true=2, vocab_size=80, n_docs=260,
                                       doc_len_mean=40, alpha_true=0.02,
                                       seed=31, n_children=2, child_beta=0.3))
    planted_children = res.child_phi[0]
    vocab = res.corpus.vocabulary
    top = np.argsort(-res.phi[0])[:3]
    query = Query("parent-0", frozenset(vocab.terms[i] for i in top))
    cfg = QdtmConfig(method="kl", seed=7, iterations=200,
                     background_topics=4, t_max=6, min_subtopic_docs=5,
                     expansion_size=20)
    h = run_qdtm(res.corpus, [query], cfg)
    assert h.mains, "main set should not be empty"
    children = h.mains[0].children
    assert len(children) >= 2
    best = [
        max(_cos(c.term_dist, planted_children[j]) for c in children)
        for j in range(2)
    ]
    assert min(best) >= 0.6


def test_hierarchy_json_roundtrip(planted, hierarchy, tmp_path):
    scored = coherence_of_hierarchy(hierarchy, planted.corpus, top_n=5, window=20)
    obj = scored.to_json(planted.corpus, top_n=5)
    assert obj["mains"][0]["top_terms"]
    assert obj["mains"][0]["judgment"] is None
    scored.save(planted.corpus, tmp_path / "hierarchy.json")
    assert (tmp_path / "hierarchy.json").exists()
