from __future__ import annotations

import numpy as np
import pytest

from cgtlab.corpus import PreprocessConfig, RawPost, build_corpus, load_corpus, save_corpus
from cgtlab.errors import BuildError

BARE = PreprocessConfig(stoplist=frozenset(), min_token_len=1, min_df=1,
                        max_df_ratio=1.0, lemma_exceptions={})


def _post(pid, text):
    return RawPost(id=pid, subreddit="r", author_ref="h", created_utc=0,
                   kind="post", parent_id=None, text=text)


def test_single_post_counts():
    corpus = build_corpus([_post("p1", "hello hello world")], BARE)
    assert corpus.n_docs == 1
    assert len(corpus.vocabulary) == 2
    # ids by descending term_freq: hello(2) then world(1)
    assert corpus.vocabulary.terms == ("hello", "world")
    assert corpus.documents[0].tokens.tolist() == [0, 0, 1]


def test_min_df_prune_can_empty_documents():
    # only "teacher" survives min_df=2, leaving one-token documents that
    # get dropped, which empties the corpus entirely
    cfg = PreprocessConfig(stoplist=frozenset(), min_token_len=1, min_df=2,
                           max_df_ratio=1.0, lemma_exceptions={})
    posts = [_post("a", "teacher apple apple"), _post("b", "teacher mango mango")]
    with pytest.raises(BuildError):
        build_corpus(posts, cfg)


def test_min_df_shared_term_survives():
    cfg = PreprocessConfig(stoplist=frozenset(), min_token_len=1, min_df=2,
                           max_df_ratio=1.0, lemma_exceptions={})
    posts = [_post("a", "teacher teacher apple"), _post("b", "teacher teacher mango")]
    corpus = build_corpus(posts, cfg)
    assert corpus.vocabulary.terms == ("teacher",)
    assert [d.tokens.tolist() for d in corpus.documents] == [[0, 0], [0, 0]]


def test_min_df_above_doc_count_errors():
    cfg = PreprocessConfig(stoplist=frozenset(), min_token_len=1, min_df=5,
                           max_df_ratio=1.0, lemma_exceptions={})
    with pytest.raises(BuildError) as exc:
        build_corpus([_post("a", "x y z"), _post("b", "x y w")], cfg)
    assert "min_df=5" in str(exc.value)


def test_max_df_ratio_drops_ubiquitous_terms():
    cfg = PreprocessConfig(stoplist=frozenset(), min_token_len=1, min_df=1,
                           max_df_ratio=0.5, lemma_exceptions={})
    posts = [
        _post("a", "common alpha beta"),
        _post("b", "common gamma delta"),
        _post("c", "common epsilon zeta"),
        _post("d", "alpha beta gamma"),
    ]
    corpus = build_corpus(posts, cfg)
    assert "common" not in corpus.vocabulary.terms  # df 3/4 > 0.5


def test_deterministic_and_conserved():
    posts = [_post(f"p{i}", f"alpha beta w{i} w{i} gamma") for i in range(6)]
    c1 = build_corpus(posts, BARE)
    c2 = build_corpus(posts, BARE)
    assert c1.digest == c2.digest
    assert c1.vocabulary.terms == c2.vocabulary.terms
    total_tf = int(c1.vocabulary.term_freq.sum())
    assert total_tf == sum(len(d) for d in c1.documents)
    assert (c1.vocabulary.doc_freq >= 1).all()
    assert (c1.vocabulary.doc_freq <= c1.n_docs).all()
    assert (c1.vocabulary.term_freq >= c1.vocabulary.doc_freq).all()


def test_id_order_freq_then_lexicographic():
    corpus = build_corpus([_post("a", "pear pear kiwi apple kiwi")], BARE)
    # pear,kiwi tf=2 (tie -> alphabetical), apple tf=1
    assert corpus.vocabulary.terms == ("kiwi", "pear", "apple")


def test_roundtrip(tmp_path):
    posts = [_post(f"p{i}", f"alpha beta w{i} gamma delta") for i in range(4)]
    corpus = build_corpus(posts, BARE)
    save_corpus(corpus, tmp_path / "corpus")
    loaded = load_corpus(tmp_path / "corpus")
    assert loaded.digest == corpus.digest
    assert loaded.vocabulary.terms == corpus.vocabulary.terms
    assert [d.tokens.tolist() for d in loaded.documents] == [
        d.tokens.tolist() for d in corpus.documents
    ]
    assert loaded.documents[1].source_id == "p1"


def test_flat_layout():
    posts = [_post("a", "x x y"), _post("b", "y z z")]
    corpus = build_corpus(posts, BARE)
    assert corpus.token_words.shape[0] == corpus.n_tokens == 6
    assert corpus.token_docs.tolist() == [0, 0, 0, 1, 1, 1]
    assert corpus.doc_lengths.tolist() == [3, 3]
    with pytest.raises(ValueError):
        corpus.token_words[0] = 5  # frozen
