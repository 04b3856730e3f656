"""Metric tests against the independent brute-force oracles in oracles.py."""

from __future__ import annotations

import math

import numpy as np
import pytest

from cgtlab.errors import ConfigError, MetricError
from cgtlab.selection import (
    arun_metric,
    cao_metric,
    cv_score_wordsets,
    umass_score_wordsets,
)

from oracles import brute_arun, brute_cao, brute_cv, brute_umass, make_corpus


# ----------------------------------------------------------- spec values


def test_cao_identical_rows():
    phi = np.tile([0.2, 0.3, 0.5], (3, 1))
    assert cao_metric(phi) == pytest.approx(1.0, abs=1e-12)


def test_cao_orthogonal_rows():
    assert cao_metric(np.eye(4)) == 0.0


def test_cao_closed_form():
    phi = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
    assert cao_metric(phi) == 0.5  # exact


def test_cao_requires_two_topics():
    with pytest.raises(MetricError):
        cao_metric(np.array([[1.0, 0.0]]))


def test_arun_identical_spectra_zero():
    phi = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    theta = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert arun_metric(phi, theta, np.array([10, 10])) == pytest.approx(0.0, abs=1e-9)


def test_arun_closed_form():
    # orthonormal rows -> spectrum (.5,.5); weighted mass (.75,.25)
    phi = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    theta = np.array([[1.0, 0.0], [0.0, 1.0]])
    value = arun_metric(phi, theta, np.array([10, 30]))
    assert value == pytest.approx(0.2746530721663608, abs=1e-9)


def test_arun_permutation_invariant():
    rng = np.random.default_rng(4)
    phi = rng.dirichlet(np.ones(6), size=3)
    theta = rng.dirichlet(np.ones(3), size=5)
    lengths = rng.integers(5, 20, size=5)
    perm = [2, 0, 1]
    assert arun_metric(phi[perm], theta[:, perm], lengths) == pytest.approx(
        arun_metric(phi, theta, lengths), abs=1e-12
    )


def test_arun_k_above_v_rejected():
    with pytest.raises(ConfigError):
        arun_metric(np.full((4, 3), 0.25), np.full((2, 4), 0.25), np.array([5, 5]))


def test_umass_both_words_everywhere():
    corpus = make_corpus([[0, 1], [1, 0], [0, 1, 1], [1, 0, 0]], 2)
    scores, mean = umass_score_wordsets(corpus, [[0, 1]])
    assert scores[0] == pytest.approx(math.log(5 / 4), abs=1e-12)


def test_umass_never_cooccurring():
    docs = [[0] for _ in range(10)] + [[1], [1]]
    # make documents length>=1; word 1 never next to word 0
    corpus = make_corpus(docs, 2)
    scores, _ = umass_score_wordsets(corpus, [[0, 1]])
    # v_1 = word 0 (first in list): Ddf = 10, no co-occurrence
    assert scores[0] == pytest.approx(math.log(1 / 10), abs=1e-12)


def test_umass_doc_order_invariant():
    rng = np.random.default_rng(8)
    docs = [rng.integers(0, 6, size=rng.integers(2, 8)).tolist() for _ in range(6)]
    lists = [[0, 1, 2], [3, 4, 5]]
    a = umass_score_wordsets(make_corpus(docs, 6), lists)
    b = umass_score_wordsets(make_corpus(docs[::-1], 6), lists)
    assert a[0] == pytest.approx(b[0], abs=1e-12)


def test_cv_perfect_association():
    # words 0 and 1 co-occur in every window that contains either
    corpus = make_corpus([[0, 1], [0, 1], [2, 3, 4]], 5)
    scores, _ = cv_score_wordsets(corpus, [[0, 1]], window=2)
    assert scores[0] == pytest.approx(1.0, abs=1e-12)


def test_cv_toy_matches_brute_force():
    docs = [[0, 1, 2, 0], [2, 1], [1, 0, 2]]
    corpus = make_corpus(docs, 3)
    got, got_mean = cv_score_wordsets(corpus, [[0, 1, 2]], window=2)
    want, want_mean = brute_cv(docs, [[0, 1, 2]], 2)
    assert got[0] == pytest.approx(want[0], abs=1e-9)
    assert got_mean == pytest.approx(want_mean, abs=1e-9)


def test_cv_wordlist_permutation_invariant():
    docs = [[0, 1, 2, 3, 4, 0, 2], [3, 1, 4, 2], [0, 4, 4, 1]]
    corpus = make_corpus(docs, 5)
    a, _ = cv_score_wordsets(corpus, [[0, 1, 2, 3]], window=3)
    b, _ = cv_score_wordsets(corpus, [[3, 1, 0, 2]], window=3)
    assert a[0] == pytest.approx(b[0], abs=1e-12)


def test_cv_absent_word_no_error():
    # word 4 never occurs: its NPMI row is all -1 except the diagonal
    corpus = make_corpus([[0, 1], [1, 0]], 5)
    scores, _ = cv_score_wordsets(corpus, [[0, 1, 4]], window=2)
    assert -1.0 <= scores[0] <= 1.0


# -------------------------------------------------- randomized equivalence


def test_randomized_oracle_equivalence():
    rng = np.random.default_rng(20240817)
    for case in range(200):
        K = int(rng.integers(2, 5))
        V = int(rng.integers(K, 13))
        D = int(rng.integers(2, 9))
        phi = rng.dirichlet(np.ones(V) * rng.uniform(0.2, 2.0), size=K)
        theta = rng.dirichlet(np.ones(K) * rng.uniform(0.2, 2.0), size=D)
        lengths = rng.integers(2, 12, size=D)
        docs = [rng.integers(0, V, size=n).tolist() for n in lengths]
        corpus = make_corpus(docs, V)
        # word lists drawn from terms that occur at least once
        present = sorted({t for d in docs for t in d})
        n_words = min(len(present), int(rng.integers(2, 5)))
        words = rng.choice(present, size=n_words, replace=False).tolist()
        window = int(rng.integers(1, 6))

        assert cao_metric(phi) == pytest.approx(brute_cao(phi.tolist()), abs=1e-9)
        assert arun_metric(phi, theta, lengths) == pytest.approx(
            brute_arun(phi.tolist(), theta.tolist(), lengths.tolist()), abs=1e-9
        )
        got_u, got_um = umass_score_wordsets(corpus, [words])
        want_u, want_um = brute_umass(docs, [words])
        assert got_u[0] == pytest.approx(want_u[0], abs=1e-9)
        got_c, _ = cv_score_wordsets(corpus, [words], window)
        want_c, _ = brute_cv(docs, [words], window)
        assert got_c[0] == pytest.approx(want_c[0], abs=1e-6)
