from __future__ import annotations

import numpy as np
import pytest

from cgtlab.corpus import SynthSpec, generate_synthetic


def test_single_topic_degenerate():
    res = generate_synthetic(SynthSpec(k_true=1, vocab_size=20, n_docs=10,
                                       doc_len_mean=8, seed=3))
    assert np.allclose(res.theta, 1.0)
    assert res.phi.shape == (1, 20)


def test_same_seed_bit_identical():
    spec = SynthSpec(k_true=3, vocab_size=50, n_docs=30, doc_len_mean=12, seed=11)
    a, b = generate_synthetic(spec), generate_synthetic(spec)
    assert a.corpus.digest == b.corpus.digest
    assert np.array_equal(a.phi, b.phi)
    assert np.array_equal(a.theta, b.theta)


def test_different_seed_differs():
    base = dict(k_true=3, vocab_size=50, n_docs=30, doc_len_mean=12)
    a = generate_synthetic(SynthSpec(seed=1, **base))
    b = generate_synthetic(SynthSpec(seed=2, **base))
    assert a.corpus.digest != b.corpus.digest


def test_rows_are_distributions_and_tokens_in_range():
    res = generate_synthetic(SynthSpec(k_true=4, vocab_size=40, n_docs=50,
                                       doc_len_mean=15, seed=7))
    assert np.allclose(res.phi.sum(axis=1), 1.0, atol=1e-12)
    assert np.allclose(res.theta.sum(axis=1), 1.0, atol=1e-12)
    for doc in res.corpus.documents:
        assert len(doc) >= 2
        assert doc.tokens.max() < 40
        assert doc.tokens.min() >= 0


def test_word_frequencies_match_mixture_expectation():
    # corpus-wide frequencies should sit within 3 sigma of the planted
    # mixture expectation sum_k mean(theta_k) phi_k under multinomial noise
    res = generate_synthetic(SynthSpec(k_true=2, vocab_size=10, n_docs=200,
                                       doc_len_mean=40, alpha_true=0.5,
                                       beta_true=0.5, seed=23))
    n = res.corpus.n_tokens
    counts = np.bincount(res.corpus.token_words, minlength=10).astype(float)
    expected_p = res.theta.mean(axis=0) @ res.phi
    sigma = np.sqrt(n * expected_p * (1 - expected_p))
    assert (np.abs(counts - n * expected_p) <= 3 * sigma + 1e-9).mean() >= 0.9


def test_hierarchical_children():
    res = generate_synthetic(SynthSpec(k_true=2, vocab_size=60, n_docs=40,
                                       doc_len_mean=30, seed=5, n_children=2))
    assert res.child_phi.shape == (2, 2, 60)
    assert res.doc_child.shape == (40, 2)
    # parent rows are the renormalized child means
    expect = res.child_phi.mean(axis=1)
    expect /= expect.sum(axis=1, keepdims=True)
    assert np.allclose(res.phi, expect)


def test_invalid_spec():
    with pytest.raises(ValueError):
        SynthSpec(k_true=0, vocab_size=10, n_docs=5, doc_len_mean=4)
    with pytest.raises(ValueError):
        SynthSpec(k_true=5, vocab_size=3, n_docs=5, doc_len_mean=4)
