"""Jitted collapsed Gibbs kernels.

Randomness comes from an embedded PCG32 so chains are bit-reproducible
across platforms and independent of numpy's global state. Kernels release
the GIL: sweep-level parallelism runs whole chains on worker threads while
each chain stays strictly sequential.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_PCG_MULT = np.uint64(6364136223846793005)
_U32 = np.uint32
_U64 = np.uint64
_INV_2_32 = np.float64(2.3283064365386963e-10)  # 2^-32


@njit(cache=True, nogil=True, inline="always")
def _pcg32_next(state):
    old = state[0]
    state[0] = old * _PCG_MULT + state[1]
    xorshifted = _U32((((old >> _U64(18)) ^ old) >> _U64(27)) & _U64(0xFFFFFFFF))
    rot = _U32(old >> _U64(59))
    return _U32((xorshifted >> rot) | (xorshifted << ((_U32(32) - rot) & _U32(31))))


@njit(cache=True, nogil=True)
def pcg32_state(seed, seq):
    state = np.empty(2, dtype=np.uint64)
    state[0] = _U64(0)
    state[1] = (_U64(seq) << _U64(1)) | _U64(1)
    _pcg32_next(state)
    state[0] = state[0] + _U64(seed)
    _pcg32_next(state)
    return state


@njit(cache=True, nogil=True, inline="always")
def _uniform(state):
    return np.float64(_pcg32_next(state)) * _INV_2_32


@njit(cache=True, nogil=True)
def _collapsed_loglik(n_kw, n_k, n_dk, doc_len, alpha, beta, v_beta, k_alpha):
    K, V = n_kw.shape
    D = n_dk.shape[0]
    ll = 0.0
    for k in range(K):
        for w in range(V):
            ll += math.lgamma(n_kw[k, w] + beta)
        ll -= math.lgamma(n_k[k] + v_beta)
    for d in range(D):
        for k in range(K):
            ll += math.lgamma(n_dk[d, k] + alpha)
        ll -= math.lgamma(doc_len[d] + k_alpha)
    return ll


@njit(cache=True, nogil=True)
def run_lda(
    words,
    docs,
    doc_len,
    K,
    V,
    alpha,
    beta,
    iterations,
    burn_in,
    sample_lag,
    n_samples,
    seed,
    seq,
):
    """Plain collapsed Gibbs chain with symmetric priors.

    Returns averaged phi/theta estimates, final assignments and count
    tables, and the per-sweep collapsed joint log-likelihood.
    """
    N = words.shape[0]
    D = doc_len.shape[0]
    state = pcg32_state(seed, seq)

    z = np.empty(N, dtype=np.int32)
    n_dk = np.zeros((D, K), dtype=np.int32)
    n_kw = np.zeros((K, V), dtype=np.int32)
    n_k = np.zeros(K, dtype=np.int64)
    for i in range(N):
        k = int(_uniform(state) * K)
        if k >= K:
            k = K - 1
        z[i] = k
        n_dk[docs[i], k] += 1
        n_kw[k, words[i]] += 1
        n_k[k] += 1

    v_beta = V * beta
    k_alpha = K * alpha
    cum = np.empty(K, dtype=np.float64)
    phi_sum = np.zeros((K, V), dtype=np.float64)
    theta_sum = np.zeros((D, K), dtype=np.float64)
    loglik = np.empty(iterations, dtype=np.float64)
    taken = 0

    for sweep in range(iterations):
        for i in range(N):
            w = words[i]
            d = docs[i]
            k = z[i]
            n_dk[d, k] -= 1
            n_kw[k, w] -= 1
            n_k[k] -= 1
            total = 0.0
            for kk in range(K):
                total += (
                    (n_dk[d, kk] + alpha)
                    * (n_kw[kk, w] + beta)
                    / (n_k[kk] + v_beta)
                )
                cum[kk] = total
            u = _uniform(state) * total
            knew = 0
            while knew < K - 1 and cum[knew] < u:
                knew += 1
            z[i] = knew
            n_dk[d, knew] += 1
            n_kw[knew, w] += 1
            n_k[knew] += 1

        loglik[sweep] = _collapsed_loglik(
            n_kw, n_k, n_dk, doc_len, alpha, beta, v_beta, k_alpha
        )
        if (
            sweep >= burn_in
            and (sweep - burn_in) % sample_lag == 0
            and taken < n_samples
        ):
            taken += 1
            for k in range(K):
                denom = n_k[k] + v_beta
                for w in range(V):
                    phi_sum[k, w] += (n_kw[k, w] + beta) / denom
            for d in range(D):
                denom = doc_len[d] + k_alpha
                for k in range(K):
                    theta_sum[d, k] += (n_dk[d, k] + alpha) / denom

    if taken == 0:
        taken = 1
        for k in range(K):
            denom = n_k[k] + v_beta
            for w in range(V):
                phi_sum[k, w] += (n_kw[k, w] + beta) / denom
        for d in range(D):
            denom = doc_len[d] + k_alpha
            for k in range(K):
                theta_sum[d, k] += (n_dk[d, k] + alpha) / denom

    phi = phi_sum / taken
    theta = theta_sum / taken
    return phi, theta, z, n_dk, n_kw, n_k, loglik


@njit(cache=True, nogil=True)
def run_lda_seeded(
    words,
    docs,
    doc_len,
    K,
    V,
    alpha,
    beta_kw,
    init_z,
    iterations,
    burn_in,
    sample_lag,
    n_samples,
    seed,
    seq,
):
    """Collapsed Gibbs with per-topic word priors and fixed initial
    assignments (query-seeded topics use boosted priors)."""
    N = words.shape[0]
    D = doc_len.shape[0]
    state = pcg32_state(seed, seq)

    beta_row = np.empty(K, dtype=np.float64)
    for k in range(K):
        s = 0.0
        for w in range(V):
            s += beta_kw[k, w]
        beta_row[k] = s

    z = init_z.copy()
    n_dk = np.zeros((D, K), dtype=np.int32)
    n_kw = np.zeros((K, V), dtype=np.int32)
    n_k = np.zeros(K, dtype=np.int64)
    for i in range(N):
        k = z[i]
        n_dk[docs[i], k] += 1
        n_kw[k, words[i]] += 1
        n_k[k] += 1

    k_alpha = K * alpha
    cum = np.empty(K, dtype=np.float64)
    phi_sum = np.zeros((K, V), dtype=np.float64)
    theta_sum = np.zeros((D, K), dtype=np.float64)
    taken = 0

    for sweep in range(iterations):
        for i in range(N):
            w = words[i]
            d = docs[i]
            k = z[i]
            n_dk[d, k] -= 1
            n_kw[k, w] -= 1
            n_k[k] -= 1
            total = 0.0
            for kk in range(K):
                total += (
                    (n_dk[d, kk] + alpha)
                    * (n_kw[kk, w] + beta_kw[kk, w])
                    / (n_k[kk] + beta_row[kk])
                )
                cum[kk] = total
            u = _uniform(state) * total
            knew = 0
            while knew < K - 1 and cum[knew] < u:
                knew += 1
            z[i] = knew
            n_dk[d, knew] += 1
            n_kw[knew, w] += 1
            n_k[knew] += 1

        if (
            sweep >= burn_in
            and (sweep - burn_in) % sample_lag == 0
            and taken < n_samples
        ):
            taken += 1
            for k in range(K):
                denom = n_k[k] + beta_row[k]
                for w in range(V):
                    phi_sum[k, w] += (n_kw[k, w] + beta_kw[k, w]) / denom
            for d in range(D):
                denom = doc_len[d] + k_alpha
                for k in range(K):
                    theta_sum[d, k] += (n_dk[d, k] + alpha) / denom

    if taken == 0:
        taken = 1
        for k in range(K):
            denom = n_k[k] + beta_row[k]
            for w in range(V):
                phi_sum[k, w] += (n_kw[k, w] + beta_kw[k, w]) / denom
        for d in range(D):
            denom = doc_len[d] + k_alpha
            for k in range(K):
                theta_sum[d, k] += (n_dk[d, k] + alpha) / denom

    phi = phi_sum / taken
    theta = theta_sum / taken
    return phi, theta, z, n_dk, n_kw, n_k
