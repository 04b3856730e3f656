"""Truncated direct-assignment HDP Gibbs sampler.

Topic count grows on demand up to a truncation limit; the global stick
weights are resampled each sweep from table counts drawn by the usual
Chinese-restaurant construction. Used per query over its main document
set to carve out subtopics.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..lda.gibbs import _uniform, pcg32_state


@njit(cache=True, nogil=True)
def _standard_normal(state):
    u1 = _uniform(state)
    u2 = _uniform(state)
    if u1 < 1e-300:
        u1 = 1e-300
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@njit(cache=True, nogil=True)
def _gamma_sample(state, shape):
    """Marsaglia-Tsang; the shape<1 case uses the boost identity."""
    boost = 1.0
    if shape < 1.0:
        u = _uniform(state)
        if u < 1e-300:
            u = 1e-300
        boost = u ** (1.0 / shape)
        shape = shape + 1.0
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = _standard_normal(state)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = _uniform(state)
        if u < 1e-300:
            u = 1e-300
        if math.log(u) < 0.5 * x * x + d - d * v + d * math.log(v):
            return boost * d * v


@njit(cache=True, nogil=True)
def _resample_sticks(state, tau, n_dk, active, T, alpha0, gamma):
    """Table counts per topic by CRF simulation, then a Dirichlet draw
    over (m_1..m_T, gamma)."""
    D = n_dk.shape[0]
    g_total = 0.0
    g = np.zeros(T + 1, dtype=np.float64)
    for t in range(T):
        k = active[t]
        m_k = 0
        for d in range(D):
            n = n_dk[d, k]
            if n <= 0:
                continue
            w = alpha0 * tau[t]
            for j in range(n):
                if _uniform(state) < w / (w + j):
                    m_k += 1
        if m_k == 0:
            m_k = 1
        g[t] = _gamma_sample(state, float(m_k))
        g_total += g[t]
    g[T] = _gamma_sample(state, gamma)
    g_total += g[T]
    for t in range(T + 1):
        tau[t] = g[t] / g_total


@njit(cache=True, nogil=True)
def run_hdp(words, docs, D, V, gamma, alpha0, beta, t_max, iterations, seed, seq):
    """Returns (n_topics, assignments, n_dk, n_kw) with topics compacted
    to ids 0..n_topics-1."""
    N = words.shape[0]
    state = pcg32_state(seed, seq)
    v_beta = V * beta

    n_dk = np.zeros((D, t_max), dtype=np.int32)
    n_kw = np.zeros((t_max, V), dtype=np.int32)
    n_k = np.zeros(t_max, dtype=np.int64)
    z = np.empty(N, dtype=np.int32)
    active = np.empty(t_max, dtype=np.int32)
    slot_of = np.full(t_max, -1, dtype=np.int32)

    T = 2 if t_max >= 2 else 1
    for t in range(t_max):
        active[t] = t
        slot_of[t] = t if t < T else -1
    tau = np.zeros(t_max + 1, dtype=np.float64)
    for t in range(T + 1):
        tau[t] = 1.0 / (T + 1)

    for i in range(N):
        t = int(_uniform(state) * T)
        if t >= T:
            t = T - 1
        k = active[t]
        z[i] = k
        n_dk[docs[i], k] += 1
        n_kw[k, words[i]] += 1
        n_k[k] += 1

    p = np.empty(t_max + 1, dtype=np.float64)
    for sweep in range(iterations):
        for i in range(N):
            w = words[i]
            d = docs[i]
            k = z[i]
            n_dk[d, k] -= 1
            n_kw[k, w] -= 1
            n_k[k] -= 1
            if n_k[k] == 0:
                # retire the empty topic: swap its slot with the last,
                # then fold its stick weight into the remainder
                t = slot_of[k]
                last = T - 1
                active[t] = active[last]
                slot_of[active[t]] = t
                active[last] = k
                slot_of[k] = -1
                tau[t], tau[last] = tau[last], tau[t]
                tau[last] = tau[last] + tau[T]
                T -= 1

            total = 0.0
            for t in range(T):
                kk = active[t]
                total += (
                    (n_dk[d, kk] + alpha0 * tau[t])
                    * (n_kw[kk, w] + beta)
                    / (n_k[kk] + v_beta)
                )
                p[t] = total
            if T < t_max:
                total += alpha0 * tau[T] / V
            p[T] = total
            u = _uniform(state) * total
            t_new = 0
            while t_new < T and p[t_new] < u:
                t_new += 1
            if t_new == T and T >= t_max:
                t_new = T - 1  # truncation: no room to spawn
            if t_new == T:
                # spawn a topic in the first free slot
                k_new = active[T]
                slot_of[k_new] = T
                # break the remainder stick
                b = _gamma_sample(state, 1.0)
                b2 = _gamma_sample(state, gamma)
                frac = b / (b + b2)
                tau[T + 1] = tau[T] * (1.0 - frac)
                tau[T] = tau[T] * frac
                T += 1
            else:
                k_new = active[t_new]
            z[i] = k_new
            n_dk[d, k_new] += 1
            n_kw[k_new, w] += 1
            n_k[k_new] += 1

        _resample_sticks(state, tau, n_dk, active, T, alpha0, gamma)

    # compact topic ids to 0..T-1 in slot order
    remap = np.full(t_max, -1, dtype=np.int32)
    for t in range(T):
        remap[active[t]] = t
    z_out = np.empty(N, dtype=np.int32)
    for i in range(N):
        z_out[i] = remap[z[i]]
    n_dk_out = np.zeros((D, T), dtype=np.int32)
    n_kw_out = np.zeros((T, V), dtype=np.int32)
    for t in range(T):
        k = active[t]
        for d in range(D):
            n_dk_out[d, t] = n_dk[d, k]
        for w in range(V):
            n_kw_out[t, w] = n_kw[k, w]
    return T, z_out, n_dk_out, n_kw_out
