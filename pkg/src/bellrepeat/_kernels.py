"""Compiled inner loops over packed Pauli labels (``N <= 32``).

Labels are ``uint64`` words with the layout of :mod:`bellrepeat.gf2`.
Log-probabilities are read from 16-bit lookup tables
(:func:`logprob_table`) and syndromes from 8-bit ones
(:func:`syndrome_table`).
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

MAX_KERNEL_N = 32


def n_label_bytes(N: int) -> int:
    return (2 * N + 7) // 8


def n_label_chunks(N: int) -> int:
    return (2 * N + 15) // 16


def logprob_table(log2p, N: int) -> np.ndarray:
    """``T[c, v]`` = log2 probability of qubits ``8c..8c+7`` when chunk ``c`` is ``v``.

    Chunks are 16 bits wide.  ``log2p`` is indexed by the Bell symbol
    ``2*z + x``; qubits at or beyond ``N`` contribute nothing.
    """
    lp = np.asarray(log2p, dtype=np.float64)
    v = np.arange(1 << 16)
    T = np.zeros((n_label_chunks(N), 1 << 16), dtype=np.float64)
    for c in range(T.shape[0]):
        for k in range(8):
            n = 8 * c + k
            if n >= N:
                break
            z = (v >> (2 * k)) & 1
            x = (v >> (2 * k + 1)) & 1
            T[c] += lp[2 * z + x]
    return T


def syndrome_table(check_rows, N: int) -> np.ndarray:
    """``S[b, v]`` = syndrome contribution of byte ``b`` holding value ``v``."""
    nb_ = n_label_bytes(N)
    cols = np.zeros(2 * N, dtype=np.uint64)
    for i, row in enumerate(check_rows):
        for j in range(2 * N):
            if (row >> j) & 1:
                cols[j] |= np.uint64(1 << i)
    S = np.zeros((nb_, 256), dtype=np.uint64)
    for b in range(nb_):
        for v in range(256):
            acc = 0
            for k in range(8):
                j = 8 * b + k
                if j < 2 * N and (v >> k) & 1:
                    acc ^= int(cols[j])
            S[b, v] = acc
    return S


@nb.njit(cache=True, nogil=True, inline="always")
def _logq(m, T, nchunks):
    acc = 0.0
    for c in range(nchunks):
        acc += T[c, (m >> np.uint64(16 * c)) & np.uint64(0xFFFF)]
    return acc


@nb.njit(cache=True, nogil=True, inline="always")
def _syn(m, S, nbytes):
    acc = np.uint64(0)
    for b in range(nbytes):
        acc ^= S[b, (m >> np.uint64(8 * b)) & np.uint64(0xFF)]
    return acc


@nb.njit(cache=True, nogil=True, inline="always")
def _lex_less(a, b):
    d = a ^ b
    if d == 0:
        return False
    low = d & (~d + np.uint64(1))
    return (a & low) == 0


@nb.njit(cache=True, nogil=True, inline="always")
def _beats(lq, cand, best_lq, best, tol):
    # higher probability wins; within tol the lexicographically smaller label
    if lq == best_lq:
        return _lex_less(cand, best)
    if lq > best_lq + tol:
        return True
    if lq >= best_lq - tol:
        return _lex_less(cand, best)
    return False


@nb.njit(cache=True, nogil=True, inline="always")
def _ctz(i):
    j = 0
    one = np.uint64(1)
    while (i & one) == np.uint64(0):
        i >>= one
        j += 1
    return j


@nb.njit(cache=True, nogil=True)
def exact_sweep(N, T, S, tol):
    """Per-syndrome best log-probability and leader over all ``4^N`` labels."""
    nbytes = S.shape[0]
    nchunks = T.shape[0]
    n_syn = 1 << N
    best_lq = np.full(n_syn, -np.inf)
    leader = np.zeros(n_syn, dtype=np.uint64)
    filled = np.zeros(n_syn, dtype=np.bool_)
    total = np.uint64(1) << np.uint64(2 * N)
    m = np.uint64(0)
    while m < total:
        s = _syn(m, S, nbytes)
        lq = _logq(m, T, nchunks)
        if not filled[s]:
            filled[s] = True
            best_lq[s] = lq
            leader[s] = m
        elif _beats(lq, m, best_lq[s], leader[s], tol):
            best_lq[s] = lq
            leader[s] = m
        m += np.uint64(1)
    return best_lq, leader


@nb.njit(cache=True, nogil=True)
def coset_best(m0, gens, T, tol):
    """Leader of the coset ``m0 + C`` by Gray-code traversal of ``C``."""
    nchunks = T.shape[0]
    best = m0
    best_lq = _logq(m0, T, nchunks)
    cur = m0
    n_words = np.uint64(1) << np.uint64(gens.shape[0])
    i = np.uint64(1)
    while i < n_words:
        cur ^= gens[_ctz(i)]
        lq = _logq(cur, T, nchunks)
        if _beats(lq, cur, best_lq, best, tol):
            best = cur
            best_lq = lq
        i += np.uint64(1)
    return best


@nb.njit(cache=True, nogil=True)
def is_beaten(m, gens, T, tol):
    """Whether some other element of ``m + C`` outranks ``m``."""
    nchunks = T.shape[0]
    m_lq = _logq(m, T, nchunks)
    cur = m
    n_words = np.uint64(1) << np.uint64(gens.shape[0])
    i = np.uint64(1)
    while i < n_words:
        cur ^= gens[_ctz(i)]
        lq = _logq(cur, T, nchunks)
        if _beats(lq, cur, m_lq, m, tol):
            return True
        i += np.uint64(1)
    return False


@nb.njit(cache=True, nogil=True)
def count_unbeaten(ms, gens, T, tol):
    wins = 0
    for k in range(ms.shape[0]):
        if not is_beaten(ms[k], gens, T, tol):
            wins += 1
    return wins


@nb.njit(cache=True, nogil=True)
def _next_permutation(a):
    n = a.shape[0]
    i = n - 2
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    a[i], a[j] = a[j], a[i]
    lo, hi = i + 1, n - 1
    while lo < hi:
        a[lo], a[hi] = a[hi], a[lo]
        lo += 1
        hi -= 1
    return True


@nb.njit(cache=True, nogil=True)
def _pack(sym):
    m = np.uint64(0)
    for n in range(sym.shape[0]):
        s = sym[n]
        if s & 2:
            m |= np.uint64(1) << np.uint64(2 * n)
        if s & 1:
            m |= np.uint64(1) << np.uint64(2 * n + 1)
    return m


@nb.njit(cache=True, nogil=True)
def first_in_syndrome_counts(class_symbols, S, seen):
    """Walk type classes in the given order, counting new syndromes per class.

    ``class_symbols[c]`` is the sorted symbol multiset of class ``c``; all of
    its distinct arrangements are visited.  ``seen`` is updated in place.
    """
    nbytes = S.shape[0]
    n_classes = class_symbols.shape[0]
    new = np.zeros(n_classes, dtype=np.int64)
    for c in range(n_classes):
        sym = class_symbols[c].copy()
        while True:
            s = _syn(_pack(sym), S, nbytes)
            if not seen[s]:
                seen[s] = True
                new[c] += 1
            if not _next_permutation(sym):
                break
    return new
