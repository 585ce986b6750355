"""Hot loops: chain-integral backward recursion and ordering-event classification.

Each kernel exists twice, as a numba ``@njit`` loop and as a vectorised numpy
routine.  Both accumulate in the same order, so they agree bit for bit.  The
numpy path is used when numba is missing or ``SEQPREC_DISABLE_NUMBA`` is set
to a true value (``1``, ``true``, ``yes``) before import.
"""

from __future__ import annotations

import math
import os

import numpy as np

_disabled = os.environ.get("SEQPREC_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _disabled:
        raise ImportError
    from numba import njit
except ImportError:
    njit = None

BACKEND = "numba" if njit is not None else "numpy"


def _factorials(n: int) -> np.ndarray:
    return np.array([math.factorial(k) for k in range(n + 1)], dtype=np.int64)


# --- chain integrals -------------------------------------------------------
#
# For each 0-based permutation row ``perm``:
#   Q <- sf[perm[-1]]
#   Q_k(x_i) = hi[v] * Q(x_M) + sum_{j >= i} dF[v, j] * (Q(x_j) + Q(x_{j+1})) / 2
#   total    = lo[v0] * Q(x_0) + Q_1(x_0)
# ``corr`` collects the magnitude of the tail terms (a bound on truncation error).


def chain_numpy(dF, sf, lo, hi, perms, batch: int = 256):
    P, n = perms.shape
    tot = np.empty(P)
    corr = np.empty(P)
    if n == 1:
        tot[:] = 1.0
        corr[:] = 0.0
        return tot, corr
    for s in range(0, P, batch):
        pr = perms[s : s + batch]
        Q = sf[pr[:, -1]]
        c = np.zeros(len(pr))
        for pos in range(n - 2, 0, -1):
            v = pr[:, pos]
            head = hi[v] * Q[:, -1]
            c = c + head
            cell = dF[v] * (0.5 * (Q[:, :-1] + Q[:, 1:]))
            seq = np.concatenate([head[:, None], cell[:, ::-1]], axis=1)
            Q = np.cumsum(seq, axis=1)[:, ::-1]
        v = pr[:, 0]
        head = hi[v] * Q[:, -1]
        c = c + head
        cell = dF[v] * (0.5 * (Q[:, :-1] + Q[:, 1:]))
        seq = np.concatenate([head[:, None], cell[:, ::-1]], axis=1)
        acc = np.cumsum(seq, axis=1)[:, -1]
        tot[s : s + batch] = acc + lo[v] * Q[:, 0]
        corr[s : s + batch] = c + lo[v] * (1.0 - Q[:, 0])
    return tot, corr


def _chain_loop(dF, sf, lo, hi, perms):
    P, n = perms.shape
    M1 = sf.shape[1]
    M = M1 - 1
    tot = np.empty(P)
    corr = np.empty(P)
    Q = np.empty(M1)
    W = np.empty(M1)
    for p in range(P):
        if n == 1:
            tot[p] = 1.0
            corr[p] = 0.0
            continue
        last = perms[p, n - 1]
        for i in range(M1):
            Q[i] = sf[last, i]
        c = 0.0
        for pos in range(n - 2, 0, -1):
            v = perms[p, pos]
            acc = hi[v] * Q[M]
            c = c + acc
            W[M] = acc
            for i in range(M - 1, -1, -1):
                acc = acc + dF[v, i] * (0.5 * (Q[i] + Q[i + 1]))
                W[i] = acc
            for i in range(M1):
                Q[i] = W[i]
        v = perms[p, 0]
        acc = hi[v] * Q[M]
        c = c + acc
        for i in range(M - 1, -1, -1):
            acc = acc + dF[v, i] * (0.5 * (Q[i] + Q[i + 1]))
        tot[p] = acc + lo[v] * Q[0]
        corr[p] = c + lo[v] * (1.0 - Q[0])
    return tot, corr


# --- ordering-event classification ----------------------------------------


def classify_numpy(X, fact):
    """Counts of strict ordering events per lexicographic rank, plus tie count."""
    N, n = X.shape
    order = np.argsort(X, axis=1, kind="stable")
    sx = np.take_along_axis(X, order, axis=1)
    strict = np.all(sx[:, 1:] > sx[:, :-1], axis=1)
    o = order[strict]
    rank = np.zeros(len(o), dtype=np.int64)
    for i in range(n - 1):
        smaller = (o[:, i + 1 :] < o[:, i : i + 1]).sum(axis=1)
        rank += smaller * fact[n - 1 - i]
    counts = np.bincount(rank, minlength=int(fact[n])).astype(np.int64)
    return counts, int(N - strict.sum())


def _classify_loop(X, fact):
    N, n = X.shape
    counts = np.zeros(fact[n], dtype=np.int64)
    ties = 0
    order = np.empty(n, dtype=np.int64)
    for r in range(N):
        for i in range(n):
            order[i] = i
        for i in range(1, n):
            key = order[i]
            j = i - 1
            while j >= 0 and X[r, order[j]] > X[r, key]:
                order[j + 1] = order[j]
                j -= 1
            order[j + 1] = key
        tie = False
        for i in range(n - 1):
            if X[r, order[i]] == X[r, order[i + 1]]:
                tie = True
                break
        if tie:
            ties += 1
            continue
        rank = 0
        for i in range(n - 1):
            s = 0
            for j in range(i + 1, n):
                if order[j] < order[i]:
                    s += 1
            rank += s * fact[n - 1 - i]
        counts[rank] += 1
    return counts, ties


if njit is not None:
    chain_numba = njit(cache=True, nogil=True)(_chain_loop)
    classify_numba = njit(cache=True, nogil=True)(_classify_loop)
else:
    chain_numba = classify_numba = None


def chain_integrals(dF, sf, lo, hi, perms):
    """Nested ordering integrals for each row of ``perms`` on a shared grid."""
    args = (
        np.ascontiguousarray(dF, dtype=np.float64),
        np.ascontiguousarray(sf, dtype=np.float64),
        np.ascontiguousarray(lo, dtype=np.float64),
        np.ascontiguousarray(hi, dtype=np.float64),
        np.ascontiguousarray(perms, dtype=np.int64),
    )
    if chain_numba is not None:
        return chain_numba(*args)
    return chain_numpy(*args)


def classify_orderings(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    fact = _factorials(X.shape[1])
    if classify_numba is not None:
        return classify_numba(X, fact)
    return classify_numpy(X, fact)
