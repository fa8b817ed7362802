# cython: language_level=3
"""Compiled twins of the kernels in ``_pykernels``.

All randomness stays in the caller; ties consult ``rng.random()`` lazily so
both backends consume the generator stream identically. Arithmetic mirrors
the numpy fallback op for op (the extension is compiled with
-ffp-contract=off), so results are bit-identical across backends.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def argmax_counts(samples, rng):
    """See ``_pykernels.argmax_counts``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] s = np.ascontiguousarray(
        samples, dtype=np.float64
    )
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t k = s.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(k, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tied = np.empty(k, dtype=np.int64)
    cdef Py_ssize_t i, j, best, n_ties
    cdef double best_val, u
    for i in range(n):
        best = 0
        best_val = s[i, 0]
        for j in range(1, k):
            if s[i, j] > best_val:
                best_val = s[i, j]
                best = j
        n_ties = 0
        for j in range(k):
            if s[i, j] == best_val:
                tied[n_ties] = j
                n_ties += 1
        if n_ties > 1:
            u = rng.random()
            j = <Py_ssize_t>(u * n_ties)
            if j >= n_ties:
                j = n_ties - 1
            best = tied[j]
        counts[best] += 1
    return counts


def shifted_argmax_counts(loc, scale, z, rng):
    """See ``_pykernels.shifted_argmax_counts``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] m = np.ascontiguousarray(
        loc, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] sd = np.ascontiguousarray(
        scale, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] zz = np.ascontiguousarray(
        z, dtype=np.float64
    )
    cdef Py_ssize_t n = zz.shape[0]
    cdef Py_ssize_t k = zz.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(k, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tied = np.empty(k, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] row = np.empty(k, dtype=np.float64)
    cdef Py_ssize_t i, j, best, n_ties
    cdef double best_val, u, v
    for i in range(n):
        best = 0
        for j in range(k):
            v = m[j] + sd[j] * zz[i, j]
            row[j] = v
            if j == 0 or v > best_val:
                best_val = v
                best = j
        n_ties = 0
        for j in range(k):
            if row[j] == best_val:
                tied[n_ties] = j
                n_ties += 1
        if n_ties > 1:
            u = rng.random()
            j = <Py_ssize_t>(u * n_ties)
            if j >= n_ties:
                j = n_ties - 1
            best = tied[j]
        counts[best] += 1
    return counts


def pair_accumulate(arm, y, mu, probs, sum_tau, sum_sig2):
    """See ``_pykernels.pair_accumulate``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] mu_ = np.ascontiguousarray(
        mu, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] p_ = np.ascontiguousarray(
        probs, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=1] st = sum_tau
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ss = sum_sig2
    cdef Py_ssize_t k = mu_.shape[0]
    cdef Py_ssize_t a = arm
    cdef double yy = y
    cdef double q
    cdef Py_ssize_t j
    if a == 0:
        q = (yy - mu_[0]) / p_[0]
        for j in range(1, k):
            st[j] += (mu_[j] - mu_[0]) - q
            ss[j] += q * q
    else:
        for j in range(1, k):
            st[j] += mu_[j] - mu_[0]
        q = (yy - mu_[a]) / p_[a]
        st[a] += q
        ss[a] += q * q
