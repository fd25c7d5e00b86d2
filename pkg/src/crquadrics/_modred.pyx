# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled modular row-reduction backend.

Same contract as modred_py but on int64 with primes up to 2^31, reducing
mod p after every fused multiply-subtract; sparse multipliers are skipped,
which is where most of the win over the BLAS path comes from on the very
sparse tangency systems.
"""

import numpy as np

NAME = "cython"
DTYPE = np.int64


def max_prime(ncols):
    # products m * R[k, j] stay below p^2 < 2^62; accumulation is per-step
    return (1 << 31) - 1


def reduce_row(long long[::1] row, long long[:, ::1] R, long long[::1] pivcols,
               long long p):
    cdef Py_ssize_t k, j, n = row.shape[0], r = R.shape[0]
    cdef long long m, x
    for k in range(r):
        m = row[pivcols[k]]
        if m == 0:
            continue
        for j in range(n):
            x = (row[j] - m * R[k, j]) % p
            if x < 0:
                x += p
            row[j] = x
    return row


def outer_update(long long[:, ::1] R, long long[::1] col, long long[::1] newrow,
                 long long p):
    cdef Py_ssize_t i, j, r = R.shape[0], n = newrow.shape[0]
    cdef long long m, x
    for i in range(r):
        m = col[i]
        if m == 0:
            continue
        for j in range(n):
            x = (R[i, j] - m * newrow[j]) % p
            if x < 0:
                x += p
            R[i, j] = x
