"""Pure-numpy modular row-reduction backend.

Rows are kept as float64 so the reduction against the pivot block runs
through BLAS. Exactness constraint: one dot product accumulates at most
ncols terms bounded by (p-1)^2, so primes are capped by
ncols * (p-1)^2 < 2^53; every intermediate is then an exact float64 integer.
"""

from math import isqrt

import numpy as np

NAME = "numpy"
DTYPE = np.float64


def max_prime(ncols: int) -> int:
    return isqrt((1 << 53) // max(ncols, 1))


def reduce_row(row, R, pivcols, p):
    """row -= row[pivcols] @ R (mod p), in place; R is in reduced echelon form."""
    if len(pivcols):
        mults = row[pivcols]
        if np.any(mults):
            row -= mults @ R
            row %= p
    return row


def outer_update(R, col, newrow, p):
    """Clear column entries col out of R against a freshly normalized pivot row."""
    if np.any(col):
        R -= np.outer(col, newrow)
        R %= p
