"""Exact linear algebra.

Two nullspace paths over Q, both emitting the same canonical free-column
normal form (the pivot-column set of a reduced echelon form is intrinsic to
the matrix, so the paths agree):

* fraction-free integer elimination with lowest-bit-size pivoting, for
  small systems;
* a modular path for large ones: row reduction mod deterministic primes,
  CRT + rational reconstruction, then exact verification of M v = 0 over Q.
  rank_p <= rank_Q bounds dim ker from above, and the verified normal-form
  vectors bound it from below, so the output is certified exact no matter
  which primes were used.

Dense routines (rref_dense, solve_dense, ...) are generic over any exact
field scalar supporting +, *, unary -, truth testing and an inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, lcm

import numpy as np

from . import modred
from .errors import CertificationError
from .rationals import QQ, QQ0, QQ1, crt_combine, primes_descending, rational_reconstruct
from .scalars import QQi, Sqrt2Ext, scalar_size

# --- generic dense elimination over a field ---------------------------------


def _inv(x):
    if hasattr(x, "inverse"):
        return x.inverse()
    return QQ1 / x


def _one_like(x):
    if isinstance(x, QQi):
        return QQi(1)
    if isinstance(x, Sqrt2Ext):
        return Sqrt2Ext(1)
    return QQ1


def rref_dense(rows, ncols):
    """Reduced row echelon form of dense rows; columns >= ncols ride along.

    Returns (pivot_columns, rows) with pivot rows first in pivot order and
    any leftover (fully reduced) rows after them.  Deterministic: columns
    are processed left to right, pivot rows chosen by smallest coefficient
    size.
    """
    work = [list(r) for r in rows]
    used = [False] * len(work)
    pivots = []
    pivrows = []
    for c in range(ncols):
        best = None
        for idx, r in enumerate(work):
            if used[idx] or not r[c]:
                continue
            sz = scalar_size(r[c])
            if best is None or sz < best[0]:
                best = (sz, idx)
        if best is None:
            continue
        pi = best[1]
        used[pi] = True
        prow = work[pi]
        inv = _inv(prow[c])
        for j in range(len(prow)):
            if prow[j]:
                prow[j] = prow[j] * inv
        nz_cols = [j for j, v in enumerate(prow) if v]
        for r in work:
            if r is prow or not r[c]:
                continue
            f = r[c]
            for j in nz_cols:
                r[j] = r[j] - f * prow[j]
        pivots.append(c)
        pivrows.append(prow)
    leftovers = [r for idx, r in enumerate(work) if not used[idx]]
    return pivots, pivrows + leftovers


def solve_dense(rows, rhs_columns, ncols=None):
    """Solve A x = b for several right-hand sides over an exact field.

    Returns one solution vector per column (free variables set to 0); raises
    ValueError when inconsistent.  Uniqueness is up to the caller (check
    pivot count / matrix_rank_field when it matters).
    """
    if ncols is None:
        ncols = len(rows[0])
    aug = [list(r) + [col[i] for col in rhs_columns] for i, r in enumerate(rows)]
    pivots, reduced = rref_dense(aug, ncols)
    for r in reduced:
        if all(not r[j] for j in range(ncols)) and any(r[ncols:]):
            raise ValueError("inconsistent linear system")
    zero = None
    for r in rows:
        for v in r:
            zero = v - v
            break
        if zero is not None:
            break
    sols = []
    for k in range(len(rhs_columns)):
        x = [zero] * ncols
        for i, c in enumerate(pivots):
            x[c] = reduced[i][ncols + k]
        sols.append(x)
    return sols


def matrix_rank_field(rows, ncols=None):
    if not rows:
        return 0
    if ncols is None:
        ncols = len(rows[0])
    pivots, _ = rref_dense(rows, ncols)
    return len(pivots)


def invert_matrix_field(rows):
    """Inverse of a square matrix over an exact field; ValueError if singular."""
    n = len(rows)
    one = _one_like(rows[0][0])
    zero = one - one
    aug = [list(r) + [one if j == i else zero for j in range(n)] for i, r in enumerate(rows)]
    pivots, reduced = rref_dense(aug, n)
    if len(pivots) != n:
        raise ValueError("matrix is singular")
    out = [[zero] * n for _ in range(n)]
    for i, c in enumerate(pivots):
        for j in range(n):
            out[c][j] = reduced[i][n + j]
    return out


def nullspace_field_dense(rows, ncols):
    """Kernel basis over the coefficient field itself (not the real split)."""
    if not rows:
        pivots, reduced = [], []
    else:
        pivots, reduced = rref_dense(rows, ncols)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        v = [QQi(0)] * ncols
        v[f] = QQi(1)
        for i, c in enumerate(pivots):
            v[c] = -reduced[i][f]
        basis.append(tuple(v))
    return basis


# --- real sparse systems -----------------------------------------------------


@dataclass
class RealLinearSystem:
    """Sparse real-linear constraints with primitive integer rows."""

    ncols: int
    rows: list = field(default_factory=list)  # (cols tuple, vals tuple of ints)
    col_labels: list | None = None

    @property
    def nrows(self):
        return len(self.rows)


def _integerize(entries):
    """dict col -> QQ  ==>  primitive integer (cols, vals) with canonical sign."""
    items = [(c, v) for c, v in sorted(entries.items()) if v]
    if not items:
        return None
    denom = 1
    for _, v in items:
        denom = lcm(denom, int(v.denominator))
    ints = [int(v.numerator) * (denom // int(v.denominator)) for _, v in items]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    if ints[0] < 0:
        ints = [-x for x in ints]
    return tuple(c for c, _ in items), tuple(ints)


def real_system_from_rational_rows(rows, ncols, col_labels=None):
    """Build a RealLinearSystem from dense rational rows, deduplicated."""
    sys = RealLinearSystem(ncols, [], col_labels)
    seen = set()
    for r in rows:
        packed = _integerize({j: QQ(v) for j, v in enumerate(r) if v})
        if packed is None or packed in seen:
            continue
        seen.add(packed)
        sys.rows.append(packed)
    return sys


class ComplexRowsBuilder:
    """Collects constraints sum_u (A_u c_u + B_u conj(c_u)) = 0 over complex
    unknowns c_u and realizes them as a real system in (Re c_u, Im c_u).

    With c = x + iy the constraint coefficient is (A+B) x + i (A-B) y,
    giving the two real rows
        Re(A+B) x - Im(A-B) y = 0
        Im(A+B) x + Re(A-B) y = 0.
    """

    def __init__(self, n_complex, labels=None):
        self.n = n_complex
        self._rows = {}
        cols = []
        names = labels if labels is not None else [f"c{i}" for i in range(n_complex)]
        for name in names:
            cols.append(f"re:{name}")
            cols.append(f"im:{name}")
        self.col_labels = cols

    def add(self, row_key, u, lin=None, conj=None):
        cell = self._rows.setdefault(row_key, {})
        a, b = cell.get(u, (QQi(0), QQi(0)))
        if lin is not None:
            a = a + lin
        if conj is not None:
            b = b + conj
        cell[u] = (a, b)

    def build(self):
        sys = RealLinearSystem(2 * self.n, [], self.col_labels)
        seen = set()
        for key in sorted(self._rows):
            cell = self._rows[key]
            re_row = {}
            im_row = {}
            for u, (a, b) in cell.items():
                s = a + b
                d = a - b
                if s.re:
                    re_row[2 * u] = re_row.get(2 * u, QQ0) + s.re
                if d.im:
                    re_row[2 * u + 1] = re_row.get(2 * u + 1, QQ0) - d.im
                if s.im:
                    im_row[2 * u] = im_row.get(2 * u, QQ0) + s.im
                if d.re:
                    im_row[2 * u + 1] = im_row.get(2 * u + 1, QQ0) + d.re
            for row in (re_row, im_row):
                packed = _integerize(row)
                if packed is None or packed in seen:
                    continue
                seen.add(packed)
                sys.rows.append(packed)
        return sys


# --- exact fraction-free kernel ----------------------------------------------


def _ffge(rows):
    """Shared fraction-free elimination; returns the pivot list [(col, row)].

    Row combinations are pv*r - rv*piv followed by content (gcd) reduction,
    keeping everything in integers of moderate size; pivot rows are chosen
    by lowest bit size of the pivot entry.
    """
    active = [dict(zip(cols, vals)) for cols, vals in rows]
    if not active:
        return [], 0
    ncols = 0
    for r in active:
        for c in r:
            if c + 1 > ncols:
                ncols = c + 1
    pivots = []
    for c in range(ncols):
        cands = [r for r in active if c in r]
        if not cands:
            continue
        piv = min(cands, key=lambda r: (abs(r[c]).bit_length(), len(r)))
        for idx, r in enumerate(active):
            if r is piv:
                del active[idx]
                break
        pv = piv[c]
        for r in cands:
            if r is piv:
                continue
            rv = r.pop(c)
            newr = {col: val * pv for col, val in r.items()}
            for col, val in piv.items():
                if col == c:
                    continue
                acc = newr.get(col, 0) - rv * val
                if acc:
                    newr[col] = acc
                else:
                    newr.pop(col, None)
            if newr:
                g = 0
                for v in newr.values():
                    g = gcd(g, abs(v))
                if g > 1:
                    newr = {k: v // g for k, v in newr.items()}
            r.clear()
            r.update(newr)
        pivots.append((c, piv))
    return pivots, ncols


def nullspace_exact_int(rows, ncols):
    """Fraction-free integer elimination; kernel in free-column normal form."""
    pivots, _ = _ffge(rows)
    pivset = {c for c, _ in pivots}
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        v = [QQ0] * ncols
        v[f] = QQ1
        for c, prow in reversed(pivots):
            s = QQ0
            for col, val in prow.items():
                if col != c and v[col]:
                    s += val * v[col]
            v[c] = -s / prow[c]
        basis.append(tuple(v))
    return basis


# --- certified modular kernel --------------------------------------------------


def _kernel_mod_p(rows, ncols, p, impl):
    dtype = impl.DTYPE
    R = np.zeros((ncols, ncols), dtype=dtype)
    pivcols = np.zeros(ncols, dtype=np.int64)
    nused = 0
    buf = np.zeros(ncols, dtype=dtype)
    order = []
    for cols, vals in rows:
        buf[:] = 0
        for c, v in zip(cols, vals):
            buf[c] = v % p
        row = buf.copy()
        impl.reduce_row(row, R[:nused], pivcols[:nused], p)
        nz = np.nonzero(row)[0]
        if nz.size == 0:
            continue
        c = int(nz[0])
        inv = pow(int(row[c]), p - 2, p)
        row = (row * inv) % p
        if nused:
            impl.outer_update(R[:nused], np.ascontiguousarray(R[:nused, c]), row, p)
        R[nused] = row
        pivcols[nused] = c
        order.append(c)
        nused += 1
        if nused == ncols:
            break
    perm = sorted(range(nused), key=lambda i: order[i])
    pivot_cols = tuple(order[i] for i in perm)
    Rs = R[perm, :]
    pivset = set(pivot_cols)
    free = [c for c in range(ncols) if c not in pivset]
    K = np.zeros((len(free), ncols), dtype=np.int64)
    for i, f in enumerate(free):
        K[i, f] = 1
        for j, c in enumerate(pivot_cols):
            v = int(Rs[j, f]) % p
            if v:
                K[i, c] = (p - v) % p
    return pivot_cols, K


def _verify_kernel(rows, vectors):
    for vec in vectors:
        denom = 1
        for v in vec:
            denom = lcm(denom, int(v.denominator))
        ints = [int(v.numerator) * (denom // int(v.denominator)) for v in vec]
        for cols, vals in rows:
            s = 0
            for c, v in zip(cols, vals):
                x = ints[c]
                if x:
                    s += v * x
            if s:
                return False
    return True


def _reconstruct_batch(batch, pivots, ncols):
    d = ncols - len(pivots)
    vectors = []
    for i in range(d):
        vec = []
        for j in range(ncols):
            x, m = int(batch[0][1][i, j]), batch[0][0]
            for p2, K2 in batch[1:]:
                x, m = crt_combine(x, m, int(K2[i, j]), p2)
            r = rational_reconstruct(x, m)
            if r is None:
                return None
            vec.append(r)
        vectors.append(tuple(vec))
    return vectors


def nullspace_modular(rows, ncols, backend=None, max_rounds=12):
    """Certified exact kernel via CRT of modular kernels.

    Good primes all report the same intrinsic (pivots, rank); a bad prime can
    only lower the rank or perturb pivots.  Primes are grouped by pivot set,
    the max-rank group reconstructed (also from suffixes, so one early bad
    prime ages out), and the result verified exactly before being returned.
    """
    impl, _ = modred.get_backend(backend)
    pgen = primes_descending(impl.max_prime(ncols))
    groups = {}
    for round_no in range(max_rounds):
        p = next(pgen)
        pivots, K = _kernel_mod_p(rows, ncols, p, impl)
        if len(pivots) == ncols:
            # dim ker_Q <= ncols - rank_p = 0: certified by this prime alone
            return []
        groups.setdefault(pivots, []).append((p, K))
        best = max(groups, key=lambda piv: (len(piv), piv))
        batch = groups[best]
        if round_no == 0:
            continue  # insist on two primes before the first attempt
        for trim in range(len(batch)):
            vectors = _reconstruct_batch(batch[trim:], best, ncols)
            if vectors is not None and _verify_kernel(rows, vectors):
                return vectors
    raise CertificationError(f"modular kernel did not certify after {max_rounds} primes")


def nullspace(system, method="auto", backend=None):
    """Kernel basis of a RealLinearSystem in canonical free-column normal form."""
    rows, ncols = system.rows, system.ncols
    if not rows:
        basis = []
        for f in range(ncols):
            v = [QQ0] * ncols
            v[f] = QQ1
            basis.append(tuple(v))
        return basis
    if method == "auto":
        method = "exact" if ncols <= 96 and len(rows) <= 800 else "modular"
    if method == "exact":
        return nullspace_exact_int(rows, ncols)
    if method == "modular":
        return nullspace_modular(rows, ncols, backend=backend)
    raise ValueError(f"unknown nullspace method {method!r}")


# --- span utilities over Q -----------------------------------------------------


def _pack_vectors(vectors):
    rows = []
    for v in vectors:
        packed = _integerize({j: QQ(x) for j, x in enumerate(v) if x})
        if packed is not None:
            rows.append(packed)
    return rows


def rank_rational(vectors):
    rows = _pack_vectors(vectors)
    if not rows:
        return 0
    pivots, _ = _ffge(rows)
    return len(pivots)


def in_span(vector, basis):
    r = rank_rational(list(basis))
    return rank_rational(list(basis) + [vector]) == r


def span_equal(vs1, vs2):
    r1 = rank_rational(list(vs1))
    r2 = rank_rational(list(vs2))
    if r1 != r2:
        return False
    return rank_rational(list(vs1) + list(vs2)) == r1


class SpanSolver:
    """Expresses vectors in a fixed independent basis, exactly and fast.

    Picks coordinate positions where the basis matrix has full rank, inverts
    that square block once; candidate coefficients are then verified against
    the whole vector, so the answer is exact.
    """

    def __init__(self, basis):
        self.basis = [tuple(QQ(x) for x in v) for v in basis]
        self.dim = len(self.basis)
        if self.dim == 0:
            self._pivot_coords = []
            self._inv = []
            return
        n = len(self.basis[0])
        pivots, _ = rref_dense([list(v) for v in self.basis], n)
        if len(pivots) != self.dim:
            raise ValueError("basis vectors are dependent")
        self._pivot_coords = pivots
        # block[j][i] = basis_i at pivot coordinate j; solves block @ x = v[P]
        block = [[self.basis[i][c] for i in range(self.dim)] for c in pivots]
        self._inv = invert_matrix_field(block)
        self._nz = [
            tuple((j, x) for j, x in enumerate(v) if x) for v in self.basis
        ]

    def express(self, vector):
        """Coefficients of vector in the basis, or None if not in the span."""
        if self.dim == 0:
            return [] if not any(vector) else None
        rhs = [QQ(vector[c]) for c in self._pivot_coords]
        coeffs = []
        for i in range(self.dim):
            s = QQ0
            for j in range(self.dim):
                if rhs[j]:
                    s += self._inv[i][j] * rhs[j]
            coeffs.append(s)
        # verify sparsely: basis vectors are mostly zeros in our uses
        acc = {}
        for i, c in enumerate(coeffs):
            if not c:
                continue
            for j, x in self._nz[i]:
                s = acc.get(j, QQ0) + c * x
                if s:
                    acc[j] = s
                else:
                    acc.pop(j, None)
        for j, x in enumerate(vector):
            if acc.pop(j, QQ0) != QQ(x):
                return None
        if acc:
            return None
        return coeffs


class ComplexSpanSolver:
    """SpanSolver over QQi: complex coefficients in a fixed independent basis."""

    def __init__(self, basis):
        self.basis = [tuple(QQi(0) + x for x in v) for v in basis]
        self.dim = len(self.basis)
        if self.dim == 0:
            self._pivot_coords = []
            self._inv = []
            return
        n = len(self.basis[0])
        pivots, _ = rref_dense([list(v) for v in self.basis], n)
        if len(pivots) != self.dim:
            raise ValueError("basis vectors are dependent")
        self._pivot_coords = pivots
        block = [[self.basis[i][c] for i in range(self.dim)] for c in pivots]
        self._inv = invert_matrix_field(block)

    def express(self, vector):
        if self.dim == 0:
            return [] if not any(vector) else None
        rhs = [QQi(0) + vector[c] for c in self._pivot_coords]
        coeffs = []
        for i in range(self.dim):
            s = QQi(0)
            for j in range(self.dim):
                if rhs[j]:
                    s = s + self._inv[i][j] * rhs[j]
            coeffs.append(s)
        n = len(self.basis[0])
        for j in range(n):
            s = QQi(0)
            for i, c in enumerate(coeffs):
                if c and self.basis[i][j]:
                    s = s + c * self.basis[i][j]
            if s != QQi(0) + vector[j]:
                return None
        return coeffs


# --- hermitian signature --------------------------------------------------------


def hermitian_signature(mat):
    """Exact (n_pos, n_neg, n_zero) of a hermitian matrix over QQi.

    Congruence diagonalization; when every remaining diagonal entry vanishes,
    a nonzero off-diagonal pair is folded onto the diagonal first
    (e_k := e_k + s e_l with s = M[k][l] gives the new diagonal 2|M[k][l]|^2).
    """
    n = len(mat)
    M = [[QQi(0) + mat[i][j] for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if M[i][j] != M[j][i].conj():
                raise ValueError("matrix is not hermitian")
    npos = nneg = nzero = 0
    for k in range(n):
        if not M[k][k]:
            swap = next((l for l in range(k + 1, n) if M[l][l]), None)
            if swap is not None:
                for j in range(n):
                    M[k][j], M[swap][j] = M[swap][j], M[k][j]
                for i in range(n):
                    M[i][k], M[i][swap] = M[i][swap], M[i][k]
            else:
                l = next((l for l in range(k + 1, n) if M[k][l]), None)
                if l is None:
                    nzero += 1
                    continue
                s = M[k][l]
                sc = s.conj()
                for j in range(n):
                    if M[l][j]:
                        M[k][j] = M[k][j] + s * M[l][j]
                for i in range(n):
                    if M[i][l]:
                        M[i][k] = M[i][k] + sc * M[i][l]
        d = M[k][k]
        if not d:
            nzero += 1
            continue
        if not d.is_real():
            raise AssertionError("diagonal of a hermitian congruence must be real")
        if d.re > 0:
            npos += 1
        else:
            nneg += 1
        for i in range(n):
            if i == k or not M[i][k]:
                continue
            f = M[i][k] / d
            fc = f.conj()
            for j in range(n):
                if M[k][j]:
                    M[i][j] = M[i][j] - f * M[k][j]
            for r in range(n):
                if M[r][k]:
                    M[r][i] = M[r][i] - fc * M[r][k]
    return npos, nneg, nzero
