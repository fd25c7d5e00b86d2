"""Finite-dimensional unital *-algebras over the Gaussian rationals.

An algebra is stored by structure constants: mult[i][j] is the coordinate
vector of e_i e_j.  The involution is conjugate-linear and kept as a matrix
S with x* = S conj(x) in coordinates, so conjugate-linearity is mechanical.
Elements are plain tuples of QQi coordinates.

The associative flag is advisory rather than a hard invariant: the
octonion container reuses this storage with associative=False, and the
only things the geometric code consumes are bilinearity of the product
and the conjugation rule.
"""

from __future__ import annotations

from .errors import InvalidTwist, NotInvertible
from .linear import (
    ComplexRowsBuilder,
    nullspace,
    real_system_from_rational_rows,
    solve_dense,
)
from .rationals import QQ, QQ0, QQ1
from .scalars import QQi, qi

QI0 = QQi(0)
QI1 = QQi(1)


def _freeze_vec(v):
    return tuple(QI0 + x for x in v)


def _freeze_mat(m):
    return tuple(_freeze_vec(r) for r in m)


class StarAlgebra:
    """Unital algebra with conjugate-linear involution, in coordinates."""

    def __init__(self, dim, mult, unit, star, associative=True, label=None):
        self.dim = dim
        self.mult = tuple(_freeze_mat(plane) for plane in mult)
        self.unit = _freeze_vec(unit)
        self.star_matrix = _freeze_mat(star)
        self.associative = associative
        self.label = label
        self._validate()

    # -- element arithmetic ----------------------------------------------------

    def zero(self):
        return (QI0,) * self.dim

    def basis(self, i):
        return tuple(QI1 if j == i else QI0 for j in range(self.dim))

    def scalar(self, c):
        c = c if isinstance(c, QQi) else QQi(c)
        return tuple(c * u for u in self.unit)

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def smul(self, c, x):
        c = c if isinstance(c, QQi) else QQi(c)
        return tuple(c * a for a in x)

    def mul(self, x, y):
        out = [QI0] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            plane = self.mult[i]
            for j, yj in enumerate(y):
                if not yj:
                    continue
                c = xi * yj
                row = plane[j]
                for k, ck in enumerate(row):
                    if ck:
                        out[k] = out[k] + c * ck
        return tuple(out)

    def star_of(self, x):
        xc = [a.conj() for a in x]
        return tuple(
            sum((row[j] * xc[j] for j in range(self.dim) if xc[j]), QI0)
            for row in self.star_matrix
        )

    def is_selfadjoint(self, x):
        return self.star_of(x) == tuple(x)

    def left_mult_matrix(self, a):
        """Matrix of x -> a x on coordinates (columns are a*e_j)."""
        cols = [self.mul(a, self.basis(j)) for j in range(self.dim)]
        return [[cols[j][k] for j in range(self.dim)] for k in range(self.dim)]

    def right_mult_matrix(self, a):
        cols = [self.mul(self.basis(j), a) for j in range(self.dim)]
        return [[cols[j][k] for j in range(self.dim)] for k in range(self.dim)]

    # -- construction-time checks ----------------------------------------------

    def _validate(self):
        d = self.dim
        for i in range(d):
            b = self.basis(i)
            if self.mul(self.unit, b) != b or self.mul(b, self.unit) != b:
                raise ValueError("unit laws fail on basis")
        if self.star_of(self.unit) != self.unit:
            raise ValueError("unit is not selfadjoint")
        for i in range(d):
            b = self.basis(i)
            if self.star_of(self.star_of(b)) != b:
                raise ValueError("involution is not involutive")
        for i in range(d):
            for j in range(d):
                lhs = self.star_of(self.mul(self.basis(i), self.basis(j)))
                rhs = self.mul(self.star_of(self.basis(j)), self.star_of(self.basis(i)))
                if lhs != rhs:
                    raise ValueError("involution is not anti-multiplicative")
        if self.associative:
            for i in range(d):
                bi = self.basis(i)
                for j in range(d):
                    p = self.mul(bi, self.basis(j))
                    for k in range(d):
                        bk = self.basis(k)
                        if self.mul(p, bk) != self.mul(bi, self.mul(self.basis(j), bk)):
                            raise ValueError("product is not associative")

    def __repr__(self):
        tag = self.label or "star-algebra"
        return f"<{tag} dim={self.dim}{'' if self.associative else ' non-assoc'}>"


# --- constructors --------------------------------------------------------------


def make_complex():
    return StarAlgebra(1, [[[QI1]]], [QI1], [[QI1]], label="C")


def make_matrix_algebra(m):
    """Full matrix algebra with the conjugate-transpose involution."""
    if m < 1:
        raise ValueError("m must be positive")
    d = m * m

    def idx(a, b):
        return a * m + b

    mult = [[[QI0] * d for _ in range(d)] for _ in range(d)]
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for e in range(m):
                    if b == c:
                        mult[idx(a, b)][idx(c, e)][idx(a, e)] = QI1
    unit = [QI0] * d
    for a in range(m):
        unit[idx(a, a)] = QI1
    star = [[QI0] * d for _ in range(d)]
    for a in range(m):
        for b in range(m):
            star[idx(b, a)][idx(a, b)] = QI1
    return StarAlgebra(d, mult, unit, star, label=f"M{m}")


def make_product(A, B):
    """Direct product with componentwise involution."""
    d = A.dim + B.dim
    mult = [[[QI0] * d for _ in range(d)] for _ in range(d)]
    for i in range(A.dim):
        for j in range(A.dim):
            for k, c in enumerate(A.mult[i][j]):
                mult[i][j][k] = c
    for i in range(B.dim):
        for j in range(B.dim):
            for k, c in enumerate(B.mult[i][j]):
                mult[A.dim + i][A.dim + j][A.dim + k] = c
    unit = list(A.unit) + list(B.unit)
    star = [[QI0] * d for _ in range(d)]
    for i in range(A.dim):
        for j in range(A.dim):
            star[i][j] = A.star_matrix[i][j]
    for i in range(B.dim):
        for j in range(B.dim):
            star[A.dim + i][A.dim + j] = B.star_matrix[i][j]
    label = f"({A.label}x{B.label})" if A.label and B.label else None
    return StarAlgebra(d, mult, unit, star, A.associative and B.associative, label)


def make_swap_product(A):
    """A x A with the swapped involution (a,b)* = (b*, a*)."""
    P = make_product(A, A)
    d = P.dim
    star = [[QI0] * d for _ in range(d)]
    for i in range(A.dim):
        for j in range(A.dim):
            star[i][A.dim + j] = A.star_matrix[i][j]
            star[A.dim + i][j] = A.star_matrix[i][j]
    label = f"({A.label}x{A.label} swap)" if A.label else None
    return StarAlgebra(d, P.mult, P.unit, star, A.associative, label)


def make_tensor(A, B):
    """Tensor product: (a@b)(c@d) = ac@bd, (a@b)* = a*@b*."""
    dA, dB = A.dim, B.dim
    d = dA * dB

    def idx(i, j):
        return i * dB + j

    mult = [[[QI0] * d for _ in range(d)] for _ in range(d)]
    for i1 in range(dA):
        for j1 in range(dB):
            r = idx(i1, j1)
            for i2 in range(dA):
                ca = A.mult[i1][i2]
                for j2 in range(dB):
                    cb = B.mult[j1][j2]
                    col = mult[r][idx(i2, j2)]
                    for ka, va in enumerate(ca):
                        if not va:
                            continue
                        for kb, vb in enumerate(cb):
                            if vb:
                                col[idx(ka, kb)] = va * vb
    unit = [QI0] * d
    for ka, va in enumerate(A.unit):
        for kb, vb in enumerate(B.unit):
            unit[idx(ka, kb)] = va * vb
    star = [[QI0] * d for _ in range(d)]
    for i1 in range(dA):
        for i2 in range(dA):
            sa = A.star_matrix[i1][i2]
            if not sa:
                continue
            for j1 in range(dB):
                for j2 in range(dB):
                    sb = B.star_matrix[j1][j2]
                    if sb:
                        star[idx(i1, j1)][idx(i2, j2)] = sa * sb
    label = f"({A.label}@{B.label})" if A.label and B.label else None
    return StarAlgebra(d, mult, unit, star, A.associative and B.associative, label)


def make_dual_numbers():
    """C[eps]/(eps^2) with eps* = eps; the smallest algebra with radical."""
    mult = [
        [[QI1, QI0], [QI0, QI1]],
        [[QI0, QI1], [QI0, QI0]],
    ]
    return StarAlgebra(2, mult, [QI1, QI0], [[QI1, QI0], [QI0, QI1]], label="dual")


def twist_involution(A, alpha):
    """Replace the involution by x -> alpha x* alpha^{-1}.

    alpha must be selfadjoint for the existing involution and invertible;
    all algebra invariants are re-validated on the result.
    """
    alpha = _freeze_vec(alpha)
    if A.star_of(alpha) != alpha:
        raise InvalidTwist("twisting element is not selfadjoint")
    try:
        alpha_inv = invert(A, alpha)
    except NotInvertible:
        raise InvalidTwist("twisting element is not invertible") from None
    star = [[QI0] * A.dim for _ in range(A.dim)]
    for j in range(A.dim):
        col = A.mul(A.mul(alpha, A.star_of(A.basis(j))), alpha_inv)
        for k in range(A.dim):
            star[k][j] = col[k]
    try:
        return StarAlgebra(A.dim, A.mult, A.unit, star, A.associative,
                           f"{A.label}-twisted" if A.label else None)
    except ValueError as exc:
        raise InvalidTwist(str(exc)) from None


def _cayley_dickson_double(mult, conj_signs):
    """One doubling step on a real structure-constant table.

    (a,b)(c,d) = (ac - conj(d) b, d a + b conj(c)), conj(a,b) = (conj a, -b).
    conj is a diagonal sign matrix in these bases, which the step preserves.
    """
    d = len(conj_signs)
    d2 = 2 * d

    def cmul(i, j):
        return mult[i][j]

    out = [[[QQ0] * d2 for _ in range(d2)] for _ in range(d2)]
    for i in range(d2):
        for j in range(d2):
            a, b = (i, None) if i < d else (None, i - d)
            c, dd = (j, None) if j < d else (None, j - d)
            tgt = out[i][j]
            if a is not None and c is not None:
                for k, v in enumerate(cmul(a, c)):
                    tgt[k] += v
            if a is not None and dd is not None:
                # d a lands in the second slot
                for k, v in enumerate(cmul(dd, a)):
                    tgt[d + k] += v
            if b is not None and c is not None:
                # b conj(c) lands in the second slot
                for k, v in enumerate(cmul(b, c)):
                    tgt[d + k] += v * conj_signs[c]
            if b is not None and dd is not None:
                # -conj(d) b lands in the first slot
                for k, v in enumerate(cmul(dd, b)):
                    tgt[k] -= v * conj_signs[dd]
    signs = list(conj_signs) + [QQ(-1)] * d
    return out, signs


def make_octonion_container():
    """Complexified octonions as a non-associative container algebra.

    Three doubling steps from the reals; the involution is octonion
    conjugation (a diagonal sign matrix composed with coordinate
    conjugation).  Used by the exceptional 16-dimensional quadric.
    """
    mult = [[[QQ1]]]
    signs = [QQ1]
    for _ in range(3):
        mult, signs = _cayley_dickson_double(mult, signs)
    d = 8
    cmult = [[[qi(mult[i][j][k]) for k in range(d)] for j in range(d)] for i in range(d)]
    unit = [QI1] + [QI0] * (d - 1)
    star = [[QI0] * d for _ in range(d)]
    for i in range(d):
        star[i][i] = qi(signs[i])
    return StarAlgebra(d, cmult, unit, star, associative=False, label="O")


# --- subspaces ------------------------------------------------------------------


def selfadjoint_basis(A):
    """Real basis of the selfadjoint part {x : x* = x}.

    Splitting x = u + iv with real u, v and S = S_re + i S_im, the fixed-point
    equation becomes (I - S_re) u - S_im v = 0 and S_im u - (I + S_re) v = 0.
    The real dimension always equals the complex dimension of A, which is
    asserted as a structural check.
    """
    d = A.dim
    S = A.star_matrix
    rows = []
    for i in range(d):
        r1 = [QQ0] * (2 * d)
        r2 = [QQ0] * (2 * d)
        r1[2 * i] = QQ1
        r2[2 * i + 1] = QQ1
        for j in range(d):
            r1[2 * j] -= S[i][j].re
            r1[2 * j + 1] -= S[i][j].im
            r2[2 * j] -= S[i][j].im
            r2[2 * j + 1] += S[i][j].re
        rows.append(r1)
        rows.append(r2)
    sysm = real_system_from_rational_rows(rows, 2 * d)
    basis = [
        tuple(QQi(v[2 * i], v[2 * i + 1]) for i in range(d))
        for v in nullspace(sysm, method="exact")
    ]
    if len(basis) != d:
        raise ValueError("selfadjoint part has wrong dimension; involution is broken")
    return basis


def i_selfadjoint_basis(A):
    imag = qi(0, 1)
    return [tuple(imag * c for c in v) for v in selfadjoint_basis(A)]


def invert(A, a):
    """Two-sided inverse of a, by solving ab = e and checking ba = e."""
    L = A.left_mult_matrix(a)
    try:
        [b] = solve_dense(L, [list(A.unit)], A.dim)
    except ValueError:
        raise NotInvertible("element has no inverse") from None
    b = tuple(b)
    if A.mul(a, b) != tuple(A.unit) or A.mul(b, a) != tuple(A.unit):
        raise NotInvertible("element has no two-sided inverse")
    return b


def derivations(A):
    """Real basis of der(A,*): complex-linear D with
    D(a c*) = D(a) c* + a D(c)* on all basis pairs.

    The unknown matrix enters linearly through D and conj(D) (the involution
    is conjugate-linear), so each coordinate of each pair gives one complex
    row over the d^2 entries of D.
    """
    d = A.dim
    b = ComplexRowsBuilder(d * d)

    def u(p, q):
        return p * d + q

    stars = [A.star_of(A.basis(j)) for j in range(d)]
    right_by_star = [[A.mul(A.basis(p), stars[j]) for p in range(d)] for j in range(d)]
    left_by_star = [[A.mul(A.basis(i), stars[p]) for p in range(d)] for i in range(d)]
    for i in range(d):
        for j in range(d):
            prod = A.mul(A.basis(i), stars[j])
            for k in range(d):
                key = (i, j, k)
                for p in range(d):
                    # D(prod)_k = sum_p prod_p D[k][p]
                    if prod[p]:
                        b.add(key, u(k, p), lin=prod[p])
                    # -(D e_i) e_j*: (D e_i)_p = D[p][i]
                    v = right_by_star[j][p][k]
                    if v:
                        b.add(key, u(p, i), lin=-v)
                    # -e_i (D e_j)*: conjugate-linear in D through the star
                    t = left_by_star[i][p][k]
                    if t:
                        b.add(key, u(p, j), conj=-t)
    basis = []
    for vec in nullspace(b.build()):
        D = [[QQi(vec[2 * u(p, q)], vec[2 * u(p, q) + 1]) for q in range(d)] for p in range(d)]
        basis.append(tuple(tuple(r) for r in D))
    return basis


def apply_endo(D, x):
    return tuple(
        sum((D[k][j] * x[j] for j in range(len(x)) if x[j]), QI0) for k in range(len(x))
    )


# --- matrices over an algebra ----------------------------------------------------

# A^{m x n} matrices are tuples of tuples of elements; these helpers are what
# the matrix-model quadrics and their birational maps consume.


def mat_zero(A, m, n):
    return tuple(tuple(A.zero() for _ in range(n)) for _ in range(m))


def mat_unit(A, m):
    return tuple(
        tuple(A.scalar(1) if i == j else A.zero() for j in range(m)) for i in range(m)
    )


def mat_add(A, X, Y):
    return tuple(tuple(A.add(x, y) for x, y in zip(rx, ry)) for rx, ry in zip(X, Y))


def mat_sub(A, X, Y):
    return tuple(tuple(A.sub(x, y) for x, y in zip(rx, ry)) for rx, ry in zip(X, Y))


def mat_neg(A, X):
    return tuple(tuple(A.smul(-1, x) for x in row) for row in X)


def mat_mul(A, X, Y):
    m, k = len(X), len(Y)
    n = len(Y[0]) if Y else 0
    out = []
    for i in range(m):
        row = []
        for j in range(n):
            s = A.zero()
            for l in range(k):
                s = A.add(s, A.mul(X[i][l], Y[l][j]))
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def mat_star(A, X):
    """(X*)_{ij} = (X_{ji})*: conjugate-transpose over the algebra."""
    m = len(X)
    n = len(X[0]) if X else 0
    return tuple(tuple(A.star_of(X[j][i]) for j in range(m)) for i in range(n))


def mat_smul(A, c, X):
    return tuple(tuple(A.smul(c, x) for x in row) for row in X)


def mat_inv(A, X):
    """Inverse of a square matrix over A via one linear solve plus checks.

    Solves X Y = 1 coordinate-wise over the complex field and verifies
    Y X = 1, so it is meaningful even when A is only alternative.
    """
    m = len(X)
    d = A.dim
    n = m * m * d
    # unknowns: vec(Y), Y[l][j] an algebra element
    rows = [[QI0] * n for _ in range(n)]
    rhs = [QI0] * n
    unit = mat_unit(A, m)
    for i in range(m):
        for j in range(m):
            for l in range(m):
                L = A.left_mult_matrix(X[i][l])
                for k in range(d):
                    r = (i * m + j) * d + k
                    for q in range(d):
                        if L[k][q]:
                            rows[r][(l * m + j) * d + q] = rows[r][(l * m + j) * d + q] + L[k][q]
    for i in range(m):
        for j in range(m):
            for k in range(d):
                rhs[(i * m + j) * d + k] = unit[i][j][k]
    try:
        [y] = solve_dense(rows, [rhs], n)
    except ValueError:
        raise NotInvertible("matrix over the algebra is singular") from None
    Y = tuple(
        tuple(tuple(y[(l * m + j) * d + k] for k in range(d)) for j in range(m))
        for l in range(m)
    )
    if mat_mul(A, X, Y) != unit or mat_mul(A, Y, X) != unit:
        raise NotInvertible("matrix over the algebra has no two-sided inverse")
    return Y


def mat_embed(A, scalar_matrix):
    """Scalar matrix -> matrix over A via c -> c e."""
    return tuple(tuple(A.scalar(c) for c in row) for row in scalar_matrix)
