"""Standard quadrics w + conj_W(w) = h(z, z) in exact coordinates.

A quadric is stored by its structure tensor h (one W-coordinate vector per
pair of Z-basis vectors, linear in the first slot and conjugate-linear in
the second), the conjugation matrix C of W (conj_W(w) = C conj(w) in
coordinates), and a real basis of the fixed-point space V.  Families with a
matrix realization additionally carry a MatrixModel so birational maps can
be evaluated by actual matrix arithmetic over the coefficient algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidForm, InvalidParameter
from .linear import (
    ComplexSpanSolver,
    hermitian_signature,
    invert_matrix_field,
    nullspace,
    nullspace_field_dense,
    rank_rational,
    real_system_from_rational_rows,
    span_equal,
)
from .rationals import QQ, QQ1, rand_rational
from .scalars import QQi, qi, qi_rand
from .star_algebra import (
    make_complex,
    make_octonion_container,
    mat_mul,
    mat_star,
    mat_unit,
    selfadjoint_basis,
)

QI0 = QQi(0)
QI1 = QQi(1)


def _realify(vectors):
    """QQi coordinate vectors -> interleaved (re, im) rational vectors."""
    out = []
    for v in vectors:
        row = []
        for c in v:
            row.append(c.re)
            row.append(c.im)
        out.append(tuple(row))
    return out


class MatrixModel:
    """Matrix realization: w an m x m matrix over A constrained to span(w_basis),
    z an m x n matrix over A, and h(z, z') = z beta (z')* (plus the optional
    transpose twist X -> X + j X' j^{-1} used by the even orthogonal family).
    """

    def __init__(self, A, m, n, beta, w_basis, j_twist=None):
        self.A = A
        self.m = m
        self.n = n
        self.beta = beta
        self.w_basis = list(w_basis)
        self.j_twist = j_twist
        if j_twist is not None:
            self._j_inv = _scalar_mat_inv(A, j_twist)
        flat = [self._flatten(M) for M in self.w_basis]
        self._span = ComplexSpanSolver(flat)

    def _flatten(self, M):
        out = []
        for row in M:
            for entry in row:
                out.extend(entry)
        return tuple(out)

    # -- coordinates <-> matrices ---------------------------------------------

    def w_to_mat(self, coords):
        d = self.A.dim
        acc = [[list(self.A.zero()) for _ in range(self.m)] for _ in range(self.m)]
        for c, M in zip(coords, self.w_basis):
            if not c:
                continue
            for a in range(self.m):
                for b in range(self.m):
                    for r in range(d):
                        if M[a][b][r]:
                            acc[a][b][r] = acc[a][b][r] + c * M[a][b][r]
        return tuple(tuple(tuple(e) for e in row) for row in acc)

    def mat_to_w(self, mat):
        """Coordinates of a matrix in the w-basis; None when outside the span."""
        return self._span.express(self._flatten(mat))

    def z_to_mat(self, coords):
        d = self.A.dim
        return tuple(
            tuple(
                tuple(coords[(a * self.n + c) * d + r] for r in range(d))
                for c in range(self.n)
            )
            for a in range(self.m)
        )

    def mat_to_z(self, mat):
        out = []
        for a in range(self.m):
            for c in range(self.n):
                out.extend(mat[a][c])
        return tuple(out)

    # -- matrix arithmetic ------------------------------------------------------

    def transpose_twist(self, X):
        Xt = tuple(tuple(X[b][a] for b in range(self.m)) for a in range(self.m))
        return mat_mul(self.A, mat_mul(self.A, self.j_twist, Xt), self._j_inv)

    def h_mat(self, zm, z2m):
        X = mat_mul(self.A, mat_mul(self.A, zm, self.beta), mat_star(self.A, z2m))
        if self.j_twist is not None:
            add = self.transpose_twist(X)
            X = tuple(
                tuple(self.A.add(X[a][b], add[a][b]) for b in range(self.m))
                for a in range(self.m)
            )
        return X

    def unit_w(self):
        return mat_unit(self.A, self.m)


def _scalar_mat_inv(A, M):
    """Inverse of a matrix whose entries are scalar multiples of the unit,
    computed entrywise on the scalars (enough for the twist matrices here)."""
    rows = [[entry[0] for entry in row] for row in M]
    inv = invert_matrix_field(rows)
    return tuple(tuple(A.smul(c, A.unit) for c in row) for row in inv)


@dataclass
class Quadric:
    dim_w: int
    dim_z: int
    conj_w: tuple  # C with conj_W(w) = C conj(w)
    h: tuple  # h[i][j] = W-coords of h(z_i, z_j)
    v_basis: tuple  # real basis of V = {w : conj_W(w) = w}
    family: str = "custom"
    params: dict = field(default_factory=dict)
    model: MatrixModel | None = None

    # -- evaluation ---------------------------------------------------------------

    def conj_w_apply(self, w):
        return tuple(
            sum((row[j] * w[j].conj() for j in range(self.dim_w) if w[j]), QI0)
            for row in self.conj_w
        )

    def h_of(self, z1, z2):
        out = [QI0] * self.dim_w
        for i, a in enumerate(z1):
            if not a:
                continue
            hi = self.h[i]
            for j, b in enumerate(z2):
                if not b:
                    continue
                c = a * b.conj()
                for k, v in enumerate(hi[j]):
                    if v:
                        out[k] = out[k] + c * v
        return tuple(out)

    def contains(self, point):
        w, z = point
        lhs = tuple(a + b for a, b in zip(w, self.conj_w_apply(w)))
        return lhs == self.h_of(z, z)

    def random_point(self, rng):
        """w = h(z,z)/2 + t with random rational z and t in iV; exact by design."""
        z = tuple(qi_rand(rng) for _ in range(self.dim_z))
        half = qi(QQ(1, 2))
        w = [half * c for c in self.h_of(z, z)]
        imag = qi(0, 1)
        for v in self.v_basis:
            r = rand_rational(rng)
            if not r:
                continue
            for k in range(self.dim_w):
                if v[k]:
                    w[k] = w[k] + imag * r * v[k]
        return tuple(w), z

    def zero_point(self):
        return (QI0,) * self.dim_w, (QI0,) * self.dim_z

    # -- validation ------------------------------------------------------------------

    def validate(self):
        """Exact diagnostics for the structural conditions, each reported separately."""
        report = {}
        n, dw = self.dim_z, self.dim_w
        conj_c = [[self.conj_w[i][j].conj() for j in range(dw)] for i in range(dw)]
        invol = True
        for i in range(dw):
            for j in range(dw):
                s = QI0
                for k in range(dw):
                    if self.conj_w[i][k] and conj_c[k][j]:
                        s = s + self.conj_w[i][k] * conj_c[k][j]
                if s != (QI1 if i == j else QI0):
                    invol = False
        report["involution"] = invol

        fixed = all(self.conj_w_apply(v) == tuple(v) for v in self.v_basis)
        report["v_fixed"] = fixed and rank_rational(_realify(self.v_basis)) == len(self.v_basis)

        report["hermitian"] = all(
            self.conj_w_apply(self.h[i][j]) == tuple(self.h[j][i])
            for i in range(n)
            for j in range(n)
        )

        # non-degeneracy: h(z, e_j) = 0 for all j forces z = 0
        rows = []
        for j in range(n):
            for k in range(dw):
                rows.append([self.h[i][j][k] for i in range(n)])
        report["nondegenerate"] = nullspace_field_dense(rows, n) == []

        # minimality: the polarized values of h span V over the reals
        polarized = []
        for i in range(n):
            for j in range(i, n):
                s = tuple(a + b for a, b in zip(self.h[i][j], self.h[j][i]))
                d = tuple(qi(0, 1) * (a - b) for a, b in zip(self.h[i][j], self.h[j][i]))
                polarized.append(s)
                polarized.append(d)
        report["minimal"] = span_equal(_realify(polarized), _realify(self.v_basis))

        report["ok"] = all(report.values())
        return report

    def require_valid(self):
        rep = self.validate()
        if not rep["ok"]:
            bad = [k for k, v in rep.items() if k != "ok" and not v]
            raise InvalidForm(f"quadric fails structural checks: {', '.join(bad)}")
        return self

    def __repr__(self):
        return f"<quadric {self.family} codim {self.dim_w}, {self.dim_z} CR-directions>"


# --- builtin families ------------------------------------------------------------


def make_hyperquadric(n, k, check=True):
    """Hyperquadric with the signature-(k, n-k) Levi form on C^n."""
    if not (0 <= k <= n) or n < 1:
        raise InvalidParameter("need 0 <= k <= n, n >= 1")
    C = make_complex()
    beta = [[qi(1 if i == j and i < k else (-1 if i == j else 0)) for j in range(n)] for i in range(n)]
    h = tuple(
        tuple((beta[i][j],) for j in range(n))
        for i in range(n)
    )
    model = MatrixModel(
        C, 1, n,
        tuple(tuple((beta[i][j],) for j in range(n)) for i in range(n)),
        [(((QI1,),),)],
    )
    q = Quadric(
        dim_w=1,
        dim_z=n,
        conj_w=((QI1,),),
        h=h,
        v_basis=((QI1,),),
        family="ex",
        params={"n": n, "k": k},
        model=model,
    )
    return q.require_valid() if check else q


def make_matrix_quadric(m, n, beta, check=True):
    """w + w* = z beta z* on square-matrix w and m x n matrix z."""
    if m < 1 or n < 1:
        raise InvalidParameter("need m, n >= 1")
    beta = tuple(tuple(QI0 + c for c in row) for row in beta)
    if len(beta) != n or any(len(r) != n for r in beta):
        raise InvalidForm("beta must be n x n")
    for i in range(n):
        for j in range(n):
            if beta[i][j] != beta[j][i].conj():
                raise InvalidForm("beta must be hermitian")
    try:
        invert_matrix_field([list(r) for r in beta])
    except ValueError:
        raise InvalidForm("beta must be invertible") from None

    dw = m * m

    def widx(a, b):
        return a * m + b

    conj = [[QI0] * dw for _ in range(dw)]
    for a in range(m):
        for b in range(m):
            conj[widx(a, b)][widx(b, a)] = QI1
    h = [[None] * (m * n) for _ in range(m * n)]
    for a in range(m):
        for c in range(n):
            for a2 in range(m):
                for c2 in range(n):
                    vec = [QI0] * dw
                    vec[widx(a, a2)] = beta[c][c2]
                    h[a * n + c][a2 * n + c2] = tuple(vec)
    v_basis = []
    for a in range(m):
        vec = [QI0] * dw
        vec[widx(a, a)] = QI1
        v_basis.append(tuple(vec))
    for a in range(m):
        for b in range(a + 1, m):
            vec = [QI0] * dw
            vec[widx(a, b)] = QI1
            vec[widx(b, a)] = QI1
            v_basis.append(tuple(vec))
            vec = [QI0] * dw
            vec[widx(a, b)] = qi(0, 1)
            vec[widx(b, a)] = qi(0, -1)
            v_basis.append(tuple(vec))

    C = make_complex()
    w_mats = []
    for a in range(m):
        for b in range(m):
            M = [[(QI0,) for _ in range(m)] for _ in range(m)]
            M[a][b] = (QI1,)
            w_mats.append(tuple(tuple(r) for r in M))
    model = MatrixModel(C, m, n, tuple(tuple((c,) for c in row) for row in beta), w_mats)
    q = Quadric(
        dim_w=dw,
        dim_z=m * n,
        conj_w=tuple(tuple(r) for r in conj),
        h=tuple(tuple(r) for r in h),
        v_basis=tuple(v_basis),
        family="ey",
        params={"m": m, "n": n, "beta": beta},
        model=model,
    )
    return q.require_valid() if check else q


def tensor_quadric(Q, A, check=True):
    """Tensor a quadric with a *-algebra: h~(x@a, y@b) = h(x,y) @ a b*.

    Coordinates are ordered (base coordinate, algebra coordinate)
    lexicographically; conj_W~ = C @ S and V~ = V @ A_sa.
    """
    d = A.dim
    dw, dz = Q.dim_w * d, Q.dim_z * d
    conj = [[QI0] * dw for _ in range(dw)]
    for k in range(Q.dim_w):
        for k2 in range(Q.dim_w):
            c = Q.conj_w[k][k2]
            if not c:
                continue
            for r in range(d):
                for r2 in range(d):
                    s = A.star_matrix[r][r2]
                    if s:
                        conj[k * d + r][k2 * d + r2] = c * s
    stars = [A.star_of(A.basis(q)) for q in range(d)]
    pairs = [[A.mul(A.basis(p), stars[q]) for q in range(d)] for p in range(d)]
    h = [[None] * dz for _ in range(dz)]
    for i in range(Q.dim_z):
        for j in range(Q.dim_z):
            base = Q.h[i][j]
            for p in range(d):
                for q in range(d):
                    prod = pairs[p][q]
                    vec = [QI0] * dw
                    for k in range(Q.dim_w):
                        if base[k]:
                            for r in range(d):
                                if prod[r]:
                                    vec[k * d + r] = base[k] * prod[r]
                    h[i * d + p][j * d + q] = tuple(vec)
    sa = selfadjoint_basis(A)
    v_basis = []
    for v in Q.v_basis:
        for s in sa:
            vec = [QI0] * dw
            for k in range(Q.dim_w):
                if v[k]:
                    for r in range(d):
                        if s[r]:
                            vec[k * d + r] = v[k] * s[r]
            v_basis.append(tuple(vec))

    model = None
    if Q.model is not None and Q.model.A.dim == 1:
        base = Q.model
        beta = tuple(
            tuple(A.smul(entry[0], A.unit) for entry in row) for row in base.beta
        )
        w_mats = []
        for M in base.w_basis:
            for r in range(d):
                er = A.basis(r)
                w_mats.append(
                    tuple(
                        tuple(A.smul(entry[0], er) for entry in row) for row in M
                    )
                )
        j_twist = None
        if base.j_twist is not None:
            j_twist = tuple(
                tuple(A.smul(entry[0], A.unit) for entry in row) for row in base.j_twist
            )
        model = MatrixModel(A, base.m, base.n, beta, w_mats, j_twist)

    q = Quadric(
        dim_w=dw,
        dim_z=dz,
        conj_w=tuple(tuple(r) for r in conj),
        h=tuple(tuple(r) for r in h),
        v_basis=tuple(v_basis),
        family="tensor",
        params={"base": Q, "algebra": A},
        model=model,
    )
    return q.require_valid() if check else q


def make_tensored_heisenberg(A, check=True):
    """The quadric w + w* = z z* with w, z ranging over the algebra A."""
    return tensor_quadric(make_hyperquadric(1, 1, check=False), A, check=check)


def product_quadric(Q1, Q2, check=True):
    if Q1.dim_w == 0 or Q1.dim_z == 0 or Q2.dim_w == 0 or Q2.dim_z == 0:
        raise InvalidParameter("product factors must have positive dimensions")
    dw = Q1.dim_w + Q2.dim_w
    dz = Q1.dim_z + Q2.dim_z
    conj = [[QI0] * dw for _ in range(dw)]
    for i in range(Q1.dim_w):
        for j in range(Q1.dim_w):
            conj[i][j] = Q1.conj_w[i][j]
    for i in range(Q2.dim_w):
        for j in range(Q2.dim_w):
            conj[Q1.dim_w + i][Q1.dim_w + j] = Q2.conj_w[i][j]
    zero = (QI0,) * dw
    h = [[zero] * dz for _ in range(dz)]
    for i in range(Q1.dim_z):
        for j in range(Q1.dim_z):
            h[i][j] = tuple(Q1.h[i][j]) + (QI0,) * Q2.dim_w
    for i in range(Q2.dim_z):
        for j in range(Q2.dim_z):
            h[Q1.dim_z + i][Q1.dim_z + j] = (QI0,) * Q1.dim_w + tuple(Q2.h[i][j])
    v_basis = [tuple(v) + (QI0,) * Q2.dim_w for v in Q1.v_basis]
    v_basis += [(QI0,) * Q1.dim_w + tuple(v) for v in Q2.v_basis]
    q = Quadric(
        dim_w=dw,
        dim_z=dz,
        conj_w=tuple(tuple(r) for r in conj),
        h=tuple(tuple(r) for r in h),
        v_basis=tuple(v_basis),
        family="product",
        params={"factors": (Q1, Q2)},
    )
    return q.require_valid() if check else q


def make_type_II(m, check=True):
    """The even family: w + w* = zz* + (zz*)^J on the J-fixed matrix space.

    With j the standard symplectic matrix and w^J := j w' j^{-1} (transpose,
    no conjugation), the space W = {w : w^J = w} consists of the matrices
    w = B j^{-1} with B antisymmetric, so dim W = m(m-1)/2.
    """
    if m < 4 or m % 2:
        raise InvalidParameter("m must be even and at least 4")
    half = m // 2
    C = make_complex()

    jmat = [[QI0] * m for _ in range(m)]
    for a in range(half):
        jmat[a][half + a] = QI1
        jmat[half + a][a] = qi(-1)
    jinv = [[-c for c in row] for row in jmat]  # j^2 = -I

    def smul_mat(X, Y):
        return [
            [sum((X[a][c] * Y[c][b] for c in range(m)), QI0) for b in range(m)]
            for a in range(m)
        ]

    w_mats_scalar = []
    for a in range(m):
        for b in range(a + 1, m):
            B = [[QI0] * m for _ in range(m)]
            B[a][b] = QI1
            B[b][a] = qi(-1)
            w_mats_scalar.append(smul_mat(B, jinv))
    dw = len(w_mats_scalar)

    def lift(M):
        return tuple(tuple((M[a][b],) for b in range(m)) for a in range(m))

    model = MatrixModel(
        C, m, 1,
        (((QI1,),),),
        [lift(M) for M in w_mats_scalar],
        j_twist=lift(jmat),
    )

    # conjugation: w -> w* expressed in the chosen w-basis
    conj_cols = []
    for M in w_mats_scalar:
        Mstar = [[M[b][a].conj() for b in range(m)] for a in range(m)]
        coords = model.mat_to_w(lift(Mstar))
        if coords is None:
            raise InvalidForm("w-space is not closed under conjugate transpose")
        conj_cols.append(coords)
    conj = tuple(tuple(conj_cols[j][i] for j in range(dw)) for i in range(dw))

    # h[i][j]: the matrix e_i e_j* + (e_i e_j*)^J in w-coordinates
    h = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            X = [[QI0] * m for _ in range(m)]
            X[i][j] = QI1
            XJ = smul_mat(smul_mat(jmat, [[X[b][a] for b in range(m)] for a in range(m)]), jinv)
            S = [[X[a][b] + XJ[a][b] for b in range(m)] for a in range(m)]
            coords = model.mat_to_w(lift(S))
            if coords is None:
                raise InvalidForm("h values leave the w-space")
            h[i][j] = tuple(coords)

    # V: selfadjoint elements of W, via w-coordinates fixed by the conjugation
    fix_rows = []
    for i in range(dw):
        # x - C conj(x) = 0, realified
        r1 = [QQ(0)] * (2 * dw)
        r2 = [QQ(0)] * (2 * dw)
        r1[2 * i] = QQ1
        r2[2 * i + 1] = QQ1
        for jj in range(dw):
            r1[2 * jj] -= conj[i][jj].re
            r1[2 * jj + 1] -= conj[i][jj].im
            r2[2 * jj] -= conj[i][jj].im
            r2[2 * jj + 1] += conj[i][jj].re
        fix_rows.append(r1)
        fix_rows.append(r2)
    sysm = real_system_from_rational_rows(fix_rows, 2 * dw)
    v_basis = tuple(
        tuple(QQi(v[2 * i], v[2 * i + 1]) for i in range(dw))
        for v in nullspace(sysm, method="exact")
    )

    q = Quadric(
        dim_w=dw,
        dim_z=m,
        conj_w=conj,
        h=tuple(tuple(r) for r in h),
        v_basis=v_basis,
        family="type2",
        params={"m": m},
        model=model,
    )
    return q.require_valid() if check else q


def make_type_V(check=True):
    """The exceptional 16-dimensional quadric over the complexified octonions."""
    O = make_octonion_container()
    d = O.dim
    conj = O.star_matrix  # octonion conjugation; real diagonal here
    stars = [O.star_of(O.basis(j)) for j in range(d)]
    h = tuple(
        tuple(O.mul(O.basis(i), stars[j]) for j in range(d)) for i in range(d)
    )
    # fixed points of w -> C conj(w) with C = diag(1, -1, ..., -1)
    v_basis = [tuple(O.unit)]
    imag = qi(0, 1)
    for k in range(1, d):
        v_basis.append(tuple(imag if i == k else QI0 for i in range(d)))
    model = MatrixModel(
        O, 1, 1,
        ((tuple(O.unit),),),
        [((O.basis(r),),) for r in range(d)],
    )
    q = Quadric(
        dim_w=d,
        dim_z=d,
        conj_w=conj,
        h=h,
        v_basis=tuple(v_basis),
        family="type5",
        params={},
        model=model,
    )
    return q.require_valid() if check else q


# --- structural comparison ---------------------------------------------------------


def permute_quadric(Q, perm_w, perm_z):
    """Reindex coordinates: new index p maps to old index perm[p]."""
    dw, dz = Q.dim_w, Q.dim_z
    conj = tuple(
        tuple(Q.conj_w[perm_w[i]][perm_w[j]] for j in range(dw)) for i in range(dw)
    )
    h = tuple(
        tuple(
            tuple(Q.h[perm_z[i]][perm_z[j]][perm_w[k]] for k in range(dw))
            for j in range(dz)
        )
        for i in range(dz)
    )
    v_basis = tuple(tuple(v[perm_w[k]] for k in range(dw)) for v in Q.v_basis)
    return Quadric(dw, dz, conj, h, v_basis, Q.family, dict(Q.params), None)


def structure_equal(Q1, Q2, perm_w=None, perm_z=None):
    """Exact equality of structure tensors, after an explicit reindexing of Q1.

    The V comparison is span-based since a real form has no preferred basis.
    """
    if perm_w is not None or perm_z is not None:
        Q1 = permute_quadric(
            Q1,
            perm_w or list(range(Q1.dim_w)),
            perm_z or list(range(Q1.dim_z)),
        )
    if (Q1.dim_w, Q1.dim_z) != (Q2.dim_w, Q2.dim_z):
        return False
    if Q1.conj_w != Q2.conj_w or Q1.h != Q2.h:
        return False
    return span_equal(_realify(Q1.v_basis), _realify(Q2.v_basis))


def levi_signature(Q):
    """Signature data of the scalar form tr-ish pairing; only for dim_w = 1."""
    if Q.dim_w != 1:
        raise InvalidParameter("scalar Levi signature needs one-dimensional W")
    mat = [[Q.h[i][j][0] for j in range(Q.dim_z)] for i in range(Q.dim_z)]
    return hermitian_signature(mat)
