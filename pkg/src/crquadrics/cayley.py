"""Generalized spheres z alpha z* = 1 and their Cayley correspondence.

A sphere lives in E = A^{m x r} with a hermitian invertible alpha carrying
at least m positive eigenvalues.  When alpha splits as 1_m x beta the sphere
is birationally equivalent to the quadric x + x* = y beta y* through

    kappa(x, y)      = (1 - x)^{-1} (1 + x, sqrt2 y)
    kappa^{-1}(x, y) = (x + 1)^{-1} (x - 1, sqrt2 y)

and everything here stays exact by working over Q(i, sqrt2).  The sphere's
own symmetry algebra is solved for directly (independently of the quadric
side) and split into k (+) p by the squared adjoint of i z d/dz.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import (
    CertificationError,
    InvalidForm,
    InvalidParameter,
    NotInvertible,
    SingularPoint,
)
from .linear import (
    ComplexRowsBuilder,
    SpanSolver,
    hermitian_signature,
    nullspace,
    nullspace_field_dense,
    rank_rational,
    rref_dense,
)
from .poly import Poly, PolyRing
from .quadric import make_matrix_quadric, tensor_quadric
from .rationals import QQ
from .scalars import QQi, Sqrt2Ext, qi
from .star_algebra import mat_add, mat_inv, mat_mul, mat_star, mat_sub, mat_unit

SQRT2 = Sqrt2Ext(0, 1)
QI0 = QQi(0)
QI1 = QQi(1)


def _scale(c, M):
    """Entrywise scalar multiple of a matrix over A; works across Q(i, sqrt2)."""
    return tuple(tuple(tuple(c * a for a in e) for e in row) for row in M)


def _embed(A, cmat):
    """Complex matrix -> matrix over A with entries c * unit."""
    return tuple(
        tuple(tuple(c * u for u in A.unit) for c in row) for row in cmat
    )


# --- sphere specification -------------------------------------------------------


@dataclass
class SphereSpec:
    """E = A^{m x r} together with the form defining z alpha z* = 1.

    beta is the lower-right block when alpha splits as 1_m x beta, None
    otherwise; the quadric correspondence is only available for the split
    form, membership and the tangency solver work for any valid alpha.
    """

    A: object
    m: int
    r: int
    n: int
    alpha: tuple
    beta: tuple | None


def make_sphere(A, m, r, alpha):
    if not (r > m >= 1):
        raise InvalidParameter("need r > m >= 1")
    alpha = tuple(tuple(qi(c) for c in row) for row in alpha)
    if len(alpha) != r or any(len(row) != r for row in alpha):
        raise InvalidForm("alpha must be r x r")
    for i in range(r):
        for j in range(r):
            if alpha[i][j] != alpha[j][i].conj():
                raise InvalidForm("alpha must be hermitian")
    pos, _, zero = hermitian_signature(alpha)
    if zero:
        raise InvalidForm("alpha must be invertible")
    if pos < m:
        raise InvalidForm(f"alpha needs at least {m} positive eigenvalues")
    n = r - m
    split = True
    for i in range(m):
        for j in range(r):
            if j < m and alpha[i][j] != (QI1 if i == j else QI0):
                split = False
            if j >= m and (alpha[i][j] or alpha[j][i]):
                split = False
    beta = (
        tuple(tuple(alpha[m + i][m + j] for j in range(n)) for i in range(n))
        if split
        else None
    )
    return SphereSpec(A, m, r, n, alpha, beta)


def sphere_join(S, x, y):
    """Assemble the split pair (x, y) into the full m x r matrix."""
    return tuple(tuple(xr) + tuple(yr) for xr, yr in zip(x, y))


def sphere_split(S, z):
    x = tuple(row[: S.m] for row in z)
    y = tuple(row[S.m :] for row in z)
    return x, y


def sphere_contains(S, z):
    """Exact membership z alpha z* = 1 for an m x r matrix over A."""
    A = S.A
    G = mat_mul(A, mat_mul(A, z, _embed(A, S.alpha)), mat_star(A, z))
    return G == mat_unit(A, S.m)


def sphere_quadric(S):
    """The quadric x + x* = y beta y* on the sphere's split coordinates."""
    if S.beta is None:
        raise InvalidForm("alpha must split as 1_m x beta")
    base = make_matrix_quadric(S.m, S.n, S.beta)
    if S.A.dim == 1:
        return base
    return tensor_quadric(base, S.A)


# --- the Cayley transform -------------------------------------------------------


def cayley(S, p):
    """kappa(x, y) = (1 - x)^{-1} (1 + x, sqrt2 y), sphere side to quadric side."""
    if S.beta is None:
        raise InvalidForm("alpha must split as 1_m x beta")
    x, y = p
    A = S.A
    one = mat_unit(A, S.m)
    try:
        inv = mat_inv(A, mat_sub(A, one, x))
    except NotInvertible:
        raise SingularPoint("1 - x is not invertible") from None
    return (
        mat_mul(A, inv, mat_add(A, one, x)),
        mat_mul(A, inv, _scale(SQRT2, y)),
    )


def cayley_inverse(S, p):
    """kappa^{-1}(x, y) = (x + 1)^{-1} (x - 1, sqrt2 y)."""
    if S.beta is None:
        raise InvalidForm("alpha must split as 1_m x beta")
    x, y = p
    A = S.A
    one = mat_unit(A, S.m)
    try:
        inv = mat_inv(A, mat_add(A, x, one))
    except NotInvertible:
        raise SingularPoint("x + 1 is not invertible") from None
    return (
        mat_mul(A, inv, mat_sub(A, x, one)),
        mat_mul(A, inv, _scale(SQRT2, y)),
    )


def _model_pair(Q, point):
    return Q.model.w_to_mat(point[0]), Q.model.z_to_mat(point[1])


def sphere_to_quadric_check(S, count=50, rng=None):
    """Transport exact samples both ways across kappa and verify membership.

    Sphere samples are kappa^{-1} images of exact quadric samples, so sphere
    membership, quadric membership of the return image and the round trip
    are all checked on the nose.
    """
    Q = sphere_quadric(S)
    A = S.A
    rng = rng or random.Random(0x5EA)
    beta_mat = _embed(A, S.beta)
    report = {"checked": 0, "skipped": 0, "failures": []}
    tries = 0
    while report["checked"] < count and tries < 8 * count + 40:
        tries += 1
        pt = Q.random_point(rng)
        pair = _model_pair(Q, pt)
        try:
            s = cayley_inverse(S, pair)
        except SingularPoint:
            report["skipped"] += 1
            continue
        if not sphere_contains(S, sphere_join(S, *s)):
            report["failures"].append(("sphere membership", pt))
        back = cayley(S, s)
        wq, zq = back
        lhs = mat_add(A, wq, mat_star(A, wq))
        rhs = mat_mul(A, mat_mul(A, zq, beta_mat), mat_star(A, zq))
        if lhs != rhs:
            report["failures"].append(("quadric membership", pt))
        if back != pair:
            report["failures"].append(("round trip", pt))
        report["checked"] += 1
    if not report["checked"]:
        raise SingularPoint("no regular samples found")
    report["ok"] = not report["failures"]
    return report


def sigma_identity_check(Q, count=50, rng=None):
    """(w, z) -> (w^{-1}, -w^{-1} z) as the Cayley conjugate of -id.

    Needs the square-matrix model with beta = 1; both sides are evaluated
    at exact regular samples and compared entry by entry.
    """
    model = Q.model
    if model is None or model.j_twist is not None:
        raise InvalidForm("needs the square-matrix quadric model")
    A, m, n = model.A, model.m, model.n
    if model.beta != mat_unit(A, n):
        raise InvalidForm("needs beta = 1")
    ident = tuple(
        tuple(QI1 if i == j else QI0 for j in range(m + n)) for i in range(m + n)
    )
    S = make_sphere(A, m, m + n, ident)
    rng = rng or random.Random(0xCA11E)
    minus = qi(-1)
    report = {"checked": 0, "skipped": 0, "mismatches": []}
    tries = 0
    while report["checked"] < count and tries < 8 * count + 40:
        tries += 1
        pt = Q.random_point(rng)
        wm, zm = _model_pair(Q, pt)
        try:
            winv = mat_inv(A, wm)
            ball = cayley_inverse(S, (wm, zm))
            image = cayley(S, (_scale(minus, ball[0]), _scale(minus, ball[1])))
        except (NotInvertible, SingularPoint):
            report["skipped"] += 1
            continue
        direct = (winv, mat_mul(A, _scale(minus, winv), zm))
        if image != direct:
            report["mismatches"].append(pt)
        report["checked"] += 1
    if not report["checked"]:
        raise SingularPoint("no regular samples found")
    report["ok"] = not report["mismatches"]
    return report


# --- polynomial fields on E -----------------------------------------------------


def sphere_ring(S):
    """Coordinate ring of E: one complex variable per matrix entry coordinate,
    entry (i, j) of A-coordinate k sitting at index (i*r + j)*dim(A) + k."""
    return PolyRing([f"z{i}" for i in range(S.m * S.r * S.A.dim)])


class SphereField:
    """Holomorphic polynomial field sum p_nu(z) d/dz_nu on E."""

    __slots__ = ("ring", "comp")

    def __init__(self, ring, comp):
        self.ring = ring
        self.comp = tuple(comp)

    @classmethod
    def zero(cls, ring):
        z = ring.zero()
        return cls(ring, (z,) * ring.nvars)

    def __add__(self, other):
        return SphereField(self.ring, tuple(a + b for a, b in zip(self.comp, other.comp)))

    def __sub__(self, other):
        return SphereField(self.ring, tuple(a - b for a, b in zip(self.comp, other.comp)))

    def __neg__(self):
        return SphereField(self.ring, tuple(-a for a in self.comp))

    def smul(self, c):
        return SphereField(self.ring, tuple(p * c for p in self.comp))

    def bracket(self, other):
        names = self.ring.names
        out = []
        for nu in range(len(self.comp)):
            acc = self.ring.zero()
            for mu, name in enumerate(names):
                if self.comp[mu] and other.comp[nu]:
                    acc = acc + self.comp[mu] * other.comp[nu].diff(name)
                if other.comp[mu] and self.comp[nu]:
                    acc = acc - other.comp[mu] * self.comp[nu].diff(name)
            out.append(acc)
        return SphereField(self.ring, out)

    def eval_at(self, coords):
        return tuple(p.eval_at(coords) for p in self.comp)

    def degree(self):
        return max(p.degree() for p in self.comp)

    def is_zero(self):
        return all(p.is_zero() for p in self.comp)

    def is_linear(self):
        """Vanishes at 0 and has degree at most one in every component."""
        return all(p.degree() <= 1 and not p.constant_term() for p in self.comp)

    def coeff_vector(self, monos=None):
        """Realified coefficients over the degree-<=2 monomial enumeration."""
        monos = monos if monos is not None else self.ring.monomials_up_to_degree(2)
        pos = {e: i for i, e in enumerate(monos)}
        out = []
        for p in self.comp:
            row = [QQ(0)] * (2 * len(monos))
            for e, c in p.terms.items():
                row[2 * pos[e]] = c.re
                row[2 * pos[e] + 1] = c.im
            out.extend(row)
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, SphereField):
            return NotImplemented
        return self.ring == other.ring and self.comp == other.comp

    def __repr__(self):
        bits = [f"({p!r}) dz{i}" for i, p in enumerate(self.comp) if p]
        return " + ".join(bits) if bits else "0"


def delta_field(S):
    """The rotation i z d/dz whose squared adjoint separates k from p."""
    ring = sphere_ring(S)
    imag = qi(0, 1)
    return SphereField(ring, tuple(ring.var(n) * imag for n in ring.names))


def p_field(S, a):
    """The tangent field (a - z alpha a* z) d/dz attached to a in A^{m x r}."""
    A, m, r = S.A, S.m, S.r
    if len(a) != m or any(len(row) != r for row in a):
        raise InvalidParameter("a must be an m x r matrix over A")
    sym = _Symbols(S)
    P = _p_symbolic(sym, a)
    ring = sphere_ring(S)
    comp = []
    for i in range(m):
        for j in range(r):
            for k in range(A.dim):
                comp.append(_strip(sym, ring, P[i][j][k]))
    return SphereField(ring, comp)


def p_tangency_identity(S, a):
    """Applying the field to z alpha z* - 1 factors through the defect:

        p alpha z* + z alpha p* = (1 - z alpha z*) a alpha z*
                                  + z alpha a* (1 - z alpha z*)

    checked as an exact identity of coordinate polynomials."""
    A, m, r = S.A, S.m, S.r
    sym = _Symbols(S)
    P = _p_symbolic(sym, a)
    zstar = sym.mstar(sym.zmat)
    Pstar = sym.mstar(P)
    residual = sym.madd(
        sym.mmul(sym.mmul(P, sym.alpha), zstar),
        sym.mmul(sym.mmul(sym.zmat, sym.alpha), Pstar),
    )
    aconst = tuple(tuple(sym.const(e) for e in row) for row in a)
    astar = tuple(
        tuple(sym.const(e) for e in row) for row in mat_star(A, a)
    )
    u = sym.msub(sym.unit(m), sym.mmul(sym.mmul(sym.zmat, sym.alpha), zstar))
    factored = sym.madd(
        sym.mmul(sym.mmul(sym.mmul(u, aconst), sym.alpha), zstar),
        sym.mmul(sym.mmul(sym.zmat, sym.alpha), sym.mmul(astar, u)),
    )
    return residual == factored


# --- symbolic arithmetic over A with polynomial coordinates ----------------------


class _Symbols:
    """z, conj(z) and alpha as matrices over A with coordinate polynomials.

    The ring has independent variables z_nu and zb_nu; formal conjugation
    swaps them and conjugates coefficients.
    """

    def __init__(self, S):
        self.S = S
        A, m, r, d = S.A, S.m, S.r, S.A.dim
        N = m * r * d
        self.N = N
        self.ring = PolyRing(
            [f"z{i}" for i in range(N)] + [f"zb{i}" for i in range(N)]
        )
        self.perm = [N + i for i in range(N)] + list(range(N))
        gens = self.ring.gens()
        self.zmat = tuple(
            tuple(
                tuple(gens[(i * r + j) * d + k] for k in range(d))
                for j in range(r)
            )
            for i in range(m)
        )
        self.alpha = tuple(
            tuple(self.const(A.smul(S.alpha[i][j], A.unit)) for j in range(r))
            for i in range(r)
        )

    def const(self, elem):
        return tuple(self.ring.const(c) for c in elem)

    def unit(self, m):
        A = self.S.A
        zero = self.const(A.zero())
        one = self.const(A.unit)
        return tuple(
            tuple(one if i == j else zero for j in range(m)) for i in range(m)
        )

    def emul(self, x, y):
        A = self.S.A
        out = [self.ring.zero()] * A.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            plane = A.mult[i]
            for j, yj in enumerate(y):
                if not yj:
                    continue
                p = xi * yj
                for k, c in enumerate(plane[j]):
                    if c:
                        out[k] = out[k] + p * c
        return tuple(out)

    def eadd(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def esub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def estar(self, x):
        A = self.S.A
        conj = [p.conj_swap(self.perm) for p in x]
        out = []
        for row in A.star_matrix:
            acc = self.ring.zero()
            for j, c in enumerate(row):
                if c and conj[j]:
                    acc = acc + conj[j] * c
            out.append(acc)
        return tuple(out)

    def mmul(self, X, Y):
        A = self.S.A
        zero = self.const(A.zero())
        out = []
        for i in range(len(X)):
            row = []
            for j in range(len(Y[0])):
                s = zero
                for l in range(len(Y)):
                    s = self.eadd(s, self.emul(X[i][l], Y[l][j]))
                row.append(s)
            out.append(tuple(row))
        return tuple(out)

    def mstar(self, X):
        m = len(X)
        n = len(X[0])
        return tuple(
            tuple(self.estar(X[j][i]) for j in range(m)) for i in range(n)
        )

    def madd(self, X, Y):
        return tuple(
            tuple(self.eadd(x, y) for x, y in zip(rx, ry))
            for rx, ry in zip(X, Y)
        )

    def msub(self, X, Y):
        return tuple(
            tuple(self.esub(x, y) for x, y in zip(rx, ry))
            for rx, ry in zip(X, Y)
        )

    def defect(self):
        """Coordinate polynomials of z alpha z* - 1."""
        G = self.mmul(self.mmul(self.zmat, self.alpha), self.mstar(self.zmat))
        return self.msub(G, self.unit(self.S.m))


def _p_symbolic(sym, a):
    A = sym.S.A
    aconst = tuple(tuple(sym.const(e) for e in row) for row in a)
    astar = tuple(tuple(sym.const(e) for e in row) for row in mat_star(A, a))
    quad = sym.mmul(
        sym.mmul(sym.mmul(sym.zmat, sym.alpha), astar), sym.zmat
    )
    return sym.msub(aconst, quad)


def _strip(sym, ring, p):
    """Carry a conjugate-free polynomial of the mixed ring down to the z-ring."""
    N = sym.N
    terms = {}
    for e, c in p.terms.items():
        if any(e[N:]):
            raise InvalidForm("polynomial involves conjugated variables")
        terms[e[:N]] = c
    return Poly(ring, terms)


# --- the symmetry algebra of the sphere -------------------------------------------


def sphere_hol(S, method="auto", backend=None):
    """Exact basis of the degree-<=2 polynomial fields tangent to the sphere.

    A candidate p(z) d/dz is tangent when p alpha z* + z alpha p* vanishes
    on the sphere; vanishing is certified by writing the residual as a
    combination of the defining entries with degree-one multipliers, which
    keeps every returned field exactly tangent.  For scalars A = C with
    m = 1 the residual ideal is principal and division by the single
    generator bounds the multiplier degree, so the basis is also complete.
    """
    sym = _Symbols(S)
    A, m, r, d = S.A, S.m, S.r, S.A.dim
    N = sym.N
    zring = sphere_ring(S)
    monos = zring.monomials_up_to_degree(2)
    M = len(monos)
    nfield = N * M
    ncoord = m * m * d
    mult_monos = 1 + 2 * N
    builder = ComplexRowsBuilder(nfield + ncoord * ncoord * mult_monos)

    alpha_zstar = sym.mmul(sym.alpha, sym.mstar(sym.zmat))  # r x m
    z_alpha = sym.mmul(sym.zmat, sym.alpha)  # m x r
    zero = sym.ring.zero()

    u = 0
    for i0 in range(m):
        for j0 in range(r):
            for c0 in range(d):
                for e in monos:
                    mono = sym.ring.monomial(tuple(e) + (0,) * N)
                    x = tuple(mono if k == c0 else zero for k in range(d))
                    xs = sym.estar(x)
                    for l in range(m):
                        t1 = sym.emul(x, alpha_zstar[j0][l])
                        for t, p in enumerate(t1):
                            for ee, val in p.terms.items():
                                builder.add((i0, l, t, ee), u, lin=val)
                    for k in range(m):
                        t2 = sym.emul(z_alpha[k][j0], xs)
                        for t, p in enumerate(t2):
                            for ee, val in p.terms.items():
                                builder.add((k, i0, t, ee), u, conj=val)
                    u += 1

    g = sym.defect()
    mult_vars = [None] + list(sym.ring.gens())
    v = nfield
    for k in range(m):
        for l in range(m):
            for t in range(d):
                for i in range(m):
                    for j in range(m):
                        for c2 in range(d):
                            gp = g[i][j][c2]
                            for mv in mult_vars:
                                prod = gp if mv is None else gp * mv
                                for ee, val in prod.terms.items():
                                    builder.add((k, l, t, ee), v, lin=-val)
                                v += 1

    kern = nullspace(builder.build(), method=method, backend=backend)
    rows = []
    for vec in kern:
        row = [QQ(x) for x in vec[: 2 * nfield]]
        if any(row):
            rows.append(row)
    if not rows:
        return []
    pivots, reduced = rref_dense(rows, 2 * nfield)
    basis = []
    for i in range(len(pivots)):
        row = reduced[i]
        comps = [dict() for _ in range(N)]
        for nu in range(N):
            for e_idx, e in enumerate(monos):
                pos = nu * M + e_idx
                re, im = row[2 * pos], row[2 * pos + 1]
                if re or im:
                    comps[nu][tuple(e)] = QQi(re, im)
        basis.append(SphereField(zring, tuple(Poly(zring, t) for t in comps)))
    return basis


def k_p_decompose(S, fields=None):
    """Split the sphere algebra by the squared adjoint of i z d/dz.

    k is the 0-eigenspace (the fields vanishing at the origin, all linear)
    and p the -1-eigenspace spanned by the quadratic a-fields; their
    dimensions must exhaust the input."""
    fields = sphere_hol(S) if fields is None else list(fields)
    if not fields:
        return [], []
    monos = fields[0].ring.monomials_up_to_degree(2)
    vecs = [f.coeff_vector(monos) for f in fields]
    solver = SpanSolver(vecs)
    delta = delta_field(S)
    cols = []
    for f in fields:
        c = solver.express(delta.bracket(f).coeff_vector(monos))
        if c is None:
            raise CertificationError("bracket with i z d/dz left the span")
        cols.append(c)
    nb = len(fields)
    M2 = [
        [
            sum((cols[j][t] * cols[t][i] for t in range(nb)), QQ(0))
            for j in range(nb)
        ]
        for i in range(nb)
    ]
    k_comb = nullspace_field_dense([list(r) for r in M2], nb)
    shifted = [
        [M2[i][j] + (QQ(1) if i == j else QQ(0)) for j in range(nb)]
        for i in range(nb)
    ]
    p_comb = nullspace_field_dense(shifted, nb)
    if len(k_comb) + len(p_comb) != nb:
        raise CertificationError(
            "squared adjoint does not split into the 0 and -1 eigenspaces"
        )

    def combine(comb):
        out = SphereField.zero(fields[0].ring)
        for c, f in zip(comb, fields):
            if c:
                out = out + f.smul(c)
        return out

    return [combine(c) for c in k_comb], [combine(c) for c in p_comb]


def origin_rank(fields):
    """Real rank of evaluation at 0; on p it must reach the full 2 m r dim(A)."""
    rows = []
    for f in fields:
        row = []
        for p in f.comp:
            c = p.constant_term()
            row.extend((c.re, c.im))
        rows.append(row)
    return rank_rational(rows)
