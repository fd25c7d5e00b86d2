"""Explicit automorphisms of a quadric and the exponential of its nilpotent halves.

Three kinds of element: translations (w,z) -> (w + a + h(z,b), z + b), their
gamma-conjugates (w,z) -> (e + wa + z beta c*)^-1 (w, z + wc) with the closed
matrix formula, and linear maps (w,z) -> (fw, gz) constrained by
f h(z,z') = h(gz, gz').  Constructors validate before returning: the linear
condition is checked exactly on polarized basis pairs, translations get a
full symbolic check against the defining equation, and every element ends
with a sampled membership audit.  exp carries each nilpotent half of hol(Q)
onto its group, with the step-2 BCH rule for products.
"""

from __future__ import annotations

import random

from .crvec import PolyVecField, field_space
from .errors import (
    InvalidGrading,
    InvalidParameter,
    NotInGLQ,
    NotInvertible,
    SingularPoint,
    UnsupportedFamily,
)
from .linear import ComplexRowsBuilder, invert_matrix_field, nullspace
from .rationals import QQ
from .scalars import QQi, qi
from .star_algebra import (
    apply_endo,
    derivations as algebra_derivations,
    invert,
    mat_add,
    mat_inv,
    mat_mul,
    mat_star,
    mat_sub,
    mat_unit,
)
from .symmetry import BirationalMap, Heisenberg, LinearMap, gamma, pushforward

QI0 = QQi(0)
QI1 = QQi(1)
HALF = qi(QQ(1, 2))


class GroupElement(BirationalMap):
    """A validated automorphism of Q: the raw map plus its parameters and the
    record of the membership audit run at construction."""

    def __init__(self, mapping, family, params, audit=None):
        super().__init__(mapping.quadric)
        self.mapping = mapping
        self.family = family
        self.params = params
        self.audit = audit

    def evaluate(self, point):
        return self.mapping.evaluate(point)

    def differential(self, point, tangent):
        return self.mapping.differential(point, tangent)

    def differential_operator(self, point):
        return self.mapping.differential_operator(point)

    def inverse(self):
        return _wrap(self.mapping.inverse())

    def __repr__(self):
        return f"<{self.family} element of Aut(Q)>"


def membership_audit(element, count=5, rng=None):
    """Push exact random Q-points through the map; every regular image must
    land back on Q.  Singular samples are skipped but counted."""
    Q = element.quadric
    rng = rng or random.Random(0xBEEF)
    checked = skipped = tries = 0
    while checked < count and tries < 8 * count + 40:
        tries += 1
        p = Q.random_point(rng)
        try:
            q = element.evaluate(p)
        except SingularPoint:
            skipped += 1
            continue
        if not Q.contains(q):
            raise InvalidParameter(
                f"{element.family} element left the quadric at an audit sample"
            )
        checked += 1
    if not checked:
        raise SingularPoint("no regular audit samples found")
    return {"checked": checked, "skipped": skipped}


def _wrap(mapping):
    if isinstance(mapping, Heisenberg):
        return GroupElement(mapping, "heisenberg", {"a": mapping.a, "b": mapping.b})
    if isinstance(mapping, GPlus):
        return GroupElement(mapping, "gplus", {"a": mapping.a, "c": mapping.c})
    if isinstance(mapping, LinearMap):
        return GroupElement(mapping, "linear", {"f": mapping.F, "g": mapping.G})
    raise InvalidParameter("not a recognized group element map")


# --- symbolic membership ------------------------------------------------------


def _symbolic_membership(Q, w_polys, z_polys):
    """Exact identity check that a polynomial map sends all of Q into Q: the
    defining residual of the image vanishes on the graph parameterization."""
    sp = field_space(Q)
    rr = sp.rring

    def push(p, conjugate):
        out = rr.zero()
        for e, c in p.terms.items():
            cc = c.conj() if conjugate else c
            out = out + sp.substitute_monomial(e, conjugate=conjugate) * cc
        return out

    W = [push(p, False) for p in w_polys]
    Wb = [push(p, True) for p in w_polys]
    Z = [push(p, False) for p in z_polys]
    Zb = [push(p, True) for p in z_polys]
    for k in range(Q.dim_w):
        res = W[k]
        for l in range(Q.dim_w):
            c = Q.conj_w[k][l]
            if c:
                res = res + Wb[l] * c
        for i in range(Q.dim_z):
            if Z[i].is_zero():
                continue
            for j in range(Q.dim_z):
                c = Q.h[i][j][k]
                if c and not Zb[j].is_zero():
                    res = res - Z[i] * Zb[j] * c
        if not res.is_zero():
            return False
    return True


def _heis_polys(Q, m):
    sp = field_space(Q)
    r = sp.ring
    wps = []
    for k in range(Q.dim_w):
        p = r.var(f"w{k}") + r.const(m.a[k])
        for i in range(Q.dim_z):
            c = sum((Q.h[i][j][k] * m.b[j].conj() for j in range(Q.dim_z) if m.b[j]), QI0)
            if c:
                p = p + r.var(f"z{i}") * c
        wps.append(p)
    zps = [r.var(f"z{i}") + r.const(m.b[i]) for i in range(Q.dim_z)]
    return wps, zps


# --- the negative half: translations ---------------------------------------------


def heisenberg(Q, point):
    """Translation by the quadric point (a, b).

    Validated twice: symbolically (the image of the generic on-Q point
    satisfies the defining equation identically) and at sampled points.
    """
    a, b = point
    mapping = Heisenberg(Q, tuple(a), tuple(b))
    if not _symbolic_membership(Q, *_heis_polys(Q, mapping)):
        raise InvalidParameter("translation fails the defining identity")
    el = _wrap(mapping)
    el.audit = membership_audit(el)
    el.audit["symbolic"] = True
    return el


def transitive_element(Q, p, q):
    """The unique translation with p -> q: solve for (a, b), then verify."""
    p = (tuple(p[0]), tuple(p[1]))
    q = (tuple(q[0]), tuple(q[1]))
    if not (Q.contains(p) and Q.contains(q)):
        raise InvalidParameter("both endpoints must lie on the quadric")
    b = tuple(x - y for x, y in zip(q[1], p[1]))
    hz = Q.h_of(p[1], b)
    a = tuple(wq - wp - h for wq, wp, h in zip(q[0], p[0], hz))
    el = heisenberg(Q, (a, b))
    if el.evaluate(p) != q:
        raise InvalidParameter("no translation maps p to q")
    return el


# --- the positive half -------------------------------------------------------------


class GPlus(BirationalMap):
    """(w, z) -> (e + wa + z beta c*)^-1 (w, z + wc): the gamma-conjugate of
    the translation by (a, c), as a closed formula on the matrix model."""

    family = "gplus"

    def __init__(self, Q, a, c):
        model = Q.model
        if model is None or model.j_twist is not None or not model.A.associative:
            raise UnsupportedFamily(
                "the positive half needs an untwisted associative matrix model"
            )
        super().__init__(Q)
        self.a = tuple(a)
        self.c = tuple(c)
        if not Q.contains((self.a, self.c)):
            raise InvalidParameter("parameter is not on the quadric")
        A = model.A
        self._am = model.w_to_mat(self.a)
        self._cm = model.z_to_mat(self.c)
        self._bcstar = mat_mul(A, model.beta, mat_star(A, self._cm))

    def _frame(self, point):
        model = self.quadric.model
        A = model.A
        wm = model.w_to_mat(point[0])
        zm = model.z_to_mat(point[1])
        S = mat_add(
            A,
            mat_unit(A, model.m),
            mat_add(A, mat_mul(A, wm, self._am), mat_mul(A, zm, self._bcstar)),
        )
        try:
            Sinv = mat_inv(A, S)
        except NotInvertible as exc:
            raise SingularPoint(str(exc)) from None
        return wm, zm, Sinv

    def evaluate(self, point):
        model = self.quadric.model
        A = model.A
        wm, zm, Sinv = self._frame(point)
        wc = model.mat_to_w(mat_mul(A, Sinv, wm))
        if wc is None:
            raise SingularPoint("image leaves the admissible w-space")
        znum = mat_add(A, zm, mat_mul(A, wm, self._cm))
        return tuple(wc), model.mat_to_z(mat_mul(A, Sinv, znum))

    def differential(self, point, tangent):
        return self.differential_operator(point)(tangent)

    def differential_operator(self, point):
        model = self.quadric.model
        A = model.A
        wm, zm, Sinv = self._frame(point)
        X = mat_mul(A, Sinv, wm)
        Y = mat_mul(A, Sinv, mat_add(A, zm, mat_mul(A, wm, self._cm)))

        def apply(tangent):
            dwm = model.w_to_mat(tangent[0])
            dzm = model.z_to_mat(tangent[1])
            dS = mat_add(A, mat_mul(A, dwm, self._am), mat_mul(A, dzm, self._bcstar))
            dW = mat_mul(A, Sinv, mat_sub(A, dwm, mat_mul(A, dS, X)))
            num = mat_add(A, dzm, mat_mul(A, dwm, self._cm))
            dZ = mat_mul(A, Sinv, mat_sub(A, num, mat_mul(A, dS, Y)))
            wc = model.mat_to_w(dW)
            if wc is None:
                raise SingularPoint("derivative leaves the admissible w-space")
            return tuple(wc), model.mat_to_z(dZ)

        return apply

    def inverse(self):
        # conjugation by gamma is a group isomorphism, so the inverse has the
        # inverse translation's parameters
        hcc = self.quadric.h_of(self.c, self.c)
        a_inv = tuple(h - a for h, a in zip(hcc, self.a))
        return GPlus(self.quadric, a_inv, tuple(-c for c in self.c))


def gplus(Q, point):
    """The origin-fixing unipotent element with parameters (a, c) on Q."""
    a, c = point
    el = _wrap(GPlus(Q, a, c))
    el.audit = membership_audit(el)
    el.audit["symbolic"] = False
    return el


# --- linear elements ------------------------------------------------------------


def linear_element(Q, f, g):
    """(w, z) -> (fw, gz), admitted exactly when f intertwines h with g.

    The two closure conditions are f h(z,z') = h(gz, gz') on all basis pairs
    and compatibility with the conjugation of W; together they are equivalent
    to preservation of the defining equation, so no sampling is involved in
    the accept/reject decision.
    """
    F = tuple(tuple(QI0 + c for c in row) for row in f)
    G = tuple(tuple(QI0 + c for c in row) for row in g)
    if len(F) != Q.dim_w or any(len(r) != Q.dim_w for r in F):
        raise InvalidParameter("f must be dim_w x dim_w")
    if len(G) != Q.dim_z or any(len(r) != Q.dim_z for r in G):
        raise InvalidParameter("g must be dim_z x dim_z")
    try:
        invert_matrix_field([list(r) for r in F])
        invert_matrix_field([list(r) for r in G])
    except ValueError:
        raise NotInGLQ("the matrices must be invertible") from None
    C = Q.conj_w
    for k in range(Q.dim_w):
        for l in range(Q.dim_w):
            lhs = sum((F[k][j] * C[j][l] for j in range(Q.dim_w) if C[j][l]), QI0)
            rhs = sum(
                (C[k][j] * F[j][l].conj() for j in range(Q.dim_w) if C[k][j]), QI0
            )
            if lhs != rhs:
                raise NotInGLQ("f does not commute with the conjugation of W")
    for i in range(Q.dim_z):
        for j in range(Q.dim_z):
            for k in range(Q.dim_w):
                lhs = sum(
                    (F[k][l] * Q.h[i][j][l] for l in range(Q.dim_w) if Q.h[i][j][l]),
                    QI0,
                )
                rhs = QI0
                for p in range(Q.dim_z):
                    if not G[p][i]:
                        continue
                    for q in range(Q.dim_z):
                        c = Q.h[p][q][k]
                        if c and G[q][j]:
                            rhs = rhs + G[p][i] * G[q][j].conj() * c
                if lhs != rhs:
                    raise NotInGLQ("f h(z,z') = h(gz,gz') fails on a basis pair")
    el = _wrap(LinearMap(Q, F, G))
    el.audit = membership_audit(el)
    el.audit["symbolic"] = True
    return el


def _endo_matrix_checked(A, g):
    """Validate a coordinate matrix as a *-automorphism of A."""
    if g is None:
        return None
    G = tuple(tuple(QI0 + c for c in row) for row in g)
    if len(G) != A.dim or any(len(r) != A.dim for r in G):
        raise InvalidParameter("automorphism matrix must be dim x dim")
    try:
        invert_matrix_field([list(r) for r in G])
    except ValueError:
        raise InvalidParameter("the automorphism must be invertible") from None
    if apply_endo(G, A.unit) != tuple(A.unit):
        raise InvalidParameter("the automorphism must fix the unit")
    images = [apply_endo(G, A.basis(i)) for i in range(A.dim)]
    for i in range(A.dim):
        if apply_endo(G, A.star_of(A.basis(i))) != A.star_of(images[i]):
            raise InvalidParameter("the map must commute with the involution")
        for j in range(A.dim):
            if apply_endo(G, A.mul(A.basis(i), A.basis(j))) != A.mul(
                images[i], images[j]
            ):
                raise InvalidParameter("the map must be multiplicative")
    return G


def _endo_on_mat(A, g, M):
    if g is None:
        return M
    return tuple(tuple(apply_endo(g, e) for e in row) for row in M)


def b_element(Q, a, u, g=None):
    """(w, z) -> (a g(w) a*, a g(z) u) on a matrix-model quadric: a an
    invertible matrix over the algebra, u beta-unitary, g a *-automorphism
    applied entrywise.  Routed through linear_element for the exact check."""
    model = Q.model
    if model is None or model.j_twist is not None:
        raise UnsupportedFamily("needs an untwisted matrix model")
    A = model.A
    gm = _endo_matrix_checked(A, g)
    am = tuple(tuple(tuple(e) for e in row) for row in a)
    um = tuple(tuple(tuple(e) for e in row) for row in u)
    if len(am) != model.m or any(len(r) != model.m for r in am):
        raise InvalidParameter("a must be m x m over the algebra")
    if len(um) != model.n or any(len(r) != model.n for r in um):
        raise InvalidParameter("u must be n x n over the algebra")
    try:
        mat_inv(A, am)
    except NotInvertible:
        raise InvalidParameter("a must be invertible") from None
    if mat_mul(A, mat_mul(A, um, model.beta), mat_star(A, um)) != model.beta:
        raise InvalidParameter("u must satisfy u beta u* = beta")
    astar = mat_star(A, am)
    fcols = []
    for l in range(Q.dim_w):
        unit = tuple(QI1 if i == l else QI0 for i in range(Q.dim_w))
        E = _endo_on_mat(A, gm, model.w_to_mat(unit))
        col = model.mat_to_w(mat_mul(A, mat_mul(A, am, E), astar))
        if col is None:
            raise NotInGLQ("the map leaves the admissible w-space")
        fcols.append(col)
    F = tuple(tuple(fcols[l][k] for l in range(Q.dim_w)) for k in range(Q.dim_w))
    gcols = []
    for l in range(Q.dim_z):
        unit = tuple(QI1 if i == l else QI0 for i in range(Q.dim_z))
        E = _endo_on_mat(A, gm, model.z_to_mat(unit))
        gcols.append(model.mat_to_z(mat_mul(A, mat_mul(A, am, E), um)))
    G = tuple(tuple(gcols[l][i] for l in range(Q.dim_z)) for i in range(Q.dim_z))
    return linear_element(Q, F, G)


def dp_linear(Q, a, g=None):
    """(w, z) -> (a g(w) a*, a g(z)) on a quadric modeled on a single algebra."""
    model = Q.model
    if model is None or model.m != 1 or model.n != 1 or model.j_twist is not None:
        raise UnsupportedFamily("defined for quadrics modeled on one algebra")
    return b_element(Q, ((tuple(a),),), mat_unit(model.A, 1), g)


# --- the Lie algebra of the linear subgroup generated by b_element ------------------


def beta_unitary_lie(model):
    """Real basis of {delta : delta beta + beta delta* = 0} in A^{n x n},
    the Lie algebra of the beta-unitary group."""
    A, n, beta = model.A, model.n, model.beta
    d = A.dim
    b = ComplexRowsBuilder(n * n * d)

    def unk(p, q, r):
        return (p * n + q) * d + r

    stars = [A.star_of(A.basis(r)) for r in range(d)]
    for i in range(n):
        for j in range(n):
            for r in range(d):
                for q in range(n):
                    # (delta beta)[i][j] is linear in delta[i][q]
                    prod = A.mul(A.basis(r), beta[q][j])
                    for k in range(d):
                        if prod[k]:
                            b.add((i, j, k), unk(i, q, r), lin=prod[k])
                    # (beta delta*)[i][j] is conjugate-linear in delta[j][q]
                    prod = A.mul(beta[i][q], stars[r])
                    for k in range(d):
                        if prod[k]:
                            b.add((i, j, k), unk(j, q, r), conj=prod[k])
    out = []
    for vec in nullspace(b.build()):
        out.append(
            tuple(
                tuple(
                    tuple(
                        QQi(vec[2 * unk(p, q, r)], vec[2 * unk(p, q, r) + 1])
                        for r in range(d)
                    )
                    for q in range(n)
                )
                for p in range(n)
            )
        )
    return out


def b_element_lie_basis(Q):
    """Spanning fields for the one-parameter subgroups through b_element:
    (alpha w + w alpha*) dw + (alpha z) dz over a real basis of A^{m x m},
    the right actions z delta for delta in the beta-unitary Lie algebra, and
    the entrywise *-algebra derivations."""
    model = Q.model
    if model is None or model.j_twist is not None:
        raise UnsupportedFamily("needs an untwisted matrix model")
    A = model.A
    sp = field_space(Q)
    d = A.dim

    def linear_field(F, G):
        r = sp.ring
        wps = []
        for k in range(sp.dim_w):
            p = r.zero()
            if F is not None:
                for l in range(sp.dim_w):
                    if F[k][l]:
                        p = p + r.var(f"w{l}") * F[k][l]
            wps.append(p)
        zps = []
        for i in range(sp.dim_z):
            p = r.zero()
            for j in range(sp.dim_z):
                if G[i][j]:
                    p = p + r.var(f"z{j}") * G[i][j]
            zps.append(p)
        return PolyVecField(sp, wps, zps)

    def wmat_of(op):
        cols = []
        for l in range(Q.dim_w):
            unit = tuple(QI1 if i == l else QI0 for i in range(Q.dim_w))
            col = model.mat_to_w(op(model.w_to_mat(unit)))
            if col is None:
                raise UnsupportedFamily("operator leaves the admissible w-space")
            cols.append(col)
        return tuple(tuple(cols[l][k] for l in range(Q.dim_w)) for k in range(Q.dim_w))

    def zmat_of(op):
        cols = []
        for l in range(Q.dim_z):
            unit = tuple(QI1 if i == l else QI0 for i in range(Q.dim_z))
            cols.append(model.mat_to_z(op(model.z_to_mat(unit))))
        return tuple(tuple(cols[l][i] for l in range(Q.dim_z)) for i in range(Q.dim_z))

    fields = []
    for pi in range(model.m):
        for pj in range(model.m):
            for r in range(d):
                for scale in (QI1, qi(0, 1)):
                    alpha = tuple(
                        tuple(
                            A.smul(scale, A.basis(r)) if (ii, jj) == (pi, pj) else A.zero()
                            for jj in range(model.m)
                        )
                        for ii in range(model.m)
                    )
                    astar = mat_star(A, alpha)

                    def op_w(E, alpha=alpha, astar=astar):
                        return mat_add(A, mat_mul(A, alpha, E), mat_mul(A, E, astar))

                    def op_z(E, alpha=alpha):
                        return mat_mul(A, alpha, E)

                    fields.append(linear_field(wmat_of(op_w), zmat_of(op_z)))
    for delta in beta_unitary_lie(model):

        def op_u(E, delta=delta):
            return mat_mul(A, E, delta)

        fields.append(linear_field(None, zmat_of(op_u)))
    for D in algebra_derivations(A):

        def op_d(E, D=D):
            return tuple(tuple(apply_endo(D, e) for e in row) for row in E)

        fields.append(linear_field(wmat_of(op_d), zmat_of(op_d)))
    return [f for f in fields if not f.is_zero()]


# --- exponential and BCH -----------------------------------------------------------


def _negative_field(sp, a, b):
    Q = sp.quadric
    r = sp.ring
    wps = []
    for k in range(sp.dim_w):
        p = r.const(a[k])
        for i in range(sp.dim_z):
            c = sum((Q.h[i][j][k] * b[j].conj() for j in range(sp.dim_z) if b[j]), QI0)
            if c:
                p = p + r.var(f"z{i}") * c
        wps.append(p)
    zps = [r.const(b[i]) for i in range(sp.dim_z)]
    return PolyVecField(sp, wps, zps)


def _half(field):
    weights = set(field.grade_decompose())
    if not weights:
        return 0
    if weights <= {-2, -1}:
        return -1
    if weights <= {1, 2}:
        return 1
    raise InvalidGrading("field is not graded within one nilpotent half")


def exp_field(xi):
    """Time-1 flow of a field in a nilpotent half of hol(Q), as a group element.

    The negative half integrates in closed form to a translation; the
    positive half is carried over by gamma and comes back as a gplus element.
    """
    sp = xi.space
    Q = sp.quadric
    side = _half(xi)
    if side == 0:
        return heisenberg(Q, Q.zero_point())
    if side < 0:
        e0 = (0,) * sp.ring.nvars
        a = tuple(p.coeff(e0) for p in xi.w_comp)
        b = tuple(p.coeff(e0) for p in xi.z_comp)
        if xi != _negative_field(sp, a, b):
            raise InvalidParameter("field is not in the negative half of hol(Q)")
        hbb = Q.h_of(b, b)
        alpha = tuple(x + HALF * h for x, h in zip(a, hbb))
        return heisenberg(Q, (alpha, b))
    mirror = exp_field(pushforward(gamma(Q), xi))
    return gplus(Q, (mirror.params["a"], mirror.params["b"]))


def bch2(xi, eta):
    """xi + eta + [xi,eta]/2: exp(bch2(xi,eta)) is exp(xi) followed by exp(eta)."""
    if _half(xi) * _half(eta) < 0:
        raise InvalidGrading("fields lie in opposite nilpotent halves")
    return xi + eta + xi.bracket(eta).smul(HALF)
