"""Birational symmetries of quadrics and their action on polynomial fields.

The central example is gamma: (w, z) -> (w^-1, w^-1 z) on quadrics carrying a
matrix model; sigma additionally flips the sign of z.  Pushing a vector field
forward through such a map is done numerically-exactly: sample the identity
eta(m(p)) = dm(p) xi(p) at generic rational points, fit a degree-<=2 field by
exact interpolation, and verify the fit on held-out samples.  Polynomiality
of the result is a theorem only for fields tangent to the quadric, so failure
of the verification raises instead of returning garbage.
"""

from __future__ import annotations

import random

from .errors import (
    InvalidParameter,
    NeedMoreSamples,
    NotInvertible,
    NotPolynomialDeg2,
    SingularPoint,
    UnsupportedFamily,
)
from .crvec import PolyVecField, compute_hol, field_space, span_equal_fields, zeta_field
from .poly import interpolate_deg2_many
from .rationals import QQ, rand_rational
from .scalars import QQi, qi
from .star_algebra import mat_inv, mat_mul

QI0 = QQi(0)


class BirationalMap:
    """Base: a partially defined map of the ambient (w, z) space.

    Subclasses implement evaluate(point) -> point and
    differential(point, tangent) -> tangent, raising SingularPoint off the
    regular set.  Points and tangents are (w_coords, z_coords) pairs.
    """

    family = "abstract"

    def __init__(self, Q):
        self.quadric = Q

    def evaluate(self, point):
        raise NotImplementedError

    def differential(self, point, tangent):
        raise NotImplementedError

    def differential_operator(self, point):
        """The derivative at a fixed regular point, as a reusable callable.
        Subclasses whose differential needs per-point setup override this."""
        return lambda tangent: self.differential(point, tangent)

    def jacobian(self, point):
        """Complex matrix of the derivative on concatenated (w, z) coords."""
        Q = self.quadric
        n = Q.dim_w + Q.dim_z
        cols = []
        for k in range(n):
            dw = tuple(QQi(1) if i == k else QI0 for i in range(Q.dim_w))
            dz = tuple(
                QQi(1) if Q.dim_w + i == k else QI0 for i in range(Q.dim_z)
            )
            iw, iz = self.differential(point, (dw, dz))
            cols.append(tuple(iw) + tuple(iz))
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    def then(self, other):
        return Composite([self, other])

    def inverse(self):
        raise UnsupportedFamily(f"no inverse implemented for {self.family}")

    def __repr__(self):
        return f"<{self.family} map>"


class Identity(BirationalMap):
    family = "identity"

    def evaluate(self, point):
        return point

    def differential(self, point, tangent):
        return tangent

    def inverse(self):
        return self


class Inversion(BirationalMap):
    """gamma: (w, z) -> (w^-1, w^-1 z); with negate_z, sigma."""

    def __init__(self, Q, negate_z=False):
        if Q.model is None:
            raise UnsupportedFamily("inversion symmetry needs a matrix model")
        super().__init__(Q)
        self.negate_z = negate_z
        self.family = "sigma" if negate_z else "gamma"

    def _inverse_at(self, w):
        model = self.quadric.model
        try:
            winv = mat_inv(model.A, model.w_to_mat(w))
        except NotInvertible as exc:
            raise SingularPoint(str(exc)) from None
        return winv

    def evaluate(self, point):
        w, z = point
        model = self.quadric.model
        winv = self._inverse_at(w)
        wc = model.mat_to_w(winv)
        if wc is None:
            raise SingularPoint("inverse leaves the admissible w-space")
        zc = model.mat_to_z(mat_mul(model.A, winv, model.z_to_mat(z)))
        if self.negate_z:
            zc = tuple(-c for c in zc)
        return tuple(wc), zc

    def differential(self, point, tangent):
        return self.differential_operator(point)(tangent)

    def differential_operator(self, point):
        w, z = point
        model = self.quadric.model
        A = model.A
        winv = self._inverse_at(w)
        zmat = model.z_to_mat(z)

        def apply(tangent):
            dw, dz = tangent
            # d(w^-1) = -w^-1 dw w^-1; d(w^-1 z) = d(w^-1) z + w^-1 dz
            dW = _mat_neg(A, mat_mul(A, mat_mul(A, winv, model.w_to_mat(dw)), winv))
            dZ = _mat_add(
                A, mat_mul(A, dW, zmat), mat_mul(A, winv, model.z_to_mat(dz))
            )
            dWc = model.mat_to_w(dW)
            if dWc is None:
                raise SingularPoint("derivative leaves the admissible w-space")
            dZc = model.mat_to_z(dZ)
            if self.negate_z:
                dZc = tuple(-c for c in dZc)
            return tuple(dWc), dZc

        return apply

    def inverse(self):
        return self  # both gamma and sigma are involutions


def _mat_neg(A, X):
    return tuple(tuple(tuple(-c for c in e) for e in row) for row in X)


def _mat_add(A, X, Y):
    return tuple(
        tuple(A.add(X[i][j], Y[i][j]) for j in range(len(X[0])))
        for i in range(len(X))
    )


def gamma(Q):
    return Inversion(Q)


def sigma(Q):
    return Inversion(Q, negate_z=True)


class Heisenberg(BirationalMap):
    """(w, z) -> (w + a + h(z, b), z + b) for a quadric point (a, b)."""

    family = "heisenberg"

    def __init__(self, Q, a, b):
        super().__init__(Q)
        self.a = tuple(a)
        self.b = tuple(b)
        if not Q.contains((self.a, self.b)):
            raise InvalidParameter("translation parameter is not on the quadric")

    def evaluate(self, point):
        w, z = point
        hz = self.quadric.h_of(z, self.b)
        return (
            tuple(wk + ak + hk for wk, ak, hk in zip(w, self.a, hz)),
            tuple(zi + bi for zi, bi in zip(z, self.b)),
        )

    def differential(self, point, tangent):
        dw, dz = tangent
        hdz = self.quadric.h_of(dz, self.b)
        return tuple(a + b for a, b in zip(dw, hdz)), tuple(dz)

    def inverse(self):
        # the group inverse: parameters solving heis(a,b)(a', b') = (0, 0)
        Q = self.quadric
        hbb = Q.h_of(self.b, self.b)
        a_inv = tuple(h - a for h, a in zip(hbb, self.a))
        b_inv = tuple(-b for b in self.b)
        return Heisenberg(Q, a_inv, b_inv)


class LinearMap(BirationalMap):
    """(w, z) -> (F w, G z) with complex matrices acting on coordinates."""

    family = "linear"

    def __init__(self, Q, F, G):
        super().__init__(Q)
        self.F = tuple(tuple(row) for row in F)
        self.G = tuple(tuple(row) for row in G)

    @staticmethod
    def _apply(M, v):
        return tuple(
            sum((row[j] * v[j] for j in range(len(v)) if v[j]), QI0) for row in M
        )

    def evaluate(self, point):
        w, z = point
        return self._apply(self.F, w), self._apply(self.G, z)

    def differential(self, point, tangent):
        return self.evaluate(tangent)

    def inverse(self):
        from .linear import invert_matrix_field

        return LinearMap(
            self.quadric,
            invert_matrix_field([list(r) for r in self.F]),
            invert_matrix_field([list(r) for r in self.G]),
        )


class Composite(BirationalMap):
    """Apply the listed maps in order (first entry acts first)."""

    family = "composite"

    def __init__(self, maps):
        if not maps:
            raise InvalidParameter("empty composite")
        super().__init__(maps[0].quadric)
        self.maps = list(maps)

    def evaluate(self, point):
        for m in self.maps:
            point = m.evaluate(point)
        return point

    def differential(self, point, tangent):
        for m in self.maps:
            tangent = m.differential(point, tangent)
            point = m.evaluate(point)
        return tangent

    def differential_operator(self, point):
        ops = []
        for m in self.maps:
            ops.append(m.differential_operator(point))
            point = m.evaluate(point)

        def apply(tangent):
            for op in ops:
                tangent = op(tangent)
            return tangent

        return apply

    def inverse(self):
        return Composite([m.inverse() for m in reversed(self.maps)])


# --- pushforward ---------------------------------------------------------------


def _unit_w_coords(Q):
    if Q.model is not None:
        coords = Q.model.mat_to_w(Q.model.unit_w())
        if coords is not None:
            return tuple(coords)
    return (QI0,) * Q.dim_w


def ambient_sample(Q, rng, spread=3):
    """Generic rational point with w near the model unit (inside reg(gamma))."""
    unit = _unit_w_coords(Q)
    w = tuple(
        u + QQi(rand_rational(rng, spread, 5), rand_rational(rng, spread, 5))
        for u in unit
    )
    z = tuple(
        QQi(rand_rational(rng, spread, 5), rand_rational(rng, spread, 5))
        for _ in range(Q.dim_z)
    )
    return w, z


def _integer_sample(Q, rng, spread=3):
    """Like ambient_sample but with integer coordinates: interpolation nodes
    with integer entries keep the Vandermonde elimination fraction-light."""
    unit = _unit_w_coords(Q)
    w = tuple(
        u + QQi(QQ(rng.randint(-spread, spread)), QQ(rng.randint(-spread, spread)))
        for u in unit
    )
    z = tuple(
        QQi(QQ(rng.randint(-spread, spread)), QQ(rng.randint(-spread, spread)))
        for _ in range(Q.dim_z)
    )
    return w, z


def _fit_pushforward(m, xis, rng, max_tries=None):
    """Interpolate the images of several fields under one map, sharing the
    node set and a single Vandermonde elimination across all of them."""
    Q = m.quadric
    sp = field_space(Q)
    for xi in xis:
        if xi.space is not sp:
            raise InvalidParameter("field does not live on the map's quadric")
    nm = len(sp.coord_monos)
    budget = [max_tries if max_tries is not None else 60 * nm + 200]
    try:
        minv = m.inverse()
    except UnsupportedFamily:
        minv = None

    def draw():
        while True:
            budget[0] -= 1
            if budget[0] < 0:
                raise SingularPoint("could not collect enough regular sample points")
            try:
                if minv is None:
                    p = ambient_sample(Q, rng)
                    q = m.evaluate(p)
                else:
                    # integer node q, preimage p; confirming m(p) == q guards
                    # against a wrong inverse corrupting the fit
                    q = _integer_sample(Q, rng)
                    p = minv.evaluate(q)
                    if m.evaluate(p) != q:
                        raise SingularPoint("inverse map failed round trip at sample")
                op = m.differential_operator(p)
                row = []
                for xi in xis:
                    v = op(xi.eval_at(*p))
                    row.append(tuple(v[0]) + tuple(v[1]))
                return tuple(q[0]) + tuple(q[1]), row
            except SingularPoint:
                continue

    ncomp = Q.dim_w + Q.dim_z
    pts, vals = [], []
    for _ in range(nm):
        pt, row = draw()
        pts.append(pt)
        vals.append(row)
    while True:
        columns = [
            [vals[i][f][c] for i in range(len(pts))]
            for f in range(len(xis))
            for c in range(ncomp)
        ]
        try:
            polys = interpolate_deg2_many(pts, columns, sp.ring)
            break
        except NeedMoreSamples:
            # degenerate configuration; widen the fit set
            for _ in range(nm // 2 + 1):
                pt, row = draw()
                pts.append(pt)
                vals.append(row)
    etas = [
        PolyVecField(
            sp,
            polys[f * ncomp : f * ncomp + Q.dim_w],
            polys[f * ncomp + Q.dim_w : (f + 1) * ncomp],
        )
        for f in range(len(xis))
    ]
    for _ in range(2 * len(pts)):
        pt, row = draw()
        for eta, vl in zip(etas, row):
            got = eta.eval_at(pt[: Q.dim_w], pt[Q.dim_w :])
            if tuple(got[0]) + tuple(got[1]) != vl:
                raise NotPolynomialDeg2(
                    "pushforward is not a degree-2 polynomial field"
                )
    return etas


def pushforward(m, xi, rng=None, max_tries=None):
    """The degree-<=2 field eta with eta(m(p)) = dm(p) xi(p), found by exact
    interpolation at generic points and confirmed on twice as many held-out
    samples; NotPolynomialDeg2 when no such field exists."""
    rng = rng or random.Random(0x5EED)
    return _fit_pushforward(m, [xi], rng, max_tries=max_tries)[0]


def pushforward_basis(m, fields, rng=None):
    rng = rng or random.Random(0x5EED)
    if not fields:
        return []
    return _fit_pushforward(m, list(fields), rng)


# --- named verification suites ----------------------------------------------------


def _push_all(m, L, rng):
    flat = [f for k in range(-2, 3) for f in L.bases[k]]
    etas = pushforward_basis(m, flat, rng=rng)
    pushed, at = {}, 0
    for k in range(-2, 3):
        pushed[k] = etas[at : at + len(L.bases[k])]
        at += len(L.bases[k])
    return pushed


def check_property_S(Q, m, L=None, rng=None, pushed=None):
    """The symmetry axioms: m is an involution normalizing hol(Q), it reverses
    the grading field zeta, and it flips every graded piece onto its mirror."""
    L = L if L is not None else compute_hol(Q)
    rng = rng or random.Random(0xA11CE)
    sp = field_space(Q)
    zeta = zeta_field(sp)
    report = {}
    report["ad_zeta_is_minus_zeta"] = pushforward(m, zeta, rng=rng) == -zeta
    if pushed is None:
        pushed = _push_all(m, L, rng)
    report["grade_flip"] = {
        k: span_equal_fields(pushed[k], L.bases[-k]) for k in range(-2, 3)
    }
    report["dims_mirror"] = all(
        len(L.bases[k]) == len(L.bases[-k]) for k in range(-2, 3)
    )
    flat_pushed = [g for k in range(-2, 3) for g in pushed[k]]
    back = pushforward_basis(m, flat_pushed, rng=rng)
    report["involution"] = back == [f for k in range(-2, 3) for f in L.bases[k]]
    report["ok"] = (
        report["ad_zeta_is_minus_zeta"]
        and report["dims_mirror"]
        and report["involution"]
        and all(report["grade_flip"].values())
    )
    return report


def check_DM(L, m, rng=None, pushed=None):
    """Grade reversal data: Ad(m) g^k = g^-k, mirrored dimensions,
    [g^1, g^1] = g^2, and compatibility of Ad(m) with all basis brackets."""
    rng = rng or random.Random(0xD0)
    report = {}
    if pushed is None:
        pushed = _push_all(m, L, rng)
    report["grade_flip"] = {
        k: span_equal_fields(pushed[k], L.bases[-k]) for k in range(-2, 3)
    }
    report["dims_mirror"] = all(
        len(L.bases[k]) == len(L.bases[-k]) for k in range(-2, 3)
    )
    g1 = L.bases[1]
    squares = [
        g1[i].bracket(g1[j]) for i in range(len(g1)) for j in range(i + 1, len(g1))
    ]
    report["g1_g1_equals_g2"] = span_equal_fields(squares, L.bases[2])

    basis = L.concat_basis()
    flat_pushed = [f for k in range(-2, 3) for f in pushed[k]]
    table = L.bracket_table()
    ok = True
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            lhs = flat_pushed[i].bracket(flat_pushed[j])
            rhs = PolyVecField.zero(L.space)
            for l, c in enumerate(table[i][j]):
                if c:
                    rhs = rhs + flat_pushed[l].smul(qi(c))
            if lhs != rhs:
                ok = False
                break
        if not ok:
            break
    report["brackets_respected"] = ok
    report["ok"] = (
        report["dims_mirror"]
        and report["g1_g1_equals_g2"]
        and report["brackets_respected"]
        and all(report["grade_flip"].values())
    )
    return report


def symmetry_suite(Q, m, L=None, rng=None):
    """Property (S) and the grade-reversal checks with one shared pushforward
    pass over the basis."""
    L = L if L is not None else compute_hol(Q)
    rng = rng or random.Random(0xA11CE)
    pushed = _push_all(m, L, rng)
    return (
        check_property_S(Q, m, L=L, rng=rng, pushed=pushed),
        check_DM(L, m, rng=rng, pushed=pushed),
    )
