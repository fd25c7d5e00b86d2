"""Polynomial vector fields of degree <= 2 and the graded symmetry algebra.

Fields are holomorphic: xi = f dw + g dz with polynomial components in the
coordinates (w, z) of the ambient space.  Tangency to the quadric
w + conj_W(w) = h(z,z) is the identical vanishing of

    rho_k = f_k + conj_W(f)_k - h(g, z)_k - h(z, g)_k

after substituting the graph parametrization w = h(z,z)/2 + t (t ranging
over iV) and formal conjugates.  rho is a polynomial in the algebraically
independent quantities (z, conj z, t), so tangency is a finite exact linear
condition on the coefficients of the field.

The Euler-type field zeta = 2w dw + z dz grades everything: a monomial with
a factors of w and b factors of z has weight 2a+b-2 on dw components and
2a+b-1 on dz components, and the tangency constraints never couple distinct
weights (the substitution gives t weight 2, so a weight-homogeneous field
has a weight-homogeneous residual).  The solver therefore works one grade
at a time, which is exact, not an approximation.
"""

from __future__ import annotations

import itertools

from .errors import InvalidGrading, UnsupportedFamily
from .linear import (
    ComplexRowsBuilder,
    SpanSolver,
    nullspace,
    rank_rational,
    rref_dense,
)
from .poly import Poly, PolyRing
from .rationals import QQ, QQ0, QQ1
from .scalars import QQi, qi
from .star_algebra import derivations as algebra_derivations

QI0 = QQi(0)
QI1 = QQi(1)
HALF = qi(QQ(1, 2))


class FieldSpace:
    """Coordinates and rings attached to one quadric."""

    def __init__(self, Q):
        self.quadric = Q
        self.dim_w = Q.dim_w
        self.dim_z = Q.dim_z
        wnames = [f"w{k}" for k in range(Q.dim_w)]
        znames = [f"z{i}" for i in range(Q.dim_z)]
        self.ring = PolyRing(wnames + znames)
        self.nv = len(Q.v_basis)
        rnames = (
            znames
            + [f"zb{i}" for i in range(Q.dim_z)]
            + [f"t{j}" for j in range(self.nv)]
        )
        self.rring = PolyRing(rnames)
        self._build_substitution()
        self.coord_monos = self.ring.monomials_up_to_degree(2)
        self._mono_pos = {e: i for i, e in enumerate(self.coord_monos)}

    def _build_substitution(self):
        Q, rr = self.quadric, self.rring
        dz, nv = self.dim_z, self.nv

        def zvar(i):
            return rr.var(f"z{i}")

        def zbvar(i):
            return rr.var(f"zb{i}")

        def tvar(j):
            return rr.var(f"t{j}")

        imag = qi(0, 1)
        # w_k on the graph: h(z,z)_k / 2 + i sum_j t_j v_j[k]
        self.w_sub = []
        self.wbar_sub = []
        for k in range(Q.dim_w):
            p = rr.zero()
            pb = rr.zero()
            for i in range(dz):
                for j in range(dz):
                    c = Q.h[i][j][k]
                    if c:
                        p = p + rr.const(HALF * c) * zvar(i) * zbvar(j)
                        pb = pb + rr.const(HALF * c.conj()) * zbvar(i) * zvar(j)
            for j in range(nv):
                c = Q.v_basis[j][k]
                if c:
                    p = p + rr.const(imag * c) * tvar(j)
                    pb = pb + rr.const(-imag * c.conj()) * tvar(j)
            self.w_sub.append(p)
            self.wbar_sub.append(pb)
        self.z_sub = [zvar(i) for i in range(dz)]
        self.zb_sub = [zbvar(i) for i in range(dz)]

    def w_exp(self, e):
        return sum(e[: self.dim_w])

    def z_exp(self, e):
        return sum(e[self.dim_w:])

    def substitute_monomial(self, e, conjugate=False):
        """Image of the coordinate monomial w^a z^b on the graph.

        conjugate=True gives the image of the formally conjugated monomial
        (for use against conjugated coefficients).
        """
        rr = self.rring
        out = rr.one()
        srcs_w = self.wbar_sub if conjugate else self.w_sub
        srcs_z = self.zb_sub if conjugate else self.z_sub
        for k in range(self.dim_w):
            for _ in range(e[k]):
                out = out * srcs_w[k]
        for i in range(self.dim_z):
            for _ in range(e[self.dim_w + i]):
                out = out * srcs_z[i]
        return out


def field_space(Q):
    sp = getattr(Q, "_field_space", None)
    if sp is None:
        sp = FieldSpace(Q)
        Q._field_space = sp
    return sp


def _as_qqi(c):
    return c if isinstance(c, QQi) else QQi(c)


class PolyVecField:
    """Holomorphic polynomial field f dw + g dz over a quadric's coordinates."""

    __slots__ = ("space", "w_comp", "z_comp")

    def __init__(self, space, w_comp, z_comp):
        self.space = space
        self.w_comp = tuple(w_comp)
        self.z_comp = tuple(z_comp)

    @classmethod
    def zero(cls, space):
        z = space.ring.zero()
        return cls(space, (z,) * space.dim_w, (z,) * space.dim_z)

    def __add__(self, other):
        return PolyVecField(
            self.space,
            tuple(a + b for a, b in zip(self.w_comp, other.w_comp)),
            tuple(a + b for a, b in zip(self.z_comp, other.z_comp)),
        )

    def __sub__(self, other):
        return PolyVecField(
            self.space,
            tuple(a - b for a, b in zip(self.w_comp, other.w_comp)),
            tuple(a - b for a, b in zip(self.z_comp, other.z_comp)),
        )

    def __neg__(self):
        return self.smul(qi(-1))

    def smul(self, c):
        c = _as_qqi(c)
        return PolyVecField(
            self.space,
            tuple(p * c for p in self.w_comp),
            tuple(p * c for p in self.z_comp),
        )

    def is_zero(self):
        return all(p.is_zero() for p in self.w_comp) and all(
            p.is_zero() for p in self.z_comp
        )

    def __eq__(self, other):
        return (
            isinstance(other, PolyVecField)
            and self.space is other.space
            and self.w_comp == other.w_comp
            and self.z_comp == other.z_comp
        )

    def __hash__(self):
        return hash((id(self.space), self.w_comp, self.z_comp))

    def apply_to(self, poly):
        """Derivation action on a coordinate polynomial."""
        sp = self.space
        out = sp.ring.zero()
        for k in range(sp.dim_w):
            if self.w_comp[k]:
                out = out + self.w_comp[k] * poly.diff(f"w{k}")
        for i in range(sp.dim_z):
            if self.z_comp[i]:
                out = out + self.z_comp[i] * poly.diff(f"z{i}")
        return out

    def bracket(self, other):
        if self.space is not other.space:
            raise ValueError("fields live on different spaces")
        w = tuple(
            self.apply_to(other.w_comp[k]) - other.apply_to(self.w_comp[k])
            for k in range(self.space.dim_w)
        )
        z = tuple(
            self.apply_to(other.z_comp[i]) - other.apply_to(self.z_comp[i])
            for i in range(self.space.dim_z)
        )
        return PolyVecField(self.space, w, z)

    def eval_at(self, w, z):
        point = tuple(w) + tuple(z)
        return (
            tuple(p.eval_at(point) for p in self.w_comp),
            tuple(p.eval_at(point) for p in self.z_comp),
        )

    def grade_decompose(self):
        """Split by monomial weight; reassembling the parts returns the field."""
        sp = self.space
        parts = {}

        def put(weight, comp, k, e, c):
            if weight not in parts:
                z = sp.ring.zero()
                parts[weight] = [
                    [dict() for _ in range(sp.dim_w)],
                    [dict() for _ in range(sp.dim_z)],
                ]
            parts[weight][comp][k][e] = c

        for k, p in enumerate(self.w_comp):
            for e, c in p.terms.items():
                put(2 * sp.w_exp(e) + sp.z_exp(e) - 2, 0, k, e, c)
        for i, p in enumerate(self.z_comp):
            for e, c in p.terms.items():
                put(2 * sp.w_exp(e) + sp.z_exp(e) - 1, 1, i, e, c)
        out = {}
        for weight, (wt, zt) in sorted(parts.items()):
            out[weight] = PolyVecField(
                sp,
                tuple(Poly(sp.ring, d) for d in wt),
                tuple(Poly(sp.ring, d) for d in zt),
            )
        return out

    def coord_vector(self):
        """Realified coefficient vector in the fixed monomial enumeration."""
        sp = self.space
        monos = sp.coord_monos
        out = []
        for p in self.w_comp + self.z_comp:
            row = [QQ0] * (2 * len(monos))
            for e, c in p.terms.items():
                pos = sp._mono_pos[e]
                row[2 * pos] = c.re
                row[2 * pos + 1] = c.im
            out.extend(row)
        return tuple(out)

    def __repr__(self):
        bits = []
        for k, p in enumerate(self.w_comp):
            if p:
                bits.append(f"({p!r}) dw{k}")
        for i, p in enumerate(self.z_comp):
            if p:
                bits.append(f"({p!r}) dz{i}")
        return " + ".join(bits) if bits else "0"


def field_from_vector(space, vec):
    """Inverse of coord_vector."""
    monos = space.coord_monos
    nm = len(monos)
    comps = []
    for c in range(space.dim_w + space.dim_z):
        terms = {}
        base = c * 2 * nm
        for pos, e in enumerate(monos):
            re = vec[base + 2 * pos]
            im = vec[base + 2 * pos + 1]
            if re or im:
                terms[e] = QQi(re, im)
        comps.append(Poly(space.ring, terms))
    return PolyVecField(space, comps[: space.dim_w], comps[space.dim_w:])


def zeta_field(space):
    r = space.ring
    return PolyVecField(
        space,
        tuple(r.var(f"w{k}") * qi(2) for k in range(space.dim_w)),
        tuple(r.var(f"z{i}") for i in range(space.dim_z)),
    )


def chi_field(space):
    r = space.ring
    imag = qi(0, 1)
    return PolyVecField(
        space,
        (r.zero(),) * space.dim_w,
        tuple(r.var(f"z{i}") * imag for i in range(space.dim_z)),
    )


def span_equal_fields(B1, B2):
    """Exact real-span comparison of two field families on one space."""
    v1 = [f.coord_vector() for f in B1]
    v2 = [f.coord_vector() for f in B2]
    r1, r2 = rank_rational(v1), rank_rational(v2)
    if r1 != r2:
        return False
    return rank_rational(v1 + v2) == r1


# --- tangency -----------------------------------------------------------------


def residual_of_field(Q, xi):
    """The dw-many residual polynomials of xi on Q; all zero iff tangent."""
    sp = field_space(Q)
    rr = sp.rring
    dz = sp.dim_z
    wmap = {f"w{k}": sp.w_sub[k] for k in range(sp.dim_w)}
    wmap.update({f"z{i}": sp.z_sub[i] for i in range(dz)})
    cmap = {f"w{k}": sp.wbar_sub[k] for k in range(sp.dim_w)}
    cmap.update({f"z{i}": sp.zb_sub[i] for i in range(dz)})

    ident = list(range(sp.ring.nvars))
    f_sub = [p.substitute(wmap, rr) for p in xi.w_comp]
    f_conj = [
        p.conj_swap(ident).substitute(cmap, rr) for p in xi.w_comp
    ]
    g_sub = [p.substitute(wmap, rr) for p in xi.z_comp]
    g_conj = [p.conj_swap(ident).substitute(cmap, rr) for p in xi.z_comp]

    res = []
    for k in range(Q.dim_w):
        rho = f_sub[k]
        for l in range(Q.dim_w):
            c = Q.conj_w[k][l]
            if c and f_conj[l]:
                rho = rho + f_conj[l] * c
        for i in range(dz):
            for j in range(dz):
                c = Q.h[i][j][k]
                if not c:
                    continue
                if g_sub[i]:
                    rho = rho - g_sub[i] * sp.zb_sub[j] * c
                if g_conj[j]:
                    rho = rho - g_conj[j] * sp.z_sub[i] * c
        res.append(rho)
    return res


def is_tangent(Q, xi):
    return all(p.is_zero() for p in residual_of_field(Q, xi))


def _monomials_of_weight(space, wz_weight):
    """Exponent tuples of degree <= 2 with 2 (w-degree) + (z-degree) = wz_weight."""
    out = []
    for e in space.coord_monos:
        if 2 * space.w_exp(e) + space.z_exp(e) == wz_weight:
            out.append(e)
    return out


def _shifted(terms, var_index):
    for e, c in terms.items():
        e2 = list(e)
        e2[var_index] += 1
        yield tuple(e2), c


def tangency_system(Q, grade):
    """Real-linear constraints on the coefficients of a weight-`grade` field.

    Unknowns are the complex coefficients of the admissible monomials; one
    constraint row per (residual component, residual monomial).
    """
    sp = field_space(Q)
    rr = sp.rring
    dz, dw = sp.dim_z, sp.dim_w

    w_monos = _monomials_of_weight(sp, grade + 2)
    z_monos = _monomials_of_weight(sp, grade + 1)
    unknowns = [("w", k, e) for k in range(dw) for e in w_monos]
    unknowns += [("z", i, e) for i in range(dz) for e in z_monos]
    labels = [f"{t}{c}:{e}" for (t, c, e) in unknowns]
    builder = ComplexRowsBuilder(len(unknowns), labels)

    subs = {e: sp.substitute_monomial(e) for e in set(w_monos) | set(z_monos)}
    csubs = {e: sp.substitute_monomial(e, conjugate=True) for e in subs}

    zb_index = {j: rr.index[f"zb{j}"] for j in range(dz)}
    z_index = {i: rr.index[f"z{i}"] for i in range(dz)}

    u = 0
    for k in range(dw):
        for e in w_monos:
            # f_k contributes directly to rho_k
            for ee, val in subs[e].terms.items():
                builder.add((k, ee), u, lin=val)
            # conj_W(f)_kk picks up conj(c) through C[kk][k]
            for kk in range(dw):
                c = Q.conj_w[kk][k]
                if c:
                    for ee, val in csubs[e].terms.items():
                        builder.add((kk, ee), u, conj=c * val)
            u += 1
    for i in range(dz):
        for e in z_monos:
            # -h(g, z): g_i pairs against conj(z_j)
            for j in range(dz):
                for kk in range(dw):
                    c = Q.h[i][j][kk]
                    if not c:
                        continue
                    for ee, val in _shifted(subs[e].terms, zb_index[j]):
                        builder.add((kk, ee), u, lin=-c * val)
            # -h(z, g): conj(g_i) pairs against z_ii
            for ii in range(dz):
                for kk in range(dw):
                    c = Q.h[ii][i][kk]
                    if not c:
                        continue
                    for ee, val in _shifted(csubs[e].terms, z_index[ii]):
                        builder.add((kk, ee), u, conj=-c * val)
            u += 1
    return builder.build(), unknowns


def solve_grade(Q, grade, method="auto", backend=None):
    """Exact basis of the weight-`grade` tangent fields."""
    sp = field_space(Q)
    system, unknowns = tangency_system(Q, grade)
    basis = []
    for vec in nullspace(system, method=method, backend=backend):
        wt = [dict() for _ in range(sp.dim_w)]
        zt = [dict() for _ in range(sp.dim_z)]
        for idx, (t, c, e) in enumerate(unknowns):
            coeff = QQi(vec[2 * idx], vec[2 * idx + 1])
            if not coeff:
                continue
            (wt if t == "w" else zt)[c][e] = coeff
        basis.append(
            PolyVecField(
                sp,
                tuple(Poly(sp.ring, d) for d in wt),
                tuple(Poly(sp.ring, d) for d in zt),
            )
        )
    return basis


def compute_hol(Q, method="auto", backend=None):
    """The full graded algebra of tangent degree-<=2 fields."""
    bases = {k: solve_grade(Q, k, method=method, backend=backend) for k in range(-2, 3)}
    return GradedLieAlgebra(Q, bases)


def weight3_kernel_dim(Q, method="auto", backend=None):
    """Dimension of tangent fields of weight 3 (w w dz); zero for all quadrics here."""
    return len(solve_grade(Q, 3, method=method, backend=backend))


class GradedLieAlgebra:
    """Graded bases plus exact structure constants, built lazily."""

    def __init__(self, Q, bases):
        self.quadric = Q
        self.space = field_space(Q)
        self.bases = {k: list(v) for k, v in bases.items()}
        self._solver = None
        self._table = None
        self._concat = None

    def dims(self):
        return tuple(len(self.bases.get(k, [])) for k in range(-2, 3))

    @property
    def total_dim(self):
        return sum(self.dims())

    def concat_basis(self):
        if self._concat is None:
            self._concat = [f for k in range(-2, 3) for f in self.bases.get(k, [])]
        return self._concat

    def grade_offsets(self):
        off = {}
        pos = 0
        for k in range(-2, 3):
            n = len(self.bases.get(k, []))
            off[k] = (pos, pos + n)
            pos += n
        return off

    def solver(self):
        if self._solver is None:
            self._solver = SpanSolver([f.coord_vector() for f in self.concat_basis()])
        return self._solver

    def express(self, field):
        """Coefficients of a field in the concatenated basis, or None."""
        return self.solver().express(field.coord_vector())

    def contains(self, field):
        return self.express(field) is not None

    def check_grading(self):
        """[zeta, xi] = k xi for every stored basis field, by explicit bracket."""
        zeta = zeta_field(self.space)
        for k, fields in self.bases.items():
            for xi in fields:
                if zeta.bracket(xi) != xi.smul(qi(k)):
                    raise InvalidGrading(f"field in grade {k} has mixed weight")
        return True

    def bracket_table(self):
        """table[i][j] = coefficients of [e_i, e_j] in the concatenated basis.

        Every ordered pair is computed independently, so antisymmetry of the
        table is a genuine check of the bracket, not a construction artifact.
        """
        if self._table is None:
            basis = self.concat_basis()
            n = len(basis)
            table = []
            for i in range(n):
                row = []
                for j in range(n):
                    coeffs = self.express(basis[i].bracket(basis[j]))
                    if coeffs is None:
                        raise InvalidGrading("bracket escapes the computed algebra")
                    row.append(tuple(coeffs))
                table.append(row)
            self._table = table
        return self._table

    def antisymmetry_holds(self):
        table = self.bracket_table()
        n = len(table)
        for i in range(n):
            if any(table[i][i]):
                return False
            for j in range(i + 1, n):
                if table[i][j] != tuple(-c for c in table[j][i]):
                    return False
        return True

    def jacobi_holds(self, triples=None):
        """Jacobi identity on basis triples, evaluated through the table."""
        table = self.bracket_table()
        n = len(table)
        if triples is None:
            triples = itertools.combinations(range(n), 3)
        for (i, j, k) in triples:
            acc = [QQ0] * n
            for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
                for l, coef in enumerate(table[b][c]):
                    if coef:
                        for m, v in enumerate(table[a][l]):
                            if v:
                                acc[m] += coef * v
            if any(acc):
                return False
        return True

    def closure_violations(self):
        """Grade pairs (j, k) whose bracket leaves g^{j+k}; empty when closed."""
        table = self.bracket_table()
        off = self.grade_offsets()
        bad = set()
        for kj in self.bases:
            for kk in self.bases:
                lo, hi = off.get(kj + kk, (0, 0))
                for a in range(*off[kj]):
                    for b in range(*off[kk]):
                        if any(
                            c
                            for pos, c in enumerate(table[a][b])
                            if not (lo <= pos < hi)
                        ):
                            bad.add((kj, kk))
        return sorted(bad)

    def derived_dims(self):
        """Graded dimensions of [g, g].

        At nonzero grades [zeta, xi] = k xi already gives everything, so
        those components equal g^k; the level-0 component is the span of
        [g^-2, g^2] + [g^-1, g^1] + [g^0, g^0], computed from the table.
        """
        off = self.grade_offsets()
        table = self.bracket_table()
        out = {k: len(self.bases.get(k, [])) for k in range(-2, 3) if k != 0}
        vecs = []
        for (a, b) in ((-2, 2), (-1, 1), (0, 0)):
            for x in range(*off[a]):
                for y in range(*off[b]):
                    vecs.append(table[x][y])
        out[0] = rank_rational(vecs)
        return out

    def derived_is_ideal(self):
        """[g, d] sits inside d = [g, g], checked through the table."""
        off = self.grade_offsets()
        table = self.bracket_table()
        n = len(table)
        gens = []
        for k in (-2, -1, 1, 2):
            gens.extend(list(range(*off[k])))
        dvecs = [
            tuple(QQ1 if j == g else QQ0 for j in range(n)) for g in gens
        ]
        for (a, b) in ((-2, 2), (-1, 1), (0, 0)):
            for x in range(*off[a]):
                for y in range(*off[b]):
                    dvecs.append(table[x][y])
        pivots, rows = rref_dense([list(v) for v in dvecs], n)

        def reduces_to_zero(vec):
            v = list(vec)
            for (col, row) in zip(pivots, rows):
                c = v[col]
                if c:
                    for jj in range(n):
                        if row[jj]:
                            v[jj] -= c * row[jj]
            return not any(v)

        for a in range(n):
            for d in dvecs:
                img = [QQ0] * n
                for l, coef in enumerate(d):
                    if coef:
                        for m, v in enumerate(table[a][l]):
                            if v:
                                img[m] += coef * v
                if not reduces_to_zero(img):
                    return False
        return True


# --- closed-form bases ------------------------------------------------------------


def _sym_w_matrix(model, space):
    """The coordinate-generic w as an m x m matrix of symbolic algebra elements."""
    d = model.A.dim
    r = space.ring
    entries = [
        [[r.zero() for _ in range(d)] for _ in range(model.m)] for _ in range(model.m)
    ]
    for k, M in enumerate(model.w_basis):
        var = r.var(f"w{k}")
        for a in range(model.m):
            for b in range(model.m):
                for rr in range(d):
                    if M[a][b][rr]:
                        entries[a][b][rr] = entries[a][b][rr] + var * M[a][b][rr]
    return entries


def _sym_z_matrix(model, space):
    d = model.A.dim
    r = space.ring
    return [
        [
            [r.var(f"z{(a * model.n + c) * d + rr}") for rr in range(d)]
            for c in range(model.n)
        ]
        for a in range(model.m)
    ]


def _sym_mul(A, space, x, y):
    """Product of two symbolic algebra elements (coordinates are Polys)."""
    d = A.dim
    out = [space.ring.zero()] * d
    for i in range(d):
        if not x[i]:
            continue
        for j in range(d):
            if not y[j]:
                continue
            p = x[i] * y[j]
            for k, c in enumerate(A.mult[i][j]):
                if c:
                    out[k] = out[k] + p * c
    return out


def _sym_const(A, space, elem):
    return [space.ring.const(c) for c in elem]


def _sym_mat_mul(A, space, X, Y):
    m, kk = len(X), len(Y)
    n = len(Y[0])
    zero = [space.ring.zero()] * A.dim
    out = []
    for i in range(m):
        row = []
        for j in range(n):
            acc = list(zero)
            for l in range(kk):
                p = _sym_mul(A, space, X[i][l], Y[l][j])
                acc = [a + b for a, b in zip(acc, p)]
            row.append(acc)
        out.append(row)
    return out


def _sym_mat_from_const(A, space, M):
    return [[_sym_const(A, space, entry) for entry in row] for row in M]


def _sym_w_coords(model, space, M):
    """Express a symbolic W-valued matrix in w-coordinates (Polys); None if outside."""
    d = model.A.dim
    by_mono = {}
    size = model.m * model.m * d
    flat = []
    for a in range(model.m):
        for b in range(model.m):
            flat.extend(M[a][b])
    for pos, p in enumerate(flat):
        for e, c in p.terms.items():
            by_mono.setdefault(e, [QI0] * size)[pos] = c
    coords = [dict() for _ in range(len(model.w_basis))]
    for e, vec in sorted(by_mono.items()):
        expr = model._span.express(vec)
        if expr is None:
            return None
        for k, c in enumerate(expr):
            if c:
                coords[k][e] = c
    return [Poly(space.ring, terms) for terms in coords]


def _sym_z_coords(model, space, M):
    out = []
    for a in range(model.m):
        for c in range(model.n):
            out.extend(M[a][c])
    return out


def _model_for_closed_forms(Q):
    model = Q.model
    if (
        model is None
        or model.j_twist is not None
        or not model.A.associative
    ):
        raise UnsupportedFamily(
            "no closed positive-grade formulas for this family"
        )
    return model


def closed_form_basis(Q, level):
    """The quoted bases: constants from iV at level -2, h(z,c) dw + c dz at
    level -1, the linear pairs at level 0 (all families); the matrix formulas
    z beta c* w dw + (z beta c* z + w c) dz and w a w dw + w a z dz at levels
    +1, +2 for quadrics with an associative untwisted matrix model."""
    sp = field_space(Q)
    r = sp.ring
    if level == -2:
        imag = qi(0, 1)
        out = []
        for v in Q.v_basis:
            w = tuple(r.const(imag * v[k]) for k in range(Q.dim_w))
            out.append(PolyVecField(sp, w, (r.zero(),) * Q.dim_z))
        return out
    if level == -1:
        out = []
        for j in range(Q.dim_z):
            for cval in (QI1, qi(0, 1)):
                # c = cval * e_j: h(z, c)_k = sum_i z_i conj(cval) h[i][j][k]
                w = []
                for k in range(Q.dim_w):
                    p = r.zero()
                    for i in range(Q.dim_z):
                        hv = Q.h[i][j][k]
                        if hv:
                            p = p + r.var(f"z{i}") * (cval.conj() * hv)
                    w.append(p)
                z = tuple(
                    r.const(cval) if i == j else r.zero() for i in range(Q.dim_z)
                )
                out.append(PolyVecField(sp, tuple(w), z))
        return out
    if level == 0:
        return _closed_form_level0(Q)
    if level in (1, 2):
        return _closed_form_positive(Q, level)
    raise UnsupportedFamily(f"no closed form at level {level}")


def _closed_form_level0(Q):
    """Linear fields (a w) dw + (b z) dz with a h(z,z) = h(bz,z) + h(z,bz)
    and a commuting with the conjugation of W; solved exactly as a pair."""
    sp = field_space(Q)
    dw, dz = Q.dim_w, Q.dim_z
    na = dw * dw
    builder = ComplexRowsBuilder(na + dz * dz)

    def ua(p, q):
        return p * dw + q

    def ub(p, q):
        return na + p * dz + q

    # a h[i][j] = sum_k b[k][i] h[k][j] + sum_k conj(b[k][j]) h[i][k]
    for i in range(dz):
        for j in range(dz):
            for p in range(dw):
                key = ("h", i, j, p)
                for q in range(dw):
                    if Q.h[i][j][q]:
                        builder.add(key, ua(p, q), lin=Q.h[i][j][q])
                for k in range(dz):
                    if Q.h[k][j][p]:
                        builder.add(key, ub(k, i), lin=-Q.h[k][j][p])
                    if Q.h[i][k][p]:
                        builder.add(key, ub(k, j), conj=-Q.h[i][k][p])
    # a C = C conj(a)
    for p in range(dw):
        for q in range(dw):
            key = ("c", p, q)
            for l in range(dw):
                if Q.conj_w[l][q]:
                    builder.add(key, ua(p, l), lin=Q.conj_w[l][q])
                if Q.conj_w[p][l]:
                    builder.add(key, ua(l, q), conj=-Q.conj_w[p][l])
    out = []
    r = sp.ring
    for vec in nullspace(builder.build()):
        wt = []
        for p in range(dw):
            poly = r.zero()
            for q in range(dw):
                c = QQi(vec[2 * ua(p, q)], vec[2 * ua(p, q) + 1])
                if c:
                    poly = poly + r.var(f"w{q}") * c
            wt.append(poly)
        zt = []
        for p in range(dz):
            poly = r.zero()
            for q in range(dz):
                c = QQi(vec[2 * ub(p, q)], vec[2 * ub(p, q) + 1])
                if c:
                    poly = poly + r.var(f"z{q}") * c
            zt.append(poly)
        out.append(PolyVecField(sp, tuple(wt), tuple(zt)))
    return out


def _closed_form_positive(Q, level):
    model = _model_for_closed_forms(Q)
    sp = field_space(Q)
    A = model.A
    wsym = _sym_w_matrix(model, sp)
    zsym = _sym_z_matrix(model, sp)
    beta = _sym_mat_from_const(A, sp, model.beta)
    out = []
    if level == 1:
        # parameters c over a real basis of A^{m x n}
        for a0 in range(model.m):
            for c0 in range(model.n):
                for rr in range(A.dim):
                    for cval in (QI1, qi(0, 1)):
                        centry = A.smul(cval, A.basis(rr))
                        cmat = [
                            [
                                A.star_of(centry) if (a == a0 and c == c0) else A.zero()
                                for a in range(model.m)
                            ]
                            for c in range(model.n)
                        ]
                        cstar = _sym_mat_from_const(A, sp, cmat)
                        cplain = [
                            [
                                _sym_const(A, sp, centry if (a == a0 and c == c0) else A.zero())
                                for c in range(model.n)
                            ]
                            for a in range(model.m)
                        ]
                        zbc = _sym_mat_mul(A, sp, _sym_mat_mul(A, sp, zsym, beta), cstar)
                        wpart = _sym_mat_mul(A, sp, zbc, wsym)
                        zpart1 = _sym_mat_mul(A, sp, zbc, zsym)
                        zpart2 = _sym_mat_mul(A, sp, wsym, cplain)
                        wcoords = _sym_w_coords(model, sp, wpart)
                        if wcoords is None:
                            raise UnsupportedFamily(
                                "positive-grade formula leaves the w-space"
                            )
                        # pushing z beta c* dw + c dz forward through
                        # (w,z) -> (w^-1, w^-1 z) gives the w c term the
                        # opposite sign from the two z beta c* terms
                        zsum = [
                            [
                                [x - y for x, y in zip(e1, e2)]
                                for e1, e2 in zip(r1, r2)
                            ]
                            for r1, r2 in zip(zpart1, zpart2)
                        ]
                        out.append(
                            PolyVecField(
                                sp, tuple(wcoords), tuple(_sym_z_coords(model, sp, zsum))
                            )
                        )
        return out
    # level 2: a ranges over {a : a + a* = 0} = i V in w-coordinates
    imag = qi(0, 1)
    for v in Q.v_basis:
        amat = model.w_to_mat(tuple(imag * c for c in v))
        asym = _sym_mat_from_const(A, sp, amat)
        wa = _sym_mat_mul(A, sp, wsym, asym)
        wpart = _sym_mat_mul(A, sp, wa, wsym)
        zpart = _sym_mat_mul(A, sp, wa, zsym)
        wcoords = _sym_w_coords(model, sp, wpart)
        if wcoords is None:
            raise UnsupportedFamily("positive-grade formula leaves the w-space")
        out.append(
            PolyVecField(sp, tuple(wcoords), tuple(_sym_z_coords(model, sp, zpart)))
        )
    return out


def semidirect_level0_basis(Q):
    """For the tensored Heisenberg families: (a w + w a*) dw + (a z) dz over a
    real basis of A, plus the derivation fields delta(w) dw + delta(z) dz."""
    model = _model_for_closed_forms(Q)
    if model.m != 1 or model.n != 1:
        raise UnsupportedFamily("semidirect level-0 form needs w, z in the algebra")
    A = model.A
    sp = field_space(Q)
    r = sp.ring
    d = A.dim
    out = []

    def linear_field(wmat, zmat):
        # wmat, zmat: complex d x d matrices acting on coordinates
        wt = []
        for p in range(d):
            poly = r.zero()
            for q in range(d):
                if wmat[p][q]:
                    poly = poly + r.var(f"w{q}") * wmat[p][q]
            wt.append(poly)
        zt = []
        for p in range(d):
            poly = r.zero()
            for q in range(d):
                if zmat[p][q]:
                    poly = poly + r.var(f"z{q}") * zmat[p][q]
            zt.append(poly)
        return PolyVecField(sp, tuple(wt), tuple(zt))

    for rr in range(d):
        for cval in (QI1, qi(0, 1)):
            a = A.smul(cval, A.basis(rr))
            astar = A.star_of(a)
            L = A.left_mult_matrix(a)
            Rst = A.right_mult_matrix(astar)
            wmat = [[L[p][q] + Rst[p][q] for q in range(d)] for p in range(d)]
            out.append(linear_field(wmat, L))
    for delta in algebra_derivations(A):
        out.append(linear_field(delta, delta))
    return out
