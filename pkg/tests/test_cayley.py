"""Spheres, the Cayley transform, and the k (+) p splitting."""

import random

import pytest

from crquadrics.cayley import (
    SQRT2,
    cayley,
    cayley_inverse,
    delta_field,
    k_p_decompose,
    make_sphere,
    origin_rank,
    p_field,
    p_tangency_identity,
    sigma_identity_check,
    sphere_contains,
    sphere_hol,
    sphere_join,
    sphere_quadric,
    sphere_ring,
    sphere_split,
    sphere_to_quadric_check,
)
from crquadrics.crvec import compute_hol
from crquadrics.errors import InvalidForm, InvalidParameter, SingularPoint
from crquadrics.linear import in_span
from crquadrics.quadric import (
    make_hyperquadric,
    make_matrix_quadric,
    make_tensored_heisenberg,
    make_type_II,
)
from crquadrics.rationals import QQ
from crquadrics.scalars import qi
from crquadrics.star_algebra import (
    make_complex,
    make_dual_numbers,
    make_matrix_algebra,
    mat_mul,
    mat_star,
)

C = make_complex()
I2 = ((qi(1), qi(0)), (qi(0), qi(1)))
I3 = tuple(tuple(qi(1 if i == j else 0) for j in range(3)) for i in range(3))


@pytest.fixture(scope="module")
def s3():
    S = make_sphere(C, 1, 2, I2)
    return S, sphere_hol(S)


def pair(wc, zc):
    """1x1 matrix pair over the complex scalars."""
    return (((wc,),),), (((zc,),),)


def matrix_point(S, z_entries):
    """Full m x r sphere matrix from plain complex entries."""
    return tuple(tuple((e,) for e in row) for row in z_entries)


def coords_of(S, z):
    out = []
    for row in z:
        for entry in row:
            out.extend(entry)
    return tuple(out)


def field_tangent_at(S, f, z):
    A = S.A
    vals = f.eval_at(coords_of(S, z))
    d = A.dim
    v = tuple(
        tuple(
            tuple(vals[(i * S.r + j) * d + k] for k in range(d))
            for j in range(S.r)
        )
        for i in range(S.m)
    )
    alpha = tuple(
        tuple(tuple(c * u for u in A.unit) for c in row) for row in S.alpha
    )
    G = mat_mul(A, mat_mul(A, v, alpha), mat_star(A, z))
    H = mat_mul(A, mat_mul(A, z, alpha), mat_star(A, v))
    m = S.m
    zero = A.zero()
    return all(
        tuple(a + b for a, b in zip(G[i][j], H[i][j])) == zero
        for i in range(m)
        for j in range(m)
    )


def sphere_samples(S, count, seed=3):
    Q = sphere_quadric(S)
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        pt = Q.random_point(rng)
        p = (Q.model.w_to_mat(pt[0]), Q.model.z_to_mat(pt[1]))
        try:
            out.append(cayley_inverse(S, p))
        except SingularPoint:
            continue
    return out


class TestSphereSpec:
    def test_split_form(self):
        S = make_sphere(C, 1, 2, I2)
        assert (S.m, S.r, S.n) == (1, 2, 1)
        assert S.beta == ((qi(1),),)

    def test_indefinite_split(self):
        S = make_sphere(C, 1, 2, ((qi(1), qi(0)), (qi(0), qi(-1))))
        assert S.beta == ((qi(-1),),)

    def test_non_split_alpha(self):
        S = make_sphere(C, 1, 2, ((qi(0), qi(1)), (qi(1), qi(0))))
        assert S.beta is None
        with pytest.raises(InvalidForm):
            sphere_quadric(S)
        with pytest.raises(InvalidForm):
            cayley(S, pair(qi(0), qi(0)))

    def test_signature_gate(self):
        with pytest.raises(InvalidForm):
            make_sphere(C, 1, 2, ((qi(-1), qi(0)), (qi(0), qi(-1))))

    def test_singular_alpha_rejected(self):
        with pytest.raises(InvalidForm):
            make_sphere(C, 1, 2, ((qi(1), qi(0)), (qi(0), qi(0))))

    def test_non_hermitian_rejected(self):
        with pytest.raises(InvalidForm):
            make_sphere(C, 1, 2, ((qi(1), qi(1, 2)), (qi(1), qi(0))))

    def test_size_gate(self):
        with pytest.raises(InvalidParameter):
            make_sphere(C, 2, 2, I2)

    def test_membership(self):
        S = make_sphere(C, 1, 2, I2)
        assert sphere_contains(S, matrix_point(S, ((qi(1), qi(0)),)))
        assert sphere_contains(S, matrix_point(S, ((qi(0), qi(1)),)))
        assert not sphere_contains(S, matrix_point(S, ((qi(0), qi(0)),)))

    def test_join_split(self):
        S = make_sphere(C, 1, 2, I2)
        x, y = pair(qi(2), qi(3))
        assert sphere_split(S, sphere_join(S, x, y)) == (x, y)


class TestCayleyMap:
    def test_origin_image(self, s3):
        S, _ = s3
        assert cayley(S, pair(qi(0), qi(0))) == pair(qi(1), qi(0))

    def test_singular_locus(self, s3):
        S, _ = s3
        with pytest.raises(SingularPoint):
            cayley(S, pair(qi(1), qi(0)))
        with pytest.raises(SingularPoint):
            cayley_inverse(S, pair(qi(-1), qi(0)))

    def test_equator_point(self, s3):
        # x + conj(x) = |y|^2 on the image: 1 + 1 = |sqrt2|^2
        S, _ = s3
        w, z = cayley(S, pair(qi(0), qi(1)))
        assert w[0][0] == (qi(1),)
        assert z[0][0] == (SQRT2,)

    def test_round_trips(self, s3):
        S, _ = s3
        Q = sphere_quadric(S)
        rng = random.Random(7)
        done = 0
        while done < 20:
            pt = Q.random_point(rng)
            p = (Q.model.w_to_mat(pt[0]), Q.model.z_to_mat(pt[1]))
            try:
                s = cayley_inverse(S, p)
            except SingularPoint:
                continue
            assert cayley(S, s) == p
            assert sphere_contains(S, sphere_join(S, *s))
            done += 1

    def test_transport_report(self, s3):
        S, _ = s3
        rep = sphere_to_quadric_check(S, count=50)
        assert rep["ok"] and rep["checked"] == 50 and not rep["failures"]

    def test_transport_report_matrix_algebra(self):
        S = make_sphere(make_matrix_algebra(2), 1, 2, I2)
        rep = sphere_to_quadric_check(S, count=25)
        assert rep["ok"] and rep["checked"] == 25


class TestPFields:
    def test_unit_direction_field(self, s3):
        S, _ = s3
        xi = p_field(S, ((C.scalar(1), C.zero()),))
        ring = sphere_ring(S)
        z0, z1 = ring.var("z0"), ring.var("z1")
        assert xi.comp[0] == ring.one() - z0 * z0
        assert xi.comp[1] == -(z0 * z1)

    def test_zero_direction(self, s3):
        S, _ = s3
        assert p_field(S, ((C.zero(), C.zero()),)).is_zero()

    def test_shape_gate(self, s3):
        S, _ = s3
        with pytest.raises(InvalidParameter):
            p_field(S, ((C.scalar(1),),))

    @pytest.mark.parametrize(
        "entries",
        [
            (qi(1), qi(0)),
            (qi(2, 3), qi(-1, 1)),
            (qi(0), qi(0, 1)),
        ],
    )
    def test_tangency_identity(self, s3, entries):
        S, _ = s3
        a = ((C.scalar(entries[0]), C.scalar(entries[1])),)
        assert p_tangency_identity(S, a)

    def test_tangency_identity_non_split(self):
        S = make_sphere(C, 1, 2, ((qi(0), qi(1)), (qi(1), qi(0))))
        a = ((C.scalar(qi(1, 1)), C.scalar(2)),)
        assert p_tangency_identity(S, a)

    def test_tangency_identity_dual_numbers(self):
        D = make_dual_numbers()
        S = make_sphere(D, 1, 2, I2)
        a = ((D.basis(1), D.unit),)
        assert p_tangency_identity(S, a)

    def test_p_field_in_computed_algebra(self, s3):
        S, fields = s3
        vecs = [f.coeff_vector() for f in fields]
        xi = p_field(S, ((C.scalar(qi(1, 2)), C.scalar(3)),))
        assert in_span(xi.coeff_vector(), vecs)

    def test_field_values_tangent_at_samples(self, s3):
        S, fields = s3
        for s in sphere_samples(S, 5):
            z = sphere_join(S, *s)
            for f in fields:
                assert field_tangent_at(S, f, z)


class TestSphereAlgebra:
    def test_three_sphere_dimension(self, s3):
        # both sides solved independently: tangency on the sphere vs the quadric
        S, fields = s3
        L = compute_hol(make_hyperquadric(1, 1))
        assert len(fields) == 8
        assert sum(len(L.bases[k]) for k in range(-2, 3)) == 8

    def test_five_sphere_dimension(self):
        S = make_sphere(C, 1, 3, I3)
        L = compute_hol(make_matrix_quadric(1, 2, I2))
        assert len(sphere_hol(S)) == 15
        assert sum(len(L.bases[k]) for k in range(-2, 3)) == 15

    def test_hyperboloid_dimension(self):
        S = make_sphere(C, 1, 2, ((qi(1), qi(0)), (qi(0), qi(-1))))
        assert len(sphere_hol(S)) == 8

    def test_matrix_sphere_dimension(self):
        S = make_sphere(C, 2, 3, I3)
        L = compute_hol(make_matrix_quadric(2, 1, ((qi(1),),)))
        assert len(sphere_hol(S)) == 24
        assert sum(len(L.bases[k]) for k in range(-2, 3)) == 24

    def test_dual_number_sphere_dimension(self):
        D = make_dual_numbers()
        S = make_sphere(D, 1, 2, I2)
        L = compute_hol(make_tensored_heisenberg(D))
        assert len(sphere_hol(S)) == 17
        assert sum(len(L.bases[k]) for k in range(-2, 3)) == 17

    def test_bracket_closure(self, s3):
        S, fields = s3
        vecs = [f.coeff_vector() for f in fields]
        for i in range(len(fields)):
            for j in range(i + 1, len(fields)):
                assert in_span(fields[i].bracket(fields[j]).coeff_vector(), vecs)

    def test_delta_in_algebra(self, s3):
        S, fields = s3
        vecs = [f.coeff_vector() for f in fields]
        assert in_span(delta_field(S).coeff_vector(), vecs)


class TestKP:
    def test_dimensions(self, s3):
        S, fields = s3
        k, p = k_p_decompose(S, fields)
        assert len(k) == 4 and len(p) == 4

    def test_k_is_linear(self, s3):
        S, fields = s3
        k, _ = k_p_decompose(S, fields)
        assert all(f.is_linear() for f in k)

    def test_eigenvalues_exact(self, s3):
        S, fields = s3
        k, p = k_p_decompose(S, fields)
        d = delta_field(S)
        for f in k:
            assert d.bracket(d.bracket(f)).is_zero()
        for f in p:
            assert d.bracket(d.bracket(f)) == -f

    def test_origin_evaluation_rank(self, s3):
        S, fields = s3
        _, p = k_p_decompose(S, fields)
        assert origin_rank(p) == 2 * S.m * S.r * S.A.dim == 4

    def test_symmetric_pair_structure(self, s3):
        S, fields = s3
        k, p = k_p_decompose(S, fields)
        kv = [f.coeff_vector() for f in k]
        pv = [f.coeff_vector() for f in p]
        assert all(in_span(a.bracket(b).coeff_vector(), kv) for a in k for b in k)
        assert all(in_span(a.bracket(b).coeff_vector(), pv) for a in k for b in p)
        assert all(in_span(a.bracket(b).coeff_vector(), kv) for a in p for b in p)

    def test_matrix_sphere_split(self):
        S = make_sphere(C, 2, 3, I3)
        k, p = k_p_decompose(S)
        assert len(k) == 12 and len(p) == 12
        assert all(f.is_linear() for f in k)
        assert origin_rank(p) == 12


class TestSigmaIdentity:
    def test_fixed_point_oracle(self):
        S = make_sphere(C, 1, 2, I2)
        b = cayley_inverse(S, pair(qi(1), qi(0)))
        neg = tuple(
            tuple(tuple(tuple(-c for c in e) for e in row) for row in part)
            for part in b
        )
        assert cayley(S, neg) == pair(qi(1), qi(0))

    def test_scalar_oracle(self):
        S = make_sphere(C, 1, 2, I2)
        b = cayley_inverse(S, pair(qi(2), qi(0)))
        neg = tuple(
            tuple(tuple(tuple(-c for c in e) for e in row) for row in part)
            for part in b
        )
        assert cayley(S, neg) == pair(qi(QQ(1, 2)), qi(0))

    def test_heisenberg_model(self):
        rep = sigma_identity_check(make_hyperquadric(1, 1), count=50)
        assert rep["ok"] and rep["checked"] == 50 and not rep["mismatches"]

    def test_matrix_model(self):
        rep = sigma_identity_check(make_matrix_quadric(2, 2, I2), count=50)
        assert rep["ok"] and rep["checked"] == 50

    def test_beta_gate(self):
        Q = make_matrix_quadric(1, 1, ((qi(-1),),))
        with pytest.raises(InvalidForm):
            sigma_identity_check(Q)

    def test_twist_gate(self):
        with pytest.raises(InvalidForm):
            sigma_identity_check(make_type_II(4))
