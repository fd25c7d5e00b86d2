import random

import pytest

from crquadrics.errors import InvalidForm, InvalidParameter
from crquadrics.quadric import (
    Quadric,
    levi_signature,
    make_hyperquadric,
    make_matrix_quadric,
    make_tensored_heisenberg,
    make_type_II,
    make_type_V,
    permute_quadric,
    product_quadric,
    structure_equal,
    tensor_quadric,
)
from crquadrics.scalars import QQi, I, qi
from crquadrics.star_algebra import (
    make_complex,
    make_dual_numbers,
    make_matrix_algebra,
    make_product,
    make_tensor,
)

QI0 = QQi(0)
QI1 = QQi(1)


class TestHyperquadric:
    def test_heisenberg_sphere(self):
        Q = make_hyperquadric(1, 1)
        assert (Q.dim_w, Q.dim_z) == (1, 1)
        # w + conj w = |z|^2 at the point (1/2, 1)
        assert Q.contains(((qi("1/2"),), (qi(1),)))
        assert not Q.contains(((qi(1),), (qi(1),)))

    def test_signatures(self):
        assert levi_signature(make_hyperquadric(2, 0)) == (0, 2, 0)
        assert levi_signature(make_hyperquadric(3, 2)) == (2, 1, 0)

    def test_validate_passes(self):
        for n, k in ((1, 1), (2, 0), (3, 2)):
            assert make_hyperquadric(n, k).validate()["ok"]

    def test_bad_parameters(self):
        with pytest.raises(InvalidParameter):
            make_hyperquadric(2, 3)
        with pytest.raises(InvalidParameter):
            make_hyperquadric(0, 0)


class TestMatrixQuadric:
    def test_reduces_to_hyperquadric(self):
        Q = make_matrix_quadric(1, 1, [[qi(1)]])
        E = make_hyperquadric(1, 1)
        assert structure_equal(Q, E)

    def test_signature_beta_matches_ex(self):
        Q = make_matrix_quadric(1, 2, [[qi(1), qi(0)], [qi(0), qi(-1)]])
        E = make_hyperquadric(2, 1)
        assert structure_equal(Q, E)

    def test_codimension(self):
        Q = make_matrix_quadric(2, 2, [[qi(1), qi(0)], [qi(0), qi(1)]])
        assert Q.dim_w == 4 and Q.dim_z == 4
        assert len(Q.v_basis) == 4
        assert Q.validate()["ok"]

    def test_rejects_bad_beta(self):
        with pytest.raises(InvalidForm):
            make_matrix_quadric(1, 2, [[qi(1), qi(1)], [qi(0), qi(1)]])  # not hermitian
        with pytest.raises(InvalidForm):
            make_matrix_quadric(1, 2, [[qi(1), qi(1)], [qi(1), qi(1)]])  # singular

    def test_points(self):
        rng = random.Random(1)
        Q = make_matrix_quadric(2, 2, [[qi(1), qi(0)], [qi(0), qi(-1)]])
        for _ in range(5):
            p = Q.random_point(rng)
            assert Q.contains(p)
        assert Q.contains(Q.zero_point())


class TestTensor:
    def test_unit_algebra_is_identity(self):
        Q = make_hyperquadric(1, 1)
        T = tensor_quadric(Q, make_complex())
        assert structure_equal(T, Q)

    def test_m2_tensor_matches_matrix_quadric(self):
        # w + w* = zz* over M2 is the m=n=2, beta=I matrix quadric once
        # both sides use the lexicographic matrix-entry coordinates
        T = make_tensored_heisenberg(make_matrix_algebra(2))
        E = make_matrix_quadric(2, 2, [[qi(1), qi(0)], [qi(0), qi(1)]])
        assert structure_equal(T, E)

    def test_embedded_copy(self):
        rng = random.Random(3)
        Q = make_hyperquadric(1, 1)
        A = make_matrix_algebra(2)
        T = make_tensored_heisenberg(A)
        for _ in range(5):
            (w, z) = Q.random_point(rng)
            # (w tensor e, z tensor e)
            wt = tuple(w[0] * c for c in A.unit)
            zt = tuple(z[0] * c for c in A.unit)
            assert T.contains((wt, zt))

    def test_product_algebra_splits(self):
        C = make_complex()
        A = make_product(C, C)
        T = make_tensored_heisenberg(A)
        P = product_quadric(make_hyperquadric(1, 1), make_hyperquadric(1, 1))
        # coordinates already interleave compatibly here: identity permutation
        assert structure_equal(T, P)

    def test_iterated_tensor_matches_tensor_algebra(self):
        Q = make_hyperquadric(1, 1)
        A = make_matrix_algebra(2)
        B = make_dual_numbers()
        T1 = tensor_quadric(tensor_quadric(Q, A), B)
        T2 = tensor_quadric(Q, make_tensor(A, B))
        assert structure_equal(T1, T2)

    def test_dual_numbers_quadric(self):
        T = make_tensored_heisenberg(make_dual_numbers())
        assert (T.dim_w, T.dim_z) == (2, 2)
        assert T.validate()["ok"]

    def test_model_round_trips(self):
        T = make_tensored_heisenberg(make_matrix_algebra(2))
        rng = random.Random(7)
        (w, z) = T.random_point(rng)
        m = T.model
        assert m.mat_to_w(m.w_to_mat(w)) == list(w) or tuple(m.mat_to_w(m.w_to_mat(w))) == w
        assert m.mat_to_z(m.z_to_mat(z)) == z

    def test_model_h_agrees_with_tensor(self):
        T = make_tensored_heisenberg(make_matrix_algebra(2))
        rng = random.Random(11)
        m = T.model
        for _ in range(3):
            z1 = tuple(qi(rng.randrange(-3, 4), rng.randrange(-3, 4)) for _ in range(T.dim_z))
            z2 = tuple(qi(rng.randrange(-3, 4), rng.randrange(-3, 4)) for _ in range(T.dim_z))
            direct = T.h_of(z1, z2)
            via_mat = m.mat_to_w(m.h_mat(m.z_to_mat(z1), m.z_to_mat(z2)))
            assert tuple(via_mat) == direct


class TestProduct:
    def test_dims(self):
        P = product_quadric(make_hyperquadric(1, 1), make_hyperquadric(1, 1))
        assert (P.dim_w, P.dim_z) == (2, 2)
        assert len(P.v_basis) == 2
        assert P.validate()["ok"]

    def test_points(self):
        rng = random.Random(5)
        P = product_quadric(make_hyperquadric(2, 1), make_hyperquadric(1, 1))
        for _ in range(5):
            assert P.contains(P.random_point(rng))


class TestTypeII:
    def test_dimensions(self):
        Q = make_type_II(4)
        assert Q.dim_w == 6 and Q.dim_z == 4
        assert len(Q.v_basis) == 6
        assert Q.validate()["ok"]

    def test_identity_in_w(self):
        Q = make_type_II(4)
        assert Q.model.mat_to_w(Q.model.unit_w()) is not None

    def test_odd_m_rejected(self):
        with pytest.raises(InvalidParameter):
            make_type_II(5)
        with pytest.raises(InvalidParameter):
            make_type_II(2)

    def test_points(self):
        rng = random.Random(9)
        Q = make_type_II(4)
        for _ in range(3):
            assert Q.contains(Q.random_point(rng))


class TestTypeV:
    def test_dimensions(self):
        Q = make_type_V()
        assert Q.dim_w == 8 and Q.dim_z == 8
        assert len(Q.v_basis) == 8
        assert Q.validate()["ok"]

    def test_unit_pairing(self):
        Q = make_type_V()
        e = tuple(QI1 if i == 0 else QI0 for i in range(8))
        assert Q.h_of(e, e) == e

    def test_conjugation_fixes_reals_only(self):
        Q = make_type_V()
        # conj fixes the unit axis and flips the seven imaginary axes
        w = tuple(qi(k) for k in range(8))
        cw = Q.conj_w_apply(w)
        assert cw[0] == qi(0) and cw[1] == qi(-1)

    def test_points(self):
        rng = random.Random(13)
        Q = make_type_V()
        for _ in range(3):
            assert Q.contains(Q.random_point(rng))


class TestValidateFailures:
    def test_zero_h_fails(self):
        zero = (QI0,)
        h = ((zero,),)
        Q = Quadric(1, 1, ((QI1,),), h, ((QI1,),), "custom")
        rep = Q.validate()
        assert not rep["nondegenerate"] and not rep["minimal"]
        assert not rep["ok"]
        with pytest.raises(InvalidForm):
            Q.require_valid()

    def test_first_coordinate_only_fails_minimality(self):
        # V = R^2 but h only ever hits the first coordinate
        h = (((QI1, QI0),),)
        Q = Quadric(
            2, 1,
            ((QI1, QI0), (QI0, QI1)),
            h,
            ((QI1, QI0), (QI0, QI1)),
            "custom",
        )
        rep = Q.validate()
        assert rep["hermitian"] and rep["nondegenerate"]
        assert not rep["minimal"]

    def test_permute_preserves_validity(self):
        Q = make_matrix_quadric(2, 1, [[qi(1)]])
        P = permute_quadric(Q, [3, 2, 1, 0], [1, 0])
        assert P.validate()["ok"]
