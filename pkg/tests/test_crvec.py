"""Vector fields, tangency, the graded algebra, and the closed-form bases."""

import pytest

from crquadrics.errors import InvalidGrading, UnsupportedFamily
from crquadrics.crvec import (
    PolyVecField,
    chi_field,
    closed_form_basis,
    compute_hol,
    field_from_vector,
    field_space,
    is_tangent,
    residual_of_field,
    semidirect_level0_basis,
    solve_grade,
    span_equal_fields,
    weight3_kernel_dim,
    zeta_field,
)
from crquadrics.quadric import (
    make_hyperquadric,
    make_matrix_quadric,
    make_tensored_heisenberg,
    make_type_II,
)
from crquadrics.scalars import qi
from crquadrics.star_algebra import (
    make_complex,
    make_dual_numbers,
    make_matrix_algebra,
    make_product,
    make_swap_product,
)

I2 = ((qi(1), qi(0)), (qi(0), qi(1)))


@pytest.fixture(scope="module")
def heis():
    Q = make_hyperquadric(1, 1)
    return Q, compute_hol(Q)


class TestFieldAlgebra:
    def test_zeta_chi_tangent(self, heis):
        Q, _ = heis
        sp = field_space(Q)
        assert is_tangent(Q, zeta_field(sp))
        assert is_tangent(Q, chi_field(sp))

    def test_bracket_antisymmetry_and_bilinearity(self, heis):
        Q, L = heis
        a, b = L.bases[-1][0], L.bases[1][1]
        assert a.bracket(b) == -(b.bracket(a))
        c = L.bases[0][0]
        lhs = (a + c).bracket(b)
        assert lhs == a.bracket(b) + c.bracket(b)

    def test_zeta_weights(self, heis):
        Q, L = heis
        sp = field_space(Q)
        zeta = zeta_field(sp)
        for k in range(-2, 3):
            for xi in L.bases[k]:
                assert zeta.bracket(xi) == xi.smul(qi(k))

    def test_chi_commutes_into_algebra(self, heis):
        Q, L = heis
        chi = chi_field(field_space(Q))
        for k in range(-2, 3):
            for xi in L.bases[k]:
                assert L.contains(chi.bracket(xi))

    def test_grade_decompose_roundtrip(self, heis):
        Q, L = heis
        sp = field_space(Q)
        mixed = L.bases[-2][0] + L.bases[0][1] + L.bases[2][0]
        parts = mixed.grade_decompose()
        assert set(parts) == {-2, 0, 2}
        total = PolyVecField.zero(sp)
        for p in parts.values():
            total = total + p
        assert total == mixed

    def test_coord_vector_roundtrip(self, heis):
        Q, L = heis
        sp = field_space(Q)
        for xi in L.concat_basis():
            assert field_from_vector(sp, xi.coord_vector()) == xi

    def test_apply_to_is_derivation(self, heis):
        Q, L = heis
        sp = field_space(Q)
        xi = L.bases[1][0]
        p = sp.ring.var("w0") * sp.ring.var("z0")
        q = sp.ring.var("z0") + sp.ring.const(qi(2))
        assert xi.apply_to(p * q) == xi.apply_to(p) * q + p * xi.apply_to(q)


class TestResidual:
    def test_nontangent_field_has_residual(self, heis):
        Q, _ = heis
        sp = field_space(Q)
        # w dw alone is not an automorphism direction
        xi = PolyVecField(sp, (sp.ring.var("w0"),), (sp.ring.zero(),))
        assert not is_tangent(Q, xi)
        assert any(not p.is_zero() for p in residual_of_field(Q, xi))

    def test_residual_linear_in_field(self, heis):
        Q, L = heis
        a, b = L.bases[0][0], L.bases[2][0]
        sp = field_space(Q)
        xi = PolyVecField(sp, (sp.ring.var("w0"),), (sp.ring.zero(),))
        r1 = residual_of_field(Q, xi + a + b)
        r2 = residual_of_field(Q, xi)
        assert r1 == r2  # tangent summands contribute nothing


class TestProfiles:
    @pytest.mark.parametrize("n,k", [(1, 1), (2, 1), (2, 0), (3, 2)])
    def test_hyperquadric_profile(self, n, k):
        Q = make_hyperquadric(n, k)
        L = compute_hol(Q)
        assert L.dims() == (1, 2 * n, n * n + 1, 2 * n, 1)
        assert L.total_dim == (n + 2) ** 2 - 1

    def test_matrix_quadric_profile(self):
        L = compute_hol(make_matrix_quadric(2, 2, I2))
        assert L.dims() == (4, 8, 11, 8, 4)

    def test_dual_numbers_profile(self):
        L = compute_hol(make_tensored_heisenberg(make_dual_numbers()))
        assert L.dims() == (2, 4, 5, 4, 2)

    def test_type_II_profile(self):
        L = compute_hol(make_type_II(4))
        assert L.dims() == (6, 8, 17, 8, 6)

    def test_every_basis_field_tangent(self):
        Q = make_hyperquadric(2, 1)
        L = compute_hol(Q)
        for k in range(-2, 3):
            for xi in L.bases[k]:
                assert is_tangent(Q, xi)

    def test_weight3_empty(self):
        for Q in (make_hyperquadric(2, 1), make_matrix_quadric(2, 2, I2)):
            assert weight3_kernel_dim(Q) == 0

    def test_methods_agree(self):
        Q = make_hyperquadric(2, 1)
        for k in range(-2, 3):
            be = solve_grade(Q, k, method="exact")
            bm = solve_grade(Q, k, method="modular")
            assert len(be) == len(bm)
            assert span_equal_fields(be, bm)


class TestGradedAlgebra:
    def test_grading_check(self, heis):
        _, L = heis
        assert L.check_grading()

    def test_grading_check_rejects_mixed(self, heis):
        Q, L = heis
        from crquadrics.crvec import GradedLieAlgebra

        bad = GradedLieAlgebra(Q, {0: [L.bases[0][0] + L.bases[2][0]]})
        with pytest.raises(InvalidGrading):
            bad.check_grading()

    def test_table_properties(self, heis):
        _, L = heis
        assert L.antisymmetry_holds()
        assert L.jacobi_holds()
        assert L.closure_violations() == []

    def test_su21_is_perfect(self, heis):
        _, L = heis
        assert L.derived_dims() == {-2: 1, -1: 2, 0: 2, 1: 2, 2: 1}
        assert L.derived_is_ideal()

    def test_express_and_contains(self, heis):
        Q, L = heis
        sp = field_space(Q)
        v = L.bases[1][0] + L.bases[1][1].smul(qi(3))
        coeffs = L.express(v)
        assert coeffs is not None
        xi = PolyVecField(sp, (sp.ring.one(),), (sp.ring.zero(),))
        assert not L.contains(xi)  # dw alone: real part violates reality

    def test_derived_matches_table_at_nonzero_grades(self):
        Q = make_hyperquadric(2, 1)
        L = compute_hol(Q)
        table = L.bracket_table()
        off = L.grade_offsets()
        from crquadrics.linear import rank_rational

        for m in (-2, -1, 1, 2):
            vecs = []
            for kj in L.bases:
                kk = m - kj
                if kk not in L.bases:
                    continue
                for a in range(*off[kj]):
                    for b in range(*off[kk]):
                        vecs.append(table[a][b])
            assert rank_rational(vecs) == len(L.bases[m])


class TestClosedForms:
    @pytest.mark.parametrize("n,k", [(1, 1), (2, 1), (3, 2)])
    def test_hyperquadric_all_levels(self, n, k):
        Q = make_hyperquadric(n, k)
        L = compute_hol(Q)
        for lev in range(-2, 3):
            cf = closed_form_basis(Q, lev)
            for f in cf:
                assert is_tangent(Q, f)
            assert span_equal_fields(cf, L.bases[lev])

    def test_negative_levels_on_type_II(self):
        Q = make_type_II(4)
        for lev in (-2, -1, 0):
            assert span_equal_fields(closed_form_basis(Q, lev), solve_grade(Q, lev))

    def test_positive_levels_rejected_on_type_II(self):
        Q = make_type_II(4)
        with pytest.raises(UnsupportedFamily):
            closed_form_basis(Q, 1)

    def test_matrix_quadric_all_levels(self):
        Q = make_matrix_quadric(2, 2, I2)
        L = compute_hol(Q)
        for lev in range(-2, 3):
            assert span_equal_fields(closed_form_basis(Q, lev), L.bases[lev])

    @pytest.mark.parametrize(
        "maker",
        [
            make_complex,
            make_dual_numbers,
            lambda: make_matrix_algebra(2),
            lambda: make_product(make_complex(), make_complex()),
            lambda: make_swap_product(make_complex()),
        ],
        ids=["C", "dual", "M2", "CxC", "CxC-swap"],
    )
    def test_tensored_heisenberg_all_levels(self, maker):
        Q = make_tensored_heisenberg(maker())
        L = compute_hol(Q)
        for lev in range(-2, 3):
            cf = closed_form_basis(Q, lev)
            for f in cf:
                assert is_tangent(Q, f)
            assert span_equal_fields(cf, L.bases[lev])
        assert span_equal_fields(semidirect_level0_basis(Q), L.bases[0])

    def test_semidirect_needs_heisenberg_shape(self):
        Q = make_matrix_quadric(2, 2, I2)
        with pytest.raises(UnsupportedFamily):
            semidirect_level0_basis(Q)

    def test_span_equal_fields_negative(self, heis):
        _, L = heis
        assert not span_equal_fields(L.bases[1], L.bases[-1])
