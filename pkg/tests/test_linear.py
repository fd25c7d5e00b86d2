import random

import pytest

from crquadrics import modred
from crquadrics.errors import CertificationError
from crquadrics.linear import (
    ComplexRowsBuilder,
    RealLinearSystem,
    SpanSolver,
    hermitian_signature,
    in_span,
    invert_matrix_field,
    matrix_rank_field,
    nullspace,
    nullspace_exact_int,
    nullspace_field_dense,
    nullspace_modular,
    rank_rational,
    real_system_from_rational_rows,
    rref_dense,
    solve_dense,
    span_equal,
)
from crquadrics.rationals import QQ, QQ0, QQ1
from crquadrics.scalars import QQi, I, qi


def _random_sparse_system(rng, nrows, ncols, density=0.3, lo=-9, hi=9):
    rows = []
    for _ in range(nrows):
        row = [0] * ncols
        for j in range(ncols):
            if rng.random() < density:
                row[j] = rng.randrange(lo, hi + 1)
        rows.append(row)
    return real_system_from_rational_rows(rows, ncols)


class TestDense:
    def test_rref_identity(self):
        rows = [[QQ(2), QQ(0)], [QQ(0), QQ(3)]]
        pivots, red = rref_dense(rows, 2)
        assert pivots == [0, 1]
        assert red[0] == [QQ1, QQ0] and red[1] == [QQ0, QQ1]

    def test_solve(self):
        rows = [[QQ(1), QQ(2)], [QQ(3), QQ(4)]]
        [x] = solve_dense(rows, [[QQ(5), QQ(6)]])
        assert [rows[0][0] * x[0] + rows[0][1] * x[1], rows[1][0] * x[0] + rows[1][1] * x[1]] == [QQ(5), QQ(6)]

    def test_solve_inconsistent(self):
        rows = [[QQ(1), QQ(1)], [QQ(2), QQ(2)]]
        with pytest.raises(ValueError):
            solve_dense(rows, [[QQ(1), QQ(3)]])

    def test_invert_roundtrip_qqi(self):
        rng = random.Random(4)
        n = 4
        M = [[qi(rng.randrange(-5, 6), rng.randrange(-5, 6)) for _ in range(n)] for _ in range(n)]
        if matrix_rank_field([list(r) for r in M], n) < n:
            pytest.skip("random draw was singular")
        Minv = invert_matrix_field(M)
        for i in range(n):
            for j in range(n):
                s = qi(0)
                for k in range(n):
                    s = s + M[i][k] * Minv[k][j]
                assert s == (qi(1) if i == j else qi(0))

    def test_invert_singular_raises(self):
        with pytest.raises(ValueError):
            invert_matrix_field([[QQ(1), QQ(2)], [QQ(2), QQ(4)]])

    def test_nullspace_field_dense(self):
        rows = [[qi(1), qi(1), qi(0)], [qi(0), qi(0), qi(1)]]
        basis = nullspace_field_dense(rows, 3)
        assert basis == [(qi(-1), qi(1), qi(0))]


class TestKernel:
    def test_sum_zero_line(self):
        sys = real_system_from_rational_rows([[1, 1]], 2)
        assert nullspace(sys, method="exact") == [(QQ(-1), QQ(1))]
        # same line as the (1, -1) presentation
        assert span_equal(nullspace(sys), [(QQ(1), QQ(-1))])

    def test_empty_system_full_kernel(self):
        sys = RealLinearSystem(3, [])
        basis = nullspace(sys)
        assert len(basis) == 3
        assert rank_rational(basis) == 3

    def test_zero_kernel_certified(self):
        sys = real_system_from_rational_rows([[1, 0], [0, 1], [1, 1]], 2)
        assert nullspace(sys, method="exact") == []
        assert nullspace(sys, method="modular") == []

    def test_fractional_kernel_entries(self):
        sys = real_system_from_rational_rows([[2, 3]], 2)
        expect = [(QQ(-3, 2), QQ(1))]
        assert nullspace(sys, method="exact") == expect
        assert nullspace(sys, method="modular") == expect

    def test_exact_equals_modular_random(self):
        rng = random.Random(2026)
        for trial in range(8):
            nrows = rng.randrange(4, 30)
            ncols = rng.randrange(3, 24)
            sys = _random_sparse_system(rng, nrows, ncols)
            a = nullspace_exact_int(sys.rows, sys.ncols)
            b = nullspace_modular(sys.rows, sys.ncols)
            assert a == b, f"trial {trial}: paths disagree"

    def test_exact_equals_modular_duplicated_rows(self):
        rows = [[1, 2, 3], [1, 2, 3], [4, 5, 6], [4, 5, 6]]
        sys = real_system_from_rational_rows(rows, 3)
        a = nullspace_exact_int(sys.rows, sys.ncols)
        b = nullspace_modular(sys.rows, sys.ncols)
        assert a == b
        assert len(a) == 1

    def test_backends_agree(self):
        rng = random.Random(7)
        sys = _random_sparse_system(rng, 20, 15)
        a = nullspace_modular(sys.rows, sys.ncols, backend="numpy")
        try:
            b = nullspace_modular(sys.rows, sys.ncols, backend="cython")
        except ImportError:
            pytest.skip("compiled backend not built")
        assert a == b

    def test_kernel_vectors_annihilate(self):
        rng = random.Random(12)
        sys = _random_sparse_system(rng, 25, 18)
        for vec in nullspace(sys):
            for cols, vals in sys.rows:
                s = QQ0
                for c, v in zip(cols, vals):
                    s += v * vec[c]
                assert s == QQ0

    def test_wide_system_uses_modular(self):
        # 120 columns forces the modular path through the dispatcher
        rng = random.Random(99)
        sys = _random_sparse_system(rng, 40, 120, density=0.15)
        basis = nullspace(sys)
        assert basis == nullspace_exact_int(sys.rows, sys.ncols)


class TestComplexRows:
    def test_real_part_constraint(self):
        # c + conj(c) = 0 forces c purely imaginary
        b = ComplexRowsBuilder(1, ["c"])
        b.add("row", 0, lin=qi(1), conj=qi(1))
        basis = nullspace(b.build())
        assert basis == [(QQ0, QQ1)]

    def test_imag_part_constraint(self):
        # c - conj(c) = 0 forces c real
        b = ComplexRowsBuilder(1, ["c"])
        b.add("row", 0, lin=qi(1), conj=qi(-1))
        basis = nullspace(b.build())
        assert basis == [(QQ1, QQ0)]

    def test_rotated_constraint(self):
        # i*c - i*conj(c) = 0 also forces c real
        b = ComplexRowsBuilder(1, ["c"])
        b.add("row", 0, lin=I, conj=-I)
        basis = nullspace(b.build())
        assert basis == [(QQ1, QQ0)]

    def test_coupling_two_unknowns(self):
        # c0 = conj(c1): real parts equal, imaginary parts opposite
        b = ComplexRowsBuilder(2, ["c0", "c1"])
        b.add("row", 0, lin=qi(1))
        b.add("row", 1, conj=qi(-1))
        basis = nullspace(b.build())
        assert span_equal(basis, [(QQ1, QQ0, QQ1, QQ0), (QQ0, QQ1, QQ0, QQ(-1))])

    def test_labels(self):
        b = ComplexRowsBuilder(2, ["a", "b"])
        assert b.col_labels == ["re:a", "im:a", "re:b", "im:b"]

    def test_accumulation(self):
        # adding the same unknown twice accumulates coefficients
        b = ComplexRowsBuilder(1)
        b.add("r", 0, lin=qi(1))
        b.add("r", 0, lin=qi(-1), conj=qi(1))
        # net constraint conj(c) = 0: kernel trivial
        assert nullspace(b.build()) == []


class TestSpans:
    def test_rank(self):
        assert rank_rational([(QQ1, QQ0), (QQ0, QQ1), (QQ1, QQ1)]) == 2
        assert rank_rational([]) == 0
        assert rank_rational([(QQ0, QQ0)]) == 0

    def test_in_span(self):
        basis = [(QQ1, QQ0, QQ1), (QQ0, QQ1, QQ0)]
        assert in_span((QQ(2), QQ(3), QQ(2)), basis)
        assert not in_span((QQ1, QQ0, QQ0), basis)

    def test_span_equal(self):
        a = [(QQ1, QQ1), (QQ1, QQ(-1))]
        b = [(QQ1, QQ0), (QQ0, QQ1)]
        assert span_equal(a, b)
        assert not span_equal(a, [(QQ1, QQ0)])

    def test_span_solver(self):
        basis = [(QQ1, QQ0, QQ(2)), (QQ0, QQ1, QQ(3))]
        s = SpanSolver(basis)
        assert s.express((QQ(5), QQ(7), QQ(31))) == [QQ(5), QQ(7)]
        assert s.express((QQ1, QQ1, QQ1)) is None

    def test_span_solver_rejects_dependent_basis(self):
        with pytest.raises(ValueError):
            SpanSolver([(QQ1, QQ1), (QQ(2), QQ(2))])

    def test_span_solver_empty(self):
        s = SpanSolver([])
        assert s.express((QQ0, QQ0)) == []
        assert s.express((QQ1, QQ0)) is None


class TestHermitianSignature:
    def test_diagonal(self):
        M = [[qi(2), qi(0)], [qi(0), qi(-3)]]
        assert hermitian_signature(M) == (1, 1, 0)

    def test_zero_matrix(self):
        M = [[qi(0)] * 3 for _ in range(3)]
        assert hermitian_signature(M) == (0, 0, 3)

    def test_needs_offdiagonal_fold(self):
        M = [[qi(0), qi(1)], [qi(1), qi(0)]]
        assert hermitian_signature(M) == (1, 1, 0)
        M = [[qi(0), I], [-I, qi(0)]]
        assert hermitian_signature(M) == (1, 1, 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            hermitian_signature([[qi(0), qi(1)], [qi(2), qi(0)]])

    def test_congruence_invariance(self):
        rng = random.Random(31)
        D = [qi(1), qi(1), qi(-1), qi(0)]
        n = len(D)
        for _ in range(6):
            while True:
                P = [[qi(rng.randrange(-3, 4), rng.randrange(-3, 4)) for _ in range(n)] for _ in range(n)]
                if matrix_rank_field([list(r) for r in P], n) == n:
                    break
            # M = P* D P stays congruent to D
            M = [[qi(0)] * n for _ in range(n)]
            for i in range(n):
                for j in range(n):
                    s = qi(0)
                    for k in range(n):
                        s = s + P[k][i].conj() * D[k] * P[k][j]
                    M[i][j] = s
            assert hermitian_signature(M) == (2, 1, 1)

    def test_pauli_like(self):
        M = [[qi(1), qi(2, 1)], [qi(2, -1), qi(1)]]
        # det = 1 - 5 = -4 < 0: split signature
        assert hermitian_signature(M) == (1, 1, 0)
