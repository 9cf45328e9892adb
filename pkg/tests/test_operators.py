import numpy as np
import pytest

from lrsim.errors import DimensionCapError, NonHermitianError
from lrsim.operators import (
    DenseUnitary,
    OperatorSum,
    PauliString,
    commutator_norm,
    materialize,
    matrix_exponential_hermitian,
    spectral_norm,
)

from oracles import dense_pauli_sum, snorm


def heis_bond():
    return OperatorSum(
        2,
        (
            (1.0, PauliString(2, {0: "X", 1: "X"})),
            (1.0, PauliString(2, {0: "Y", 1: "Y"})),
            (1.0, PauliString(2, {0: "Z", 1: "Z"})),
        ),
    )


class TestMaterialize:
    def test_single_z(self):
        op = OperatorSum(1, ((1.0, PauliString(1, {0: "Z"})),))
        assert np.allclose(materialize(op), np.diag([1.0, -1.0]))

    def test_empty_terms_zero_matrix(self):
        assert np.array_equal(materialize(OperatorSum(2)), np.zeros((4, 4)))

    def test_heisenberg_bond_spectrum(self):
        # frozen from dense diagonalization: eigenvalues {1, 1, 1, -3}
        evals = np.linalg.eigvalsh(materialize(heis_bond()))
        assert np.allclose(sorted(evals), [-3.0, 1.0, 1.0, 1.0], atol=1e-12)

    def test_matches_kron_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            n = int(rng.integers(1, 5))
            terms = []
            oracle_terms = []
            for _ in range(int(rng.integers(1, 5))):
                support = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
                factors = {int(q): "XYZ"[int(rng.integers(3))] for q in support}
                coeff = float(rng.normal())
                terms.append((coeff, PauliString(n, factors)))
                oracle_terms.append((coeff, factors))
            got = materialize(OperatorSum(n, tuple(terms)))
            assert np.abs(got - dense_pauli_sum(n, oracle_terms)).max() < 1e-12

    def test_linearity(self):
        rng = np.random.default_rng(7)
        a = OperatorSum(2, ((0.7, PauliString(2, {0: "X"})), (-0.2, PauliString(2, {1: "Y"}))))
        b = OperatorSum(2, ((1.3, PauliString(2, {0: "Z", 1: "Z"})),))
        ca, cb = float(rng.normal()), float(rng.normal())
        combined = OperatorSum(2, a.scaled(ca).terms + b.scaled(cb).terms)
        lhs = materialize(combined)
        rhs = ca * materialize(a) + cb * materialize(b)
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_hermiticity(self):
        m = materialize(heis_bond())
        assert np.abs(m - m.conj().T).max() < 1e-12

    def test_cap_enforced(self):
        with pytest.raises(DimensionCapError):
            materialize(OperatorSum(13, ((1.0, PauliString(13, {0: "Z"})),)))

    def test_phase_validation(self):
        with pytest.raises(ValueError):
            PauliString(1, {0: "Z"}, phase=0.5)
        with pytest.raises(ValueError):
            OperatorSum(1, ((1.0, PauliString(1, {0: "Z"}, phase=1j)),))


class TestSpectralNorm:
    def test_identity(self):
        assert spectral_norm(np.eye(4)) == pytest.approx(1.0, abs=1e-12)

    def test_diagonal(self):
        assert spectral_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0, abs=1e-12)

    def test_nilpotent(self):
        # SVD oracle: singular value of [[0, 2i], [0, 0]] is 2
        assert spectral_norm(np.array([[0, 2j], [0, 0]])) == pytest.approx(2.0, abs=1e-12)

    def test_triangle_and_unitary_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            a = rng.standard_normal((30, 30)) + 1j * rng.standard_normal((30, 30))
            b = rng.standard_normal((30, 30)) + 1j * rng.standard_normal((30, 30))
            assert spectral_norm(a + b) <= spectral_norm(a) + spectral_norm(b) + 1e-9
            q, _ = np.linalg.qr(rng.standard_normal((30, 30)) + 1j * rng.standard_normal((30, 30)))
            assert spectral_norm(q @ a) == pytest.approx(spectral_norm(a), rel=1e-9)

    def test_large_dim_iterative_path(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((600, 600)) + 1j * rng.standard_normal((600, 600))
        assert spectral_norm(a) == pytest.approx(snorm(a), rel=1e-9)

    def test_zero_matrix_large(self):
        assert spectral_norm(np.zeros((600, 600))) == 0.0

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            spectral_norm(np.zeros((3, 4)))


class TestCommutatorNorm:
    def test_self_commuting(self):
        x = OperatorSum(1, ((1.0, PauliString(1, {0: "X"})),))
        assert commutator_norm(x, x) == pytest.approx(0.0, abs=1e-12)

    def test_xy_same_qubit(self):
        x = OperatorSum(1, ((1.0, PauliString(1, {0: "X"})),))
        y = OperatorSum(1, ((1.0, PauliString(1, {0: "Y"})),))
        assert commutator_norm(x, y) == pytest.approx(2.0, abs=1e-12)

    def test_overlapping_bonds_against_dense_oracle(self):
        a = OperatorSum(
            3,
            tuple((1.0, PauliString(3, {0: p, 1: p})) for p in "XYZ"),
        )
        b = OperatorSum(
            3,
            tuple((1.0, PauliString(3, {1: p, 2: p})) for p in "XYZ"),
        )
        ma = dense_pauli_sum(3, [(1.0, {0: p, 1: p}) for p in "XYZ"])
        mb = dense_pauli_sum(3, [(1.0, {1: p, 2: p}) for p in "XYZ"])
        expected = snorm(ma @ mb - mb @ ma)
        assert commutator_norm(a, b) == pytest.approx(expected, rel=1e-10)

    def test_disjoint_supports_commute(self):
        a = OperatorSum(4, ((1.0, PauliString(4, {0: "X"})),))
        b = OperatorSum(4, ((1.0, PauliString(4, {3: "Y"})),))
        assert commutator_norm(a, b) == pytest.approx(0.0, abs=1e-12)


class TestMatrixExponential:
    def test_z_quarter_period(self):
        u = matrix_exponential_hermitian(np.diag([1.0, -1.0]), np.pi / 2)
        assert np.allclose(u.matrix, np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]), atol=1e-12)

    def test_zero_time_identity(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((8, 8))
        h = a + a.T
        assert np.allclose(matrix_exponential_hermitian(h, 0.0).matrix, np.eye(8), atol=1e-12)

    def test_x_half_period(self):
        # closed form: exp(-i pi X) = cos(pi) I = -I
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        assert np.allclose(matrix_exponential_hermitian(x, np.pi).matrix, -np.eye(2), atol=1e-12)

    def test_group_property(self):
        rng = np.random.default_rng(9)
        a = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        h = (a + a.conj().T) / 2
        u1 = matrix_exponential_hermitian(h, 0.3).matrix
        u2 = matrix_exponential_hermitian(h, 1.1).matrix
        u12 = matrix_exponential_hermitian(h, 1.4).matrix
        assert snorm(u1 @ u2 - u12) < 1e-9

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            matrix_exponential_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)

    def test_generator_distance_bound(self):
        # ||e^{-iAt} - e^{-iBt}|| <= t ||A - B||, spot-checked at small dim
        rng = np.random.default_rng(17)
        for _ in range(20):
            dim = 2 ** int(rng.integers(1, 5))
            a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            a = (a + a.conj().T) / 2
            d = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            d = (d + d.conj().T) / 2
            d *= rng.uniform(0, 0.5) / snorm(d)
            b = a + d
            t = float(rng.uniform(0, 2))
            lhs = snorm(
                matrix_exponential_hermitian(a, t).matrix - matrix_exponential_hermitian(b, t).matrix
            )
            assert lhs <= t * snorm(d) + 1e-9


class TestDenseUnitary:
    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            DenseUnitary(np.array([[1.0, 0.0], [0.0, 2.0]]))

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            DenseUnitary(np.eye(3))

    def test_adjoint_and_compose(self):
        u = matrix_exponential_hermitian(np.diag([0.3, -0.7]), 1.0)
        both = u.compose(u.adjoint())
        assert np.allclose(both.matrix, np.eye(2), atol=1e-12)
