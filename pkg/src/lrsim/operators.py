"""Dense complex linear algebra and Pauli-string operator algebra.

Everything here is desk-scale by design: operators materialize to dense
matrices of dimension at most 2**QUBIT_CAP. All values are immutable and
every function is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DimensionCapError, NonHermitianError

QUBIT_CAP = 12
DIM_CAP = 2**QUBIT_CAP

_SVD_CUTOVER = 512
_UNITARITY_TOL = 1e-10
_PAULI_LABELS = ("X", "Y", "Z")
_VALID_PHASES = (1, -1, 1j, -1j)


@dataclass(frozen=True)
class PauliString:
    """A phased product of single-qubit Pauli factors (identity elsewhere).

    ``factors`` accepts a mapping qubit index -> one of "X", "Y", "Z" and is
    stored as a sorted tuple of pairs (keeps instances hashable). The empty
    map is the identity. ``phase`` is restricted to {+1, -1, +i, -i}.
    """

    n_qubits: int
    factors: Mapping[int, str] | tuple[tuple[int, str], ...] = ()
    phase: complex = 1

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        pairs = tuple(sorted(dict(self.factors).items()))
        object.__setattr__(self, "factors", pairs)
        for q, label in pairs:
            if not (0 <= q < self.n_qubits):
                raise ValueError(f"qubit index {q} out of range for n={self.n_qubits}")
            if label not in _PAULI_LABELS:
                raise ValueError(f"unknown Pauli label {label!r}")
        if not any(self.phase == p for p in _VALID_PHASES):
            raise ValueError(f"phase must be one of +-1, +-i, got {self.phase}")

    @property
    def factor_map(self) -> dict[int, str]:
        return dict(self.factors)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(q for q, _ in self.factors)

    def negated(self) -> "PauliString":
        return PauliString(self.n_qubits, self.factors, -self.phase)

    def column_action(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (rows, amplitudes) such that P[rows[c], c] = amp[c].

        A Pauli string is a signed permutation in the computational basis;
        this is the cheap route to dense materialization. Qubit 0 is the
        most significant bit.
        """
        dim = 2**self.n_qubits
        cols = np.arange(dim)
        xmask = 0
        amps = np.full(dim, self.phase, dtype=np.complex128)
        for q, label in self.factors:
            bit = (cols >> (self.n_qubits - 1 - q)) & 1
            if label == "X":
                xmask |= 1 << (self.n_qubits - 1 - q)
            elif label == "Y":
                xmask |= 1 << (self.n_qubits - 1 - q)
                amps = amps * (1j * (1 - 2 * bit))
            else:  # Z
                amps = amps * (1 - 2 * bit)
        return cols ^ xmask, amps

    def materialize(self) -> np.ndarray:
        dim = 2**self.n_qubits
        if dim > DIM_CAP:
            raise DimensionCapError(f"{self.n_qubits} qubits exceed the cap of {QUBIT_CAP}")
        rows, amps = self.column_action()
        mat = np.zeros((dim, dim), dtype=np.complex128)
        mat[rows, np.arange(dim)] = amps
        return mat


@dataclass(frozen=True)
class OperatorSum:
    """A Hermitian operator as a real-weighted sum of Pauli strings."""

    n_qubits: int
    terms: tuple[tuple[float, PauliString], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(c), p) for c, p in self.terms))
        for coeff, string in self.terms:
            if not np.isfinite(coeff):
                raise ValueError("coefficients must be finite")
            if string.n_qubits != self.n_qubits:
                raise ValueError("all strings must share n_qubits")
            if string.phase not in (1, -1):
                raise ValueError("Hermiticity requires string phases +-1")

    @property
    def support(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for _, string in self.terms:
            out = out | string.support
        return out

    def scaled(self, factor: float) -> "OperatorSum":
        return OperatorSum(self.n_qubits, tuple((factor * c, p) for c, p in self.terms))

    def restricted_to(self, qubits: tuple[int, ...]) -> "OperatorSum":
        """Relabel onto the compact register ``qubits`` (in the given order)."""
        pos = {q: i for i, q in enumerate(qubits)}
        new_terms = []
        for coeff, string in self.terms:
            if not string.support <= set(qubits):
                raise ValueError(f"term support {set(string.support)} not within {qubits}")
            new_terms.append(
                (coeff, PauliString(len(qubits), {pos[q]: l for q, l in string.factors}, string.phase))
            )
        return OperatorSum(len(qubits), tuple(new_terms))

    def coefficient_one_norm(self) -> float:
        return float(sum(abs(c) for c, _ in self.terms))


def materialize(op: OperatorSum) -> np.ndarray:
    """Dense Hermitian matrix of an OperatorSum (qubit 0 most significant)."""
    if op.n_qubits > QUBIT_CAP:
        raise DimensionCapError(f"{op.n_qubits} qubits exceed the cap of {QUBIT_CAP}")
    dim = 2**op.n_qubits
    mat = np.zeros((dim, dim), dtype=np.complex128)
    cols = np.arange(dim)
    for coeff, string in op.terms:
        # each column holds exactly one entry, so fancy-index += is safe
        rows, amps = string.column_action()
        mat[rows, cols] += coeff * amps
    return mat


def lanczos_sigma_max(
    apply_op,
    apply_adj,
    dim: int,
    seed: int = 0x5EED,
    max_steps: int = 300,
    rtol: float = 1e-12,
    window: int = 8,
) -> float:
    """Largest singular value of a matrix-free operator D, seeded and reproducible.

    Lanczos with full reorthogonalization on D^dag D, stopping when the
    (monotone) Ritz maximum stalls. Value-based stopping handles the
    nearly flat top spectra typical of differences of unitaries, where
    residual-based stopping never triggers; applying D and D^dag directly
    keeps the roundoff floor near machine precision even for tiny ||D||.
    """
    import scipy.linalg

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    probe = apply_op(v)
    if np.linalg.norm(probe) < 1e-13:
        return float(np.linalg.norm(probe))

    max_steps = min(max_steps, dim)
    basis = np.empty((dim, max_steps), dtype=np.complex128)
    basis[:, 0] = v
    alphas: list[float] = []
    betas: list[float] = []
    theta = 0.0
    theta_prev = -1.0
    stall = 0
    for k in range(max_steps):
        w = apply_adj(apply_op(basis[:, k]))
        alphas.append(float(np.real(np.vdot(basis[:, k], w))))
        for _ in range(2):
            w -= basis[:, : k + 1] @ (basis[:, : k + 1].conj().T @ w)
        beta = float(np.linalg.norm(w))
        theta = float(
            scipy.linalg.eigvalsh_tridiagonal(np.array(alphas), np.array(betas))[-1]
            if k > 0
            else alphas[0]
        )
        if theta - theta_prev <= rtol * max(abs(theta), 1e-300):
            stall += 1
            if stall >= window and k >= 30:
                break
        else:
            stall = 0
        theta_prev = theta
        if beta < 1e-14 * math.sqrt(max(theta, 1e-300)) or k + 1 >= max_steps:
            break
        betas.append(beta)
        basis[:, k + 1] = w / beta
    return math.sqrt(max(theta, 0.0))


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value of a square matrix (dim <= 4096).

    Small matrices go through a full SVD; larger ones use seeded Lanczos
    on A^dag A (the Krylov-accelerated form of power iteration, needed
    because difference-of-unitary spectra cluster flat at the top), so
    results are reproducible run to run.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dim = a.shape[0]
    if dim > DIM_CAP:
        raise DimensionCapError(f"dimension {dim} exceeds the cap of {DIM_CAP}")
    if dim < _SVD_CUTOVER:
        if dim == 0:
            return 0.0
        return float(np.linalg.svd(a, compute_uv=False)[0])
    scale = float(np.abs(a).max())
    if scale == 0.0:
        return 0.0
    b = a / scale
    b_dag = b.conj().T
    return scale * lanczos_sigma_max(lambda x: b @ x, lambda x: b_dag @ x, dim)


def hermiticity_defect(h: np.ndarray) -> float:
    """Frobenius norm of the skew part; upper-bounds the spectral defect."""
    return float(np.linalg.norm(h - h.conj().T))


@dataclass(frozen=True)
class DenseUnitary:
    """A dense unitary with its invariant checked at construction.

    Below the SVD cutover dimension the unitarity defect ||U^dag U - 1||
    is checked exactly (Frobenius, which dominates the spectral norm);
    above it, by seeded random probes.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        dim = m.shape[0]
        if m.ndim != 2 or m.shape[1] != dim:
            raise ValueError(f"unitary must be square, got {m.shape}")
        if dim & (dim - 1) or dim == 0:
            raise ValueError(f"dimension {dim} is not a power of two")
        if dim > DIM_CAP:
            raise DimensionCapError(f"dimension {dim} exceeds the cap of {DIM_CAP}")
        if dim <= _SVD_CUTOVER:
            defect = np.linalg.norm(m.conj().T @ m - np.eye(dim))
        else:
            rng = np.random.default_rng(0xC0FFEE)
            probes = rng.standard_normal((dim, 8)) + 1j * rng.standard_normal((dim, 8))
            probes /= np.linalg.norm(probes, axis=0)
            defect = np.linalg.norm(m.conj().T @ (m @ probes) - probes, axis=0).max()
        if defect > _UNITARITY_TOL:
            raise ValueError(f"unitarity defect {defect:.3e} exceeds {_UNITARITY_TOL}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def adjoint(self) -> "DenseUnitary":
        return DenseUnitary(self.matrix.conj().T)

    def compose(self, other: "DenseUnitary") -> "DenseUnitary":
        """Matrix product self @ other (other acts first)."""
        return DenseUnitary(self.matrix @ other.matrix)


def matrix_exponential_hermitian(h: np.ndarray, t: float) -> DenseUnitary:
    """exp(-i h t) through the Hermitian eigendecomposition of ``h``."""
    h = np.asarray(h, dtype=np.complex128)
    dim = h.shape[0]
    if dim > DIM_CAP:
        raise DimensionCapError(f"dimension {dim} exceeds the cap of {DIM_CAP}")
    if hermiticity_defect(h) > 1e-10:
        raise NonHermitianError("input is not Hermitian within 1e-10")
    evals, evecs = np.linalg.eigh((h + h.conj().T) / 2)
    return DenseUnitary((evecs * np.exp(-1j * evals * t)) @ evecs.conj().T)


def commutator_norm(a: OperatorSum, b: OperatorSum) -> float:
    """|| [A, B] || computed densely on the joint support of the two terms."""
    joint = tuple(sorted(a.support | b.support))
    if not joint:
        return 0.0
    if len(joint) > QUBIT_CAP:
        raise DimensionCapError(f"joint support {len(joint)} exceeds the cap of {QUBIT_CAP}")
    ma = materialize(a.restricted_to(joint))
    mb = materialize(b.restricted_to(joint))
    return spectral_norm(ma @ mb - mb @ ma)
