"""Standard-form encodings, the qubiterate, and quantum signal processing.

Desk-scale numerics for the block-simulation kernel: linear-combination-
of-unitaries encodings (select/prepare and the reflection-coefficient
gadget), the qubiterate whose eigenphases are arcsin(lambda/alpha), the
Jacobi-Anger truncation that sets per-block query counts, and the
phase-sequence transfer function. Phase angles are always caller input;
angle synthesis is out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionCapError, LrsimError
from .operators import DIM_CAP, DenseUnitary, OperatorSum, materialize

_CHECK_TOL = 1e-10


def _next_power_of_two(m: int) -> int:
    return 1 << (m - 1).bit_length()


def _prepare_unitary(amplitudes: np.ndarray) -> np.ndarray:
    """Real Householder reflection sending |0> to the given unit vector."""
    dim = len(amplitudes)
    g = amplitudes.astype(np.complex128)
    e0 = np.zeros(dim, dtype=np.complex128)
    e0[0] = 1.0
    v = e0 - g
    nv2 = float(np.real(np.vdot(v, v)))
    if nv2 < 1e-28:
        return np.eye(dim, dtype=np.complex128)
    return np.eye(dim, dtype=np.complex128) - 2.0 * np.outer(v, v.conj()) / nv2


@dataclass(frozen=True)
class StandardFormEncoding:
    """select O and prepare G with <G| O |G> = H / alpha on the system register."""

    select_o: DenseUnitary
    prepare_g: DenseUnitary
    alpha: float
    m_terms: int
    m_padded: int
    n_system: int
    ancilla_dim: int
    energy_shift: float = 0.0
    dropped_terms: int = 0

    @property
    def g_state(self) -> np.ndarray:
        return self.prepare_g.matrix[:, 0]

    def encoded_hamiltonian(self) -> np.ndarray:
        """alpha * (<G| x 1) O (|G> x 1), the operator the encoding realizes."""
        d = 2**self.n_system
        o4 = self.select_o.matrix.reshape(self.ancilla_dim, d, self.ancilla_dim, d)
        g = self.g_state
        return self.alpha * np.einsum("j,jakb,k->ab", g.conj(), o4, g)

    def selection_involution_defect(self) -> float:
        o = self.select_o.matrix
        return float(np.linalg.norm(o @ o - np.eye(o.shape[0])))


def encode_lcu(op: OperatorSum) -> StandardFormEncoding:
    """Plain select/prepare encoding O = sum_j |j><j| x P_j, |G> = sum_j sqrt(a_j/a) |j>.

    Negative coefficients are folded into the string phase first, zero
    coefficients are dropped (counted on the record), and the term count
    is padded to a power of two with zero-amplitude identity strings; the
    padding leaves the encoded operator untouched, so the recorded energy
    shift is zero.
    """
    entries = []
    dropped = 0
    for coeff, string in op.terms:
        if coeff == 0.0:
            dropped += 1
            continue
        entries.append((abs(coeff), string if coeff > 0 else string.negated()))
    if not entries:
        raise LrsimError("cannot encode an operator with no nonzero terms")
    m = len(entries)
    m_padded = _next_power_of_two(m)
    dim_sys = 2**op.n_qubits
    if m_padded * dim_sys > DIM_CAP:
        raise DimensionCapError(
            f"padded ancilla x system dimension {m_padded * dim_sys} exceeds {DIM_CAP}"
        )
    alpha = sum(c for c, _ in entries)
    amps = np.zeros(m_padded)
    amps[:m] = np.sqrt([c / alpha for c, _ in entries])
    select = np.zeros((m_padded * dim_sys, m_padded * dim_sys), dtype=np.complex128)
    eye = np.eye(dim_sys, dtype=np.complex128)
    for j in range(m_padded):
        block = entries[j][1].materialize() if j < m else eye
        select[j * dim_sys : (j + 1) * dim_sys, j * dim_sys : (j + 1) * dim_sys] = block
    enc = StandardFormEncoding(
        select_o=DenseUnitary(select),
        prepare_g=DenseUnitary(_prepare_unitary(amps)),
        alpha=float(alpha),
        m_terms=m,
        m_padded=m_padded,
        n_system=op.n_qubits,
        ancilla_dim=m_padded,
        energy_shift=0.0,
        dropped_terms=dropped,
    )
    _verify_encoding(enc, materialize(op))
    return enc


def _verify_encoding(enc: StandardFormEncoding, target: np.ndarray) -> None:
    shift = enc.energy_shift * np.eye(target.shape[0])
    defect = np.abs(enc.encoded_hamiltonian() - (target + shift)).max()
    if defect > _CHECK_TOL:
        raise LrsimError(f"standard-form identity violated by {defect:.3e}")
    inv = enc.selection_involution_defect()
    if inv > _CHECK_TOL:
        raise LrsimError(f"selection operator is not an involution ({inv:.3e})")


@dataclass(frozen=True)
class Qubiterate:
    """W = -i (2|G><G| - 1) O, with eigenphases arcsin(lambda / alpha)."""

    w: DenseUnitary
    alpha: float


def build_qubiterate(enc: StandardFormEncoding) -> Qubiterate:
    inv = enc.selection_involution_defect()
    if inv > _CHECK_TOL:
        raise LrsimError(f"qubiterate needs O^2 = 1; defect {inv:.3e}")
    g = enc.g_state
    reflection = 2.0 * np.outer(g, g.conj()) - np.eye(enc.ancilla_dim)
    dim_sys = 2**enc.n_system
    w = -1j * np.kron(reflection, np.eye(dim_sys)) @ enc.select_o.matrix
    return Qubiterate(DenseUnitary(w), enc.alpha)


def eigenphase_deviation(enc: StandardFormEncoding, qub: Qubiterate) -> float:
    """Max deviation of the qubiterate sectors from the eigenphase law.

    For every eigenpair of the encoded operator (shift included), the
    plane spanned by |G>|v> and W|G>|v> must be W-invariant with
    eigenvalues -e^{i th} and e^{-i th}, th = arcsin(lambda / alpha).
    The phase is certified through sin th: the exact sector identity
    <G,v| W |G,v> = -i sin th holds with no conditioning loss even when
    |lambda| = alpha (where arcsin amplifies eigenvalue roundoff without
    bound, so a direct phase comparison is meaningless in doubles). On
    sectors with cos th away from zero the restricted eigenvalues are
    additionally compared against {-e^{i th}, e^{-i th}} directly.
    """
    evals, evecs = np.linalg.eigh(enc.encoded_hamiltonian())
    w = qub.w.matrix
    g = enc.g_state
    worst = 0.0
    for lam, vec in zip(evals, evecs.T):
        g_lam = np.kron(g, vec)
        w_g = w @ g_lam
        overlap = np.vdot(g_lam, w_g)
        sine = lam / qub.alpha
        worst = max(worst, abs(1j * overlap - sine))
        b1 = w_g - overlap * g_lam
        nb1 = np.linalg.norm(b1)  # equals |cos th| up to roundoff
        if nb1 < 1e-4:
            continue
        theta = math.asin(min(1.0, max(-1.0, sine)))
        basis = np.stack([g_lam, b1 / nb1], axis=1)
        w_restricted = basis.conj().T @ w @ basis
        invariance = np.linalg.norm(w @ basis - basis @ w_restricted)
        eigs = np.linalg.eigvals(w_restricted)
        expected = np.array([-np.exp(1j * theta), np.exp(-1j * theta)])
        mismatch = min(
            np.abs(eigs - expected).max(), np.abs(eigs - expected[::-1]).max()
        )
        worst = max(worst, mismatch + invariance)
    return worst


def bessel_j_array(k_max: int, x: float) -> np.ndarray:
    """J_0(x) .. J_{k_max}(x) by Miller's downward recurrence.

    The recurrence runs from a start order comfortably above both k_max
    and |x| and is normalized with J_0 + 2 sum J_{2k} = 1.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    if x == 0.0:
        out = np.zeros(k_max + 1)
        out[0] = 1.0
        return out
    ax = abs(x)
    start = int(max(k_max, ax) + 2 * math.ceil(math.sqrt(40.0 * max(k_max, ax, 1))) + 20)
    js = np.zeros(start + 2)
    js[start + 1] = 0.0
    js[start] = 1e-280
    for k in range(start, 0, -1):
        js[k - 1] = (2.0 * k / ax) * js[k] - js[k + 1]
        if abs(js[k - 1]) > 1e250:
            js[k - 1 :] *= 1e-250
    norm = js[0] + 2.0 * js[2::2].sum()
    out = js[: k_max + 1] / norm
    if x < 0:
        signs = np.array([(-1) ** k for k in range(k_max + 1)], dtype=float)
        out = out * signs
    return out


def jacobi_anger_error_bound(alpha_t: float, q: int) -> float:
    """The stated truncation estimate 32 (alpha t)^q / (2^q q!)."""
    if q < 1:
        raise ValueError("q must be positive")
    if alpha_t == 0.0:
        return 0.0
    log_val = math.log(32.0) + q * (math.log(alpha_t) - math.log(2.0)) - math.lgamma(q + 1)
    return math.exp(log_val) if log_val < 700 else math.inf


@dataclass(frozen=True)
class JacobiAngerTruncation:
    """Truncation of e^{-i alpha t sin th} at harmonic order q - 1.

    ``coefficients`` holds J_0 .. J_{q-1}; the kept series uses harmonics
    k <= N/2 with q = N/2 + 1 (N even phases downstream)."""

    alpha_t: float
    order: int
    coefficients: tuple[float, ...]
    error_bound: float

    @property
    def phase_count(self) -> int:
        return 2 * (self.order - 1)

    def series_value(self, theta: float) -> complex:
        ks = np.arange(self.order)
        coeffs = np.asarray(self.coefficients)
        real = coeffs[0] + 2.0 * np.sum(coeffs[2::2] * np.cos(ks[2::2] * theta))
        imag = -2.0 * np.sum(coeffs[1::2] * np.sin(ks[1::2] * theta))
        return complex(real, imag)

    def tight_tail_bound(self) -> float:
        """2 sum_{k >= q} |J_k|, the sharp counterpart of error_bound."""
        extent = self.order + 80 + int(abs(self.alpha_t))
        js = bessel_j_array(extent, self.alpha_t)
        return float(2.0 * np.abs(js[self.order :]).sum())


def jacobi_anger(alpha_t: float, eps_target: float) -> JacobiAngerTruncation:
    """Smallest truncation order q with 32 (alpha t)^q / (2^q q!) <= eps_target."""
    if alpha_t < 0:
        raise ValueError("alpha_t must be nonnegative")
    if eps_target <= 0:
        raise ValueError("eps_target must be positive")
    q = 1
    while jacobi_anger_error_bound(alpha_t, q) > eps_target:
        q += 1
        if q > 10**5:
            raise LrsimError("truncation order exceeded 1e5; check inputs")
    coeffs = bessel_j_array(q - 1, alpha_t)
    return JacobiAngerTruncation(alpha_t, q, tuple(coeffs.tolist()), jacobi_anger_error_bound(alpha_t, q))


@dataclass(frozen=True)
class PhaseSequence:
    """QSP phase angles; the construction requires an even count."""

    phis: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "phis", tuple(float(p) for p in self.phis))
        if len(self.phis) % 2 != 0:
            raise ValueError("the phase count N must be even")

    def __len__(self) -> int:
        return len(self.phis)


def transfer_function(phis: PhaseSequence, theta: float) -> complex:
    """<+| e^{-i th P_{phi_N}/2} ... e^{-i th P_{phi_1}/2} |+>, P_phi = X cos phi + Y sin phi."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    total = np.eye(2, dtype=np.complex128)
    for phi in reversed(phis.phis):
        p = np.array(
            [[0.0, math.cos(phi) - 1j * math.sin(phi)], [math.cos(phi) + 1j * math.sin(phi), 0.0]],
            dtype=np.complex128,
        )
        total = total @ (c * np.eye(2) - 1j * s * p)
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    return complex(plus @ total @ plus)


_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


def reflection_gadget(beta: float) -> DenseUnitary:
    """Q = (1 x e^{i beta X}) SWAP (1 x e^{-i beta X}); involution with <00|Q|00> = cos^2 beta."""
    x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    rot = math.cos(beta) * np.eye(2) + 1j * math.sin(beta) * x
    q = np.kron(np.eye(2), rot) @ _SWAP @ np.kron(np.eye(2), rot.conj().T)
    defect = np.linalg.norm(q @ q - np.eye(4))
    corner = abs(q[0, 0] - math.cos(beta) ** 2)
    if defect > 1e-12 or corner > 1e-12:
        raise LrsimError(f"gadget identities violated (involution {defect:.2e}, corner {corner:.2e})")
    return DenseUnitary(q)


def encode_lcu_gadget(op: OperatorSum) -> StandardFormEncoding:
    """Uniform-prepare encoding with per-term reflection gadgets.

    Coefficients must lie in [0, 1] (c_j = cos^2 beta_j); the prepared
    state is uniform over the padded index register tensored with |00> on
    the gadget register, and O = sum_j |j><j| x Q_j x P_j encodes
    (1/M_padded) sum_j c_j P_j. Padding to a power of two uses beta = 0
    identity terms, which add (pad count) x identity to the alpha-scaled
    encoded operator; that shift is recorded on the encoding.
    """
    entries = []
    for coeff, string in op.terms:
        if not 0.0 <= coeff <= 1.0:
            raise LrsimError(f"gadget encoding needs coefficients in [0, 1], got {coeff}")
        entries.append((coeff, string))
    if not entries:
        raise LrsimError("cannot encode an operator with no terms")
    m = len(entries)
    m_padded = _next_power_of_two(m)
    dim_sys = 2**op.n_qubits
    ancilla_dim = m_padded * 4
    if ancilla_dim * dim_sys > DIM_CAP:
        raise DimensionCapError(f"gadget dimension {ancilla_dim * dim_sys} exceeds {DIM_CAP}")
    eye_sys = np.eye(dim_sys, dtype=np.complex128)
    blocks = []
    for j in range(m_padded):
        if j < m:
            coeff, string = entries[j]
            beta = math.acos(math.sqrt(coeff))
            blocks.append(np.kron(reflection_gadget(beta).matrix, string.materialize()))
        else:
            blocks.append(np.kron(_SWAP, eye_sys))
    full = np.zeros((ancilla_dim * dim_sys, ancilla_dim * dim_sys), dtype=np.complex128)
    step = 4 * dim_sys
    for j, block in enumerate(blocks):
        full[j * step : (j + 1) * step, j * step : (j + 1) * step] = block
    amps = np.zeros(ancilla_dim)
    amps[0::4] = 1.0 / math.sqrt(m_padded)  # |j> x |00>
    n_pad = m_padded - m
    enc = StandardFormEncoding(
        select_o=DenseUnitary(full),
        prepare_g=DenseUnitary(_prepare_unitary(amps)),
        alpha=float(m_padded),
        m_terms=m,
        m_padded=m_padded,
        n_system=op.n_qubits,
        ancilla_dim=ancilla_dim,
        energy_shift=float(n_pad),
        dropped_terms=0,
    )
    _verify_encoding(enc, materialize(op))
    return enc
