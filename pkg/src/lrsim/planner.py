"""Compile Hamiltonians into block-decomposition plans and execute them.

A plan is an ordered list of forward/backward block evolutions whose
product approximates the global evolution operator. Steps are stored in
application order (the first list entry acts on the state first), so the
matrix product runs right to left over the list.

Canonical 1D pattern: cuts every ``block`` sites, each cut expanded into a
backward overlap of ``ell`` sites centered on the cut; leftover sites fold
into the rightmost block. Forward blocks then alternate with backward
overlaps exactly as in the recursive construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bounds import BoundQuery, bound_commutator_aware, bound_strict_local
from .errorfit import FitModel
from .errors import DimensionCapError, InvalidCutError, LrsimError, SchemaError
from .lattice import BoundInputs, LatticeHamiltonian, extract_bound_inputs, validate
from .operators import QUBIT_CAP, DenseUnitary, matrix_exponential_hermitian
from .oracle import materialize_terms

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class BlockStep:
    """One block evolution: support interval, direction, duration, slice.

    ``support`` = (lo, hi) is an inclusive site interval; lo > hi denotes a
    wrap-around arc on a periodic chain.
    """

    support: tuple[int, int]
    direction: str
    duration: float
    slice_index: int = 0

    def __post_init__(self):
        if self.direction not in (FORWARD, BACKWARD):
            raise ValueError(f"direction must be forward/backward, got {self.direction!r}")
        if self.duration <= 0:
            raise ValueError("duration must be positive")

    def sites(self, n: int) -> frozenset[int]:
        lo, hi = self.support
        if lo <= hi:
            return frozenset(range(lo, hi + 1))
        return frozenset(range(lo, n)) | frozenset(range(0, hi + 1))

    @property
    def signed_duration(self) -> float:
        return self.duration if self.direction == FORWARD else -self.duration


@dataclass(frozen=True)
class DecompositionPlan:
    steps: tuple[BlockStep, ...]
    ell: int
    block_size: int
    layer_count: int
    predicted_error: float
    error_source: str = "analytic"
    n_cuts: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.error_source not in ("fit", "analytic"):
            raise ValueError("error_source must be 'fit' or 'analytic'")
        if self.predicted_error < 0:
            raise ValueError("predicted_error must be nonnegative")

    def telescoping_defect(self, n: int) -> float:
        """Max deviation of per-site net (forward - backward) duration from their common value."""
        net = np.zeros(n)
        for step in self.steps:
            for s in step.sites(n):
                net[s] += step.signed_duration
        return float(net.max() - net.min()) if n else 0.0

    def simulated_time(self, n: int) -> float:
        net = np.zeros(n)
        for step in self.steps:
            for s in step.sites(n):
                net[s] += step.signed_duration
        return float(np.median(net))

    def covers(self, n: int) -> bool:
        seen: set[int] = set()
        for step in self.steps:
            seen |= step.sites(n)
        return seen >= set(range(n))


def _eps_lr_analytic(inputs: BoundInputs, boundary_terms: Sequence[tuple[float, int]], t: float, ell: int) -> float:
    """Rigorous per-cut error: t * sum over boundary terms of the restriction bound.

    Uses the smaller of the factorial strict-local bound and the
    commutator-aware bound, each at distance ell - 1 (the overlap keeps the
    truncated terms that far from the retained region). Loose by design.
    """
    dist = max(ell - 1, 0)
    total = 0.0
    for nrm, size in boundary_terms:
        q = BoundQuery(inputs, t, ell=dist, x_size=size, norm_a=nrm, norm_b=1.0, dist=float(dist))
        total += min(bound_strict_local(q, "restriction"), bound_commutator_aware(q, "restriction"))
    return abs(t) * total


def _predict(
    ham: LatticeHamiltonian,
    t: float,
    ell: int,
    n_cuts: int,
    model: Optional[FitModel],
    mu: float = 1.0,
) -> tuple[float, str]:
    if n_cuts == 0:
        return 0.0, "fit" if model is not None else "analytic"
    if model is not None:
        return n_cuts * model.predict(t, ell), "fit"
    inputs = extract_bound_inputs(ham, mu)
    sl = ham.slices[0]
    worst = max((term.norm(), len(term.support)) for term in sl.terms)
    return n_cuts * _eps_lr_analytic(inputs, [worst], t, ell), "analytic"


def plan_staircase_1d(
    ham: LatticeHamiltonian,
    t: float,
    a: int,
    b: int,
    model: Optional[FitModel] = None,
    slice_index: int = 0,
) -> DecompositionPlan:
    """Three-step staircase: forward on sites >= a, backward on the overlap
    [a, b], forward on sites <= b. Overlap holds ell = b - a + 1 sites.
    """
    n = ham.n
    if not (0 <= a < b <= n):
        raise InvalidCutError(f"need 0 <= a < b <= n, got a={a}, b={b}")
    if t <= 0:
        raise InvalidCutError("t must be positive")
    ell = b - a + 1
    b_site = min(b, n - 1)
    steps = (
        BlockStep((a, n - 1), FORWARD, t, slice_index),
        BlockStep((a, b_site), BACKWARD, t, slice_index),
        BlockStep((0, b_site), FORWARD, t, slice_index),
    )
    trivial = a == 0 or b_site >= n - 1
    predicted, source = _predict(ham, t, ell, 0 if trivial else 1, model)
    return DecompositionPlan(steps, ell, max(b_site + 1, n - a), 3, predicted, source, n_cuts=0 if trivial else 1)


def _cut_positions(n: int, block: int) -> list[int]:
    segments = math.ceil(n / block)
    return [k * block for k in range(1, segments)]


def plan_recursive_1d(
    ham: LatticeHamiltonian,
    t: float,
    ell: int,
    block: int,
    model: Optional[FitModel] = None,
    slice_index: int = 0,
) -> DecompositionPlan:
    """Alternating forward/backward pattern from repeated staircase cuts.

    Cuts sit every ``block`` sites; each gets a backward overlap of ``ell``
    sites centered on it. An open chain with m cuts yields 2m + 1 steps;
    a periodic chain closes the ring with one extra cut whose overlap sits
    on the wrap-around bond.
    """
    n = ham.n
    if ell < 2:
        raise InvalidCutError("ell must be at least 2")
    if block < 2 * ell:
        raise InvalidCutError("block must be at least 2 * ell")
    if t <= 0 or t > 1 + 1e-12:
        raise InvalidCutError("recursive planning expects 0 < t <= 1 (unit slices)")
    if ham.lattice.boundary == "periodic":
        raise InvalidCutError("periodic chains go through plan_ring_1d")
    if n <= block:
        steps = (BlockStep((0, n - 1), FORWARD, t, slice_index),)
        return DecompositionPlan(steps, ell, n, 1, 0.0, "fit" if model else "analytic", n_cuts=0)

    cuts = _cut_positions(n, block)
    overlaps: list[tuple[int, int]] = []
    for idx, p in enumerate(cuts):
        # center the overlap on the cut, shifting inward at the right edge
        a = min(p - math.ceil(ell / 2), n - 1 - ell)
        bb = a + ell - 1
        if overlaps and a <= overlaps[-1][1] and idx == len(cuts) - 1:
            # no room left of the edge: fold the leftover into the rightmost block
            continue
        if a < 1 or bb > n - 2 or (overlaps and a <= overlaps[-1][1]):
            raise InvalidCutError(f"overlap [{a}, {bb}] spills or collides on the open chain")
        overlaps.append((a, bb))
    if not overlaps:
        steps = (BlockStep((0, n - 1), FORWARD, t, slice_index),)
        return DecompositionPlan(steps, ell, n, 1, 0.0, "fit" if model else "analytic", n_cuts=0)

    steps: list[BlockStep] = []
    m = len(overlaps)
    steps.append(BlockStep((overlaps[-1][0], n - 1), FORWARD, t, slice_index))
    for k in range(m - 1, -1, -1):
        a_k, b_k = overlaps[k]
        steps.append(BlockStep((a_k, b_k), BACKWARD, t, slice_index))
        left = overlaps[k - 1][0] if k > 0 else 0
        steps.append(BlockStep((left, b_k), FORWARD, t, slice_index))
    predicted, source = _predict(ham, t, ell, m, model)
    return DecompositionPlan(tuple(steps), ell, block, 3, predicted, source, n_cuts=m)


def plan_full_evolution(
    ham: LatticeHamiltonian,
    ell: int,
    block: int,
    model: Optional[FitModel] = None,
) -> DecompositionPlan:
    """Recursive plan for the whole declared time domain, slice by slice.

    Each slice contributes its own alternating pattern (applied in time
    order); predicted errors add across slices per the m * eps_LR
    accounting.
    """
    steps: list[BlockStep] = []
    cuts = 0
    predicted = 0.0
    source = "fit" if model is not None else "analytic"
    for k, sl in enumerate(ham.slices):
        sub = plan_recursive_1d(ham, sl.length, ell, block, model, slice_index=k)
        steps.extend(sub.steps)
        cuts += sub.n_cuts
        predicted += sub.predicted_error
        source = sub.error_source
    return DecompositionPlan(tuple(steps), ell, block, 3, predicted, source, n_cuts=cuts)


def plan_ring_1d(
    ham: LatticeHamiltonian,
    t: float,
    ell: int,
    model: Optional[FitModel] = None,
    slice_index: int = 0,
) -> DecompositionPlan:
    """Single split of a periodic chain into two arcs with two overlap components."""
    n = ham.n
    if ham.lattice.boundary != "periodic":
        raise InvalidCutError("plan_ring_1d requires a periodic chain")
    if not 2 <= ell <= n // 2 - 1:
        raise InvalidCutError(f"need 2 <= ell <= n/2 - 1 for a ring of {n} sites")
    half = n // 2
    # arc Y = [0, half + ell - 1], arc Z = [half, ell - 1] (wrapping); the two
    # overlap components are [half, half + ell - 1] and [0, ell - 1]
    steps = (
        BlockStep((half, ell - 1), FORWARD, t, slice_index),
        BlockStep((half, half + ell - 1), BACKWARD, t, slice_index),
        BlockStep((0, ell - 1), BACKWARD, t, slice_index),
        BlockStep((0, half + ell - 1), FORWARD, t, slice_index),
    )
    predicted, source = _predict(ham, t, ell, 2, model)
    return DecompositionPlan(steps, ell, half + ell, 3, predicted, source, n_cuts=2)


def plan_merged_stacks(
    ham: LatticeHamiltonian,
    t: float,
    ell: int,
    repetitions: int,
    a: Optional[int] = None,
    model: Optional[FitModel] = None,
    slice_index: int = 0,
) -> DecompositionPlan:
    """Repeat the staircase ``repetitions`` times, merging adjacent stacks.

    Consecutive stacks alternate orientation, so the doubled boundary
    blocks coalesce into single steps of duration 2t (an exact algebraic
    identity, not an extra approximation). r = 1 falls back to the plain
    staircase.
    """
    n = ham.n
    if repetitions < 1:
        raise InvalidCutError("repetitions must be >= 1")
    if a is None:
        a = max(1, (n - ell) // 2)
    b = a + ell - 1
    if repetitions == 1:
        return plan_staircase_1d(ham, t, a, b, model, slice_index)
    if not (1 <= a and b <= n - 2):
        raise InvalidCutError(f"overlap [{a}, {b}] must sit strictly inside the chain")
    if repetitions * t > ham.total_time + 1e-9:
        raise InvalidCutError("r * t exceeds the declared time domain")
    f_left = (0, b)
    f_right = (a, n - 1)
    over = (a, b)
    steps: list[BlockStep] = [BlockStep(f_left, FORWARD, t, slice_index)]
    for rep in range(repetitions - 1):
        steps.append(BlockStep(over, BACKWARD, t, slice_index))
        middle = f_right if rep % 2 == 0 else f_left
        steps.append(BlockStep(middle, FORWARD, 2 * t, slice_index))
    steps.append(BlockStep(over, BACKWARD, t, slice_index))
    steps.append(BlockStep(f_left if repetitions % 2 == 0 else f_right, FORWARD, t, slice_index))
    predicted, source = _predict(ham, t, ell, repetitions, model)
    return DecompositionPlan(tuple(steps), ell, max(b + 1, n - a), 3, predicted, source, n_cuts=repetitions)


def plan_unmerged_stacks(
    ham: LatticeHamiltonian,
    t: float,
    ell: int,
    repetitions: int,
    a: Optional[int] = None,
    model: Optional[FitModel] = None,
    slice_index: int = 0,
) -> DecompositionPlan:
    """Same repeated staircase without merging (orientation still alternates)."""
    n = ham.n
    if a is None:
        a = max(1, (n - ell) // 2)
    b = a + ell - 1
    if not (0 <= a < b <= n - 1):
        raise InvalidCutError(f"bad overlap [{a}, {b}]")
    f_left, f_right, over = (0, b), (a, n - 1), (a, b)
    steps: list[BlockStep] = []
    for rep in range(repetitions):
        order = (f_left, over, f_right) if rep % 2 == 0 else (f_right, over, f_left)
        steps.append(BlockStep(order[0], FORWARD, t, slice_index))
        steps.append(BlockStep(order[1], BACKWARD, t, slice_index))
        steps.append(BlockStep(order[2], FORWARD, t, slice_index))
    predicted, source = _predict(ham, t, ell, repetitions, model)
    return DecompositionPlan(tuple(steps), ell, max(b + 1, n - a), 3, predicted, source, n_cuts=repetitions)


def layers_for_coloring(alpha: int) -> int:
    """Layers needed for unit-time evolution under an alpha-colorable tessellation."""
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    return 2 * alpha - 1


@dataclass(frozen=True)
class HyperplaneAccounting:
    """Block/layer/error accounting for the D-round hyperplane decomposition.

    ``error_coefficients`` lists, per round, the factor multiplying
    e^{-mu ell} in the error estimate; no matrices are built.
    """

    system_size: int
    dimension: int
    ell: int
    blocks_per_line: int
    blocks_total: int
    layers: int
    error_coefficients: tuple[float, ...]

    @property
    def total_error_coefficient(self) -> float:
        return sum(self.error_coefficients)


def plan_hyperplane_nd(system_size: int, dimension: int, ell: int) -> HyperplaneAccounting:
    """Count blocks, layers, and error factors for hyperplane slicing.

    ``ell`` doubles as the slab pitch: a line of length L carries
    ceil(L / ell) slabs, i.e. 2 ceil(L / ell) - 1 alternating blocks, the
    same count plan_recursive_1d emits for block = ell. Layers go like 3^D
    and the per-round error coefficient is L^D / ell (zero when a line
    holds a single slab).
    """
    if dimension not in (1, 2, 3):
        raise ValueError("dimension must be 1, 2, or 3")
    if not 0 < ell <= system_size:
        raise ValueError("need 0 < ell <= system_size")
    lines = math.ceil(system_size / ell)
    per_line = 2 * lines - 1
    cuts = lines - 1
    coeff = 0.0 if cuts == 0 else system_size**dimension / ell
    return HyperplaneAccounting(
        system_size=system_size,
        dimension=dimension,
        ell=ell,
        blocks_per_line=per_line,
        blocks_total=per_line**dimension,
        layers=3**dimension,
        error_coefficients=tuple([coeff] * dimension),
    )


@dataclass(frozen=True)
class StrongTermIsolation:
    cut_bond: int
    j_norm: float
    ell_standard: int
    ell_strong: int
    substep_factor: int
    c_used: float


def strong_overlap_enlargement(j_norm: float, c: float = 1.0) -> int:
    """Extra overlap needed to suppress a strength-J boundary term: ceil(c ln J)."""
    if j_norm <= 1.0:
        return 0
    return max(0, math.ceil(c * math.log(j_norm)))


def isolate_strong_term(
    ham: LatticeHamiltonian,
    eps: float,
    c: Optional[float] = None,
    model: Optional[FitModel] = None,
) -> StrongTermIsolation:
    """Cut placement for a single strong term of norm J > 1 on a 1D chain.

    The strong term goes into a boundary cut so its factor J enters the
    truncation error only linearly; suppressing it costs an overlap
    enlargement of ceil(c ln J) on top of the standard
    ell = ceil(c ln(L T / eps)), plus time substeps by a factor ceil(J)
    inside the strong block only. ``c`` defaults to 1 (or 1/mu_fit when a
    fitted model is supplied).
    """
    if ham.lattice.dimension != 1:
        raise LrsimError("strong-term isolation is implemented for 1D chains")
    report = validate(ham)
    if len(report.strong_terms) != 1:
        raise LrsimError(
            f"expected exactly one strong term, found {len(report.strong_terms)}: {report.strong_terms}"
        )
    slice_idx, term_idx, j_norm = report.strong_terms[0]
    term = ham.slices[slice_idx].terms[term_idx]
    cut_bond = min(term.support)
    big_l = float(ham.n)
    big_t = max(ham.total_time, 1.0)
    if c is None:
        c = 1.0
        if model is not None:
            ell_prov = max(2.0, math.log(big_l * big_t / eps))
            mu_fit = math.log((ell_prov + model.offset) / model.vel) + 1.0
            c = 1.0 / max(mu_fit, 0.1)
    ell_std = max(2, math.ceil(c * math.log(big_l * big_t / eps)))
    enlargement = strong_overlap_enlargement(j_norm, c)
    return StrongTermIsolation(
        cut_bond=cut_bond,
        j_norm=j_norm,
        ell_standard=ell_std,
        ell_strong=ell_std + enlargement,
        substep_factor=math.ceil(j_norm - 1e-9),
        c_used=c,
    )


def apply_plan(plan: DecompositionPlan, ham: LatticeHamiltonian) -> DenseUnitary:
    """Execute a plan densely: the product of exact block unitaries in plan order."""
    n = ham.n
    if n > QUBIT_CAP:
        raise DimensionCapError(f"{n} qubits exceed the cap of {QUBIT_CAP}")
    dim = 2**n
    total = np.eye(dim, dtype=np.complex128)
    cache: dict[tuple, np.ndarray] = {}
    for step in plan.steps:
        key = (step.support, step.direction, step.duration, step.slice_index)
        if key not in cache:
            sl = ham.slices[step.slice_index]
            sites = step.sites(n)
            terms = [t for t in sl.terms if t.support <= sites]
            h = materialize_terms(terms, n)
            sign = 1.0 if step.direction == FORWARD else -1.0
            cache[key] = matrix_exponential_hermitian(h, sign * step.duration).matrix
        total = cache[key] @ total
    return DenseUnitary(total)


_PLAN_KEYS = {"ell", "steps", "predicted_error", "error_source"}
_STEP_KEYS = {"support", "direction", "duration", "slice"}
_DIR_CODE = {FORWARD: "f", BACKWARD: "b"}
_CODE_DIR = {"f": FORWARD, "b": BACKWARD}


def plan_to_json_dict(plan: DecompositionPlan) -> dict:
    return {
        "ell": plan.ell,
        "steps": [
            {
                "support": [step.support[0], step.support[1]],
                "direction": _DIR_CODE[step.direction],
                "duration": step.duration,
                "slice": step.slice_index,
            }
            for step in plan.steps
        ],
        "predicted_error": plan.predicted_error,
        "error_source": plan.error_source,
    }


def plan_from_json_dict(doc: dict, n: int) -> DecompositionPlan:
    """Parse and validate a plan document (coverage + telescoping enforced)."""
    if not isinstance(doc, dict) or set(doc) != _PLAN_KEYS:
        raise SchemaError(f"plan document must have keys {sorted(_PLAN_KEYS)}")
    steps = []
    for s_doc in doc["steps"]:
        if set(s_doc) != _STEP_KEYS:
            raise SchemaError(f"step keys must be {sorted(_STEP_KEYS)}, got {sorted(s_doc)}")
        if s_doc["direction"] not in _CODE_DIR:
            raise SchemaError(f"direction must be 'f' or 'b', got {s_doc['direction']!r}")
        lo, hi = s_doc["support"]
        if not (0 <= lo < n and 0 <= hi < n):
            raise SchemaError(f"support {s_doc['support']} outside 0..{n - 1}")
        try:
            steps.append(
                BlockStep((int(lo), int(hi)), _CODE_DIR[s_doc["direction"]], float(s_doc["duration"]), int(s_doc["slice"]))
            )
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    if not steps:
        raise SchemaError("plan has no steps")
    block_size = max(len(s.sites(n)) for s in steps if s.direction == FORWARD)
    plan = DecompositionPlan(
        steps=tuple(steps),
        ell=int(doc["ell"]),
        block_size=block_size,
        layer_count=3,
        predicted_error=float(doc["predicted_error"]),
        error_source=str(doc["error_source"]),
    )
    if not plan.covers(n):
        raise SchemaError("plan steps do not cover the lattice")
    defect = plan.telescoping_defect(n)
    if defect > 1e-9:
        raise SchemaError(f"telescoping violated: per-site net durations spread by {defect:.3e}")
    return plan


def plan_dumps(plan: DecompositionPlan) -> str:
    return json.dumps(plan_to_json_dict(plan), indent=2)
