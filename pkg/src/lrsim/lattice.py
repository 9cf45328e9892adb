"""Lattices, local terms, time-sliced Hamiltonians, and locality constants.

The lattice metric is rescaled so the nearest-neighbor spacing is 1; every
local term is then expected to have diameter at most 1, and the validation
report flags anything that breaks the unit-norm / unit-diameter contract
the decomposition theory assumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .chebyshev import ChebyshevExpansion
from .errors import SchemaError
from .operators import OperatorSum, PauliString, commutator_norm, materialize, spectral_norm

DENSITY_CAP_DEFAULT = 16


@dataclass(frozen=True)
class Lattice:
    """Sites embedded in R^D (D = 1 or 2) with open or periodic boundary."""

    dimension: int
    sites: tuple[tuple[float, ...], ...]
    boundary: str = "open"
    density_cap: int = DENSITY_CAP_DEFAULT

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be open or periodic, got {self.boundary!r}")
        sites = tuple(tuple(float(c) for c in s) for s in self.sites)
        object.__setattr__(self, "sites", sites)
        if len(set(sites)) != len(sites):
            raise ValueError("site coordinates must be distinct")
        for s in sites:
            if len(s) != self.dimension:
                raise ValueError(f"site {s} does not match dimension {self.dimension}")
        object.__setattr__(self, "_scale", 1.0 / self._raw_nn_distance())
        object.__setattr__(self, "_extent", self._raw_extent())
        occupancy = self.max_ball_occupancy()
        if occupancy > self.density_cap:
            raise ValueError(f"unit-ball occupancy {occupancy} exceeds density cap {self.density_cap}")

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def scale(self) -> float:
        """Factor applied to raw coordinates so nearest neighbors sit at distance 1."""
        return self._scale  # type: ignore[attr-defined]

    def _raw_nn_distance(self) -> float:
        if len(self.sites) < 2:
            return 1.0
        coords = np.array(self.sites)
        best = math.inf
        for i in range(len(coords)):
            d = np.linalg.norm(coords[i + 1 :] - coords[i], axis=1)
            if d.size:
                best = min(best, float(d.min()))
        return best if best > 0 else 1.0

    def _raw_extent(self) -> tuple[float, ...]:
        # period per axis for the wrap-around metric: span plus one spacing
        coords = np.array(self.sites)
        spans = coords.max(axis=0) - coords.min(axis=0)
        nn = self._raw_nn_distance()
        return tuple(float(s) + nn for s in spans)

    def distance(self, i: int, j: int) -> float:
        delta = np.abs(np.array(self.sites[i]) - np.array(self.sites[j]))
        if self.boundary == "periodic":
            extent = np.array(self._extent)  # type: ignore[attr-defined]
            delta = np.minimum(delta, extent - delta)
        return float(np.linalg.norm(delta)) * self.scale

    def set_distance(self, a: Iterable[int], b: Iterable[int]) -> float:
        a, b = list(a), list(b)
        if not a or not b:
            return math.inf
        return min(self.distance(i, j) for i in a for j in b)

    def diameter(self, sites: Iterable[int]) -> float:
        sites = list(sites)
        if len(sites) < 2:
            return 0.0
        return max(self.distance(i, j) for i in sites for j in sites if i < j)

    def max_ball_occupancy(self) -> int:
        """Largest number of sites in any unit ball (rescaled metric)."""
        best = 0
        for i in range(self.n):
            count = sum(1 for j in range(self.n) if self.distance(i, j) <= 1 + 1e-9)
            best = max(best, count)
        return best


def chain_lattice(n: int, boundary: str = "open") -> Lattice:
    return Lattice(1, tuple((float(i),) for i in range(n)), boundary)


def grid_lattice(n: int, boundary: str = "open") -> Lattice:
    """Row-major near-square grid holding n sites."""
    cols = math.ceil(math.sqrt(n))
    sites = tuple((float(i % cols), float(i // cols)) for i in range(n))
    return Lattice(2, sites, boundary)


@dataclass(frozen=True)
class LocalTerm:
    """One geometrically local summand h_X, optionally with a time profile.

    ``profile`` multiplies the whole operator by a scalar function of time,
    given as a Chebyshev record on its stated domain.
    """

    support: frozenset[int]
    operator: OperatorSum
    profile: Optional[ChebyshevExpansion] = None

    def __post_init__(self):
        object.__setattr__(self, "support", frozenset(self.support))
        if not self.operator.support <= self.support:
            raise ValueError("operator acts outside the declared support")

    def norm(self) -> float:
        qubits = tuple(sorted(self.support))
        if not qubits:
            return 0.0
        return spectral_norm(materialize(self.operator.restricted_to(qubits)))


@dataclass(frozen=True)
class TimeSlice:
    t_start: float
    t_end: float
    terms: tuple[LocalTerm, ...]

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValueError(f"slice [{self.t_start}, {self.t_end}] is empty")
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def length(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class LatticeHamiltonian:
    lattice: Lattice
    slices: tuple[TimeSlice, ...]

    def __post_init__(self):
        object.__setattr__(self, "slices", tuple(self.slices))
        if not self.slices:
            raise ValueError("at least one time slice is required")
        if abs(self.slices[0].t_start) > 1e-12:
            raise ValueError("time domain must start at 0")
        for prev, cur in zip(self.slices, self.slices[1:]):
            if abs(prev.t_end - cur.t_start) > 1e-12:
                raise ValueError("slices must be contiguous and increasing")
        for s in self.slices:
            for term in s.terms:
                if not all(0 <= q < self.n for q in term.support):
                    raise ValueError("term support outside the lattice")

    @property
    def n(self) -> int:
        return self.lattice.n

    @property
    def total_time(self) -> float:
        return self.slices[-1].t_end

    def slice_index_at(self, t: float) -> int:
        for k, s in enumerate(self.slices):
            if s.t_start - 1e-12 <= t < s.t_end - 1e-12:
                return k
        return len(self.slices) - 1

    def is_time_independent(self) -> bool:
        first = self.slices[0].terms
        return all(s.terms == first for s in self.slices) and not any(
            term.profile is not None for s in self.slices for term in s.terms
        )


@dataclass(frozen=True)
class BoundInputs:
    """Locality and commutator constants extracted from a Hamiltonian.

    zeta0: max_p sum_{Z containing p} |Z| ||h_Z||
    zeta:  max_x sum_{X containing x} ||h_X|| |X|^2 exp(mu diam X)
    eta:   max over intersecting pairs of ||[h_X, h_Y]|| / (||h_X|| ||h_Y||), capped at 2
    k_cap: max pairwise ||[h_X, h_Y]||
    degree: interaction-graph degree (max number of other terms a term intersects)
    """

    zeta0: float
    zeta: float
    mu: float
    eta: float
    k_cap: float
    degree: int

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if not 0 <= self.eta <= 2:
            raise ValueError(f"eta must lie in [0, 2], got {self.eta}")
        for name in ("zeta0", "zeta", "k_cap"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and nonnegative")


# a-priori bound on any |z| <= 1 Heisenberg bond term: the worst case
# XX + YY + ZZ + Z_j - Z_{j+1} has spectral norm 1 + 2 sqrt(2). Rescaling
# every benchmark instance by its inverse enforces ||h_j|| <= 1 with one
# family-wide (instance-independent) time unit.
HEISENBERG_FAMILY_NORM_BOUND = 1.0 + 2.0 * math.sqrt(2.0)


def build_heisenberg_1d(
    n: int,
    z_fields: Sequence[float],
    boundary: str = "open",
    total_time: float = 1.0,
) -> LatticeHamiltonian:
    """Antiferromagnetic Heisenberg chain with per-site longitudinal fields.

    Bond term j (j = 0..n-2) is X_j X_{j+1} + Y_j Y_{j+1} + Z_j Z_{j+1}
    plus the field z_j Z_j; the last site's field z_{n-1} Z_{n-1} rides on
    the final bond so every term stays 2-local and all n fields appear.
    The time domain [0, total_time] is cut into unit slices (piecewise
    constant with identical terms, so evolution is unaffected).
    """
    if boundary != "open":
        raise ValueError("only open boundary is supported for the benchmark chain")
    if n < 2:
        raise ValueError(f"need at least 2 sites, got {n}")
    z = [float(v) for v in z_fields]
    if len(z) != n:
        raise ValueError(f"expected {n} field values, got {len(z)}")
    lattice = chain_lattice(n, boundary)
    terms = []
    for j in range(n - 1):
        strings = [
            (1.0, PauliString(n, {j: "X", j + 1: "X"})),
            (1.0, PauliString(n, {j: "Y", j + 1: "Y"})),
            (1.0, PauliString(n, {j: "Z", j + 1: "Z"})),
        ]
        if z[j] != 0.0:
            strings.append((z[j], PauliString(n, {j: "Z"})))
        if j == n - 2 and z[n - 1] != 0.0:
            strings.append((z[n - 1], PauliString(n, {n - 1: "Z"})))
        terms.append(LocalTerm(frozenset({j, j + 1}), OperatorSum(n, tuple(strings))))
    slices = _unit_slices(tuple(terms), total_time)
    return LatticeHamiltonian(lattice, slices)


def _unit_slices(terms: tuple[LocalTerm, ...], total_time: float) -> tuple[TimeSlice, ...]:
    if total_time <= 0:
        raise ValueError("total_time must be positive")
    edges = [float(k) for k in range(int(math.floor(total_time)) + 1)]
    if edges[-1] < total_time - 1e-12:
        edges.append(total_time)
    if len(edges) == 1:
        edges = [0.0, total_time]
    return tuple(TimeSlice(a, b, terms) for a, b in zip(edges, edges[1:]))


def rescale_hamiltonian(ham: LatticeHamiltonian, factor: float, total_time: Optional[float] = None) -> LatticeHamiltonian:
    """Scale every coefficient by ``factor`` (time domain optionally re-cut).

    Benchmark runs use factor = 1 / max ||h_X|| so the unit-norm hypothesis
    holds; rescaling H and 1/T together leaves the physics unchanged.
    """
    if factor <= 0:
        raise ValueError("factor must be positive")
    if any(s.terms != ham.slices[0].terms for s in ham.slices):
        raise ValueError("rescaling is only supported for slice-uniform Hamiltonians")
    new_terms = tuple(
        LocalTerm(t.support, t.operator.scaled(factor), t.profile) for t in ham.slices[0].terms
    )
    span = total_time if total_time is not None else ham.total_time
    return LatticeHamiltonian(ham.lattice, _unit_slices(new_terms, span))


def extract_bound_inputs(ham: LatticeHamiltonian, mu: float) -> BoundInputs:
    """Brute-force the locality/commutator constants over all slices."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    lattice = ham.lattice
    zeta0 = zeta = eta = k_cap = 0.0
    degree = 0
    seen: set[tuple[TimeSlice, ...]] = set()
    for sl in ham.slices:
        key = (sl.terms,)
        if key in seen:
            continue
        seen.add(key)
        norms = [term.norm() for term in sl.terms]
        per_site0 = {q: 0.0 for q in range(lattice.n)}
        per_site = {q: 0.0 for q in range(lattice.n)}
        for term, nrm in zip(sl.terms, norms):
            size = len(term.support)
            diam = lattice.diameter(term.support)
            for q in term.support:
                per_site0[q] += size * nrm
                per_site[q] += nrm * size**2 * math.exp(mu * diam)
        if per_site0:
            zeta0 = max(zeta0, max(per_site0.values()))
            zeta = max(zeta, max(per_site.values()))
        for i, (ti, ni) in enumerate(zip(sl.terms, norms)):
            neighbors = 0
            for j, (tj, nj) in enumerate(zip(sl.terms, norms)):
                if i == j or not (ti.support & tj.support):
                    continue
                neighbors += 1
                if j < i:
                    continue
                c = commutator_norm(ti.operator, tj.operator)
                k_cap = max(k_cap, c)
                if ni > 0 and nj > 0:
                    eta = max(eta, min(2.0, c / (ni * nj)))
            degree = max(degree, neighbors)
    return BoundInputs(zeta0=zeta0, zeta=zeta, mu=mu, eta=eta, k_cap=k_cap, degree=degree)


@dataclass(frozen=True)
class ValidationReport:
    """Soft findings from checking a Hamiltonian against the unit-local contract."""

    diam_violations: tuple[tuple[int, int, float], ...]  # (slice, term, diameter)
    norm_violations: tuple[tuple[int, int, float], ...]  # (slice, term, norm)
    strong_terms: tuple[tuple[int, int, float], ...]  # (slice, term, J)
    slice_length_violations: tuple[int, ...]
    max_ball_occupancy: int
    density_cap: int
    max_term_norm: float
    suggested_rescale: float
    metric_scale: float

    @property
    def ok(self) -> bool:
        return not (
            self.diam_violations
            or self.norm_violations
            or self.slice_length_violations
            or self.max_ball_occupancy > self.density_cap
        )

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "diam_violations": [list(v) for v in self.diam_violations],
            "norm_violations": [list(v) for v in self.norm_violations],
            "strong_terms": [list(v) for v in self.strong_terms],
            "slice_length_violations": list(self.slice_length_violations),
            "max_ball_occupancy": self.max_ball_occupancy,
            "density_cap": self.density_cap,
            "max_term_norm": self.max_term_norm,
            "suggested_rescale": self.suggested_rescale,
            "metric_scale": self.metric_scale,
        }


def validate(ham: LatticeHamiltonian) -> ValidationReport:
    """Report (never raise) violations of the theorem hypotheses.

    Flags terms with diameter above 1 in the rescaled metric, terms with
    norm above 1 (these double as "strong terms" with J = ||h||), slices
    longer than unit time, and unit-ball overcrowding. When norms exceed 1
    the suggested rescale factor is 1 / max ||h_X||; rescaling H and 1/T
    by that factor restores the normalized setting.
    """
    diam_bad = []
    norm_bad = []
    strong = []
    slice_bad = []
    max_norm = 0.0
    for k, sl in enumerate(ham.slices):
        if sl.length > 1 + 1e-12:
            slice_bad.append(k)
        for idx, term in enumerate(sl.terms):
            diam = ham.lattice.diameter(term.support)
            if diam > 1 + 1e-9:
                diam_bad.append((k, idx, diam))
            nrm = term.norm()
            max_norm = max(max_norm, nrm)
            if nrm > 1 + 1e-9:
                norm_bad.append((k, idx, nrm))
                strong.append((k, idx, nrm))
    return ValidationReport(
        diam_violations=tuple(diam_bad),
        norm_violations=tuple(norm_bad),
        strong_terms=tuple(strong),
        slice_length_violations=tuple(slice_bad),
        max_ball_occupancy=ham.lattice.max_ball_occupancy(),
        density_cap=ham.lattice.density_cap,
        max_term_norm=max_norm,
        suggested_rescale=1.0 / max_norm if max_norm > 1 else 1.0,
        metric_scale=ham.lattice.scale,
    )


_TOP_KEYS = {"n", "dimension", "boundary", "terms", "slices"}
_TERM_KEYS = {"support", "paulis"}
_PAULI_KEYS = {"coeff", "string"}
_SLICE_KEYS = {"t0", "t1"}


def hamiltonian_from_json_dict(doc: dict) -> LatticeHamiltonian:
    """Ingest the wire-format Hamiltonian document (unknown fields rejected)."""
    if not isinstance(doc, dict):
        raise SchemaError("top-level document must be an object")
    if set(doc) != _TOP_KEYS:
        raise SchemaError(f"expected exactly keys {sorted(_TOP_KEYS)}, got {sorted(doc)}")
    n = doc["n"]
    if not isinstance(n, int) or n < 1:
        raise SchemaError("'n' must be a positive integer")
    if doc["dimension"] not in (1, 2):
        raise SchemaError("'dimension' must be 1 or 2")
    if doc["boundary"] not in ("open", "periodic"):
        raise SchemaError("'boundary' must be 'open' or 'periodic'")
    lattice = chain_lattice(n, doc["boundary"]) if doc["dimension"] == 1 else grid_lattice(n, doc["boundary"])

    terms = []
    for t_doc in doc["terms"]:
        if set(t_doc) != _TERM_KEYS:
            raise SchemaError(f"term keys must be {sorted(_TERM_KEYS)}, got {sorted(t_doc)}")
        support = frozenset(t_doc["support"])
        if not support or not all(isinstance(q, int) and 0 <= q < n for q in support):
            raise SchemaError(f"bad term support {t_doc['support']}")
        strings = []
        for p_doc in t_doc["paulis"]:
            if set(p_doc) != _PAULI_KEYS:
                raise SchemaError(f"pauli keys must be {sorted(_PAULI_KEYS)}, got {sorted(p_doc)}")
            try:
                factors = {int(q): label for q, label in p_doc["string"].items()}
            except (ValueError, AttributeError) as exc:
                raise SchemaError(f"bad pauli string {p_doc['string']}") from exc
            if not set(factors) <= support:
                raise SchemaError("pauli string acts outside its term support")
            try:
                strings.append((float(p_doc["coeff"]), PauliString(n, factors)))
            except ValueError as exc:
                raise SchemaError(str(exc)) from exc
        terms.append(LocalTerm(support, OperatorSum(n, tuple(strings))))

    edges = []
    for s_doc in doc["slices"]:
        if set(s_doc) != _SLICE_KEYS:
            raise SchemaError(f"slice keys must be {sorted(_SLICE_KEYS)}, got {sorted(s_doc)}")
        edges.append((float(s_doc["t0"]), float(s_doc["t1"])))
    if not edges:
        raise SchemaError("at least one slice is required")
    try:
        slices = tuple(TimeSlice(t0, t1, tuple(terms)) for t0, t1 in edges)
        return LatticeHamiltonian(lattice, slices)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def hamiltonian_to_json_dict(ham: LatticeHamiltonian) -> dict:
    """Emit the wire format (terms taken from the first slice)."""
    terms = []
    for term in ham.slices[0].terms:
        paulis = [
            {"coeff": coeff, "string": {str(q): label for q, label in string.factors}}
            for coeff, string in term.operator.terms
        ]
        terms.append({"support": sorted(term.support), "paulis": paulis})
    return {
        "n": ham.n,
        "dimension": ham.lattice.dimension,
        "boundary": ham.lattice.boundary,
        "terms": terms,
        "slices": [{"t0": s.t_start, "t1": s.t_end} for s in ham.slices],
    }
