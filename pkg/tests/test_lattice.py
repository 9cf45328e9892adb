import math

import numpy as np
import pytest

from lrsim.errors import SchemaError
from lrsim.lattice import (
    Lattice,
    LocalTerm,
    TimeSlice,
    LatticeHamiltonian,
    build_heisenberg_1d,
    chain_lattice,
    extract_bound_inputs,
    grid_lattice,
    hamiltonian_from_json_dict,
    hamiltonian_to_json_dict,
    rescale_hamiltonian,
    validate,
)
from lrsim.operators import OperatorSum, PauliString, materialize

from oracles import brute_force_bound_inputs, heisenberg_dense


class TestLattice:
    def test_chain_metric(self):
        lat = chain_lattice(5)
        assert lat.distance(0, 4) == pytest.approx(4.0)
        assert lat.diameter([1, 2, 3]) == pytest.approx(2.0)

    def test_periodic_wraps(self):
        lat = chain_lattice(6, "periodic")
        assert lat.distance(0, 5) == pytest.approx(1.0)
        assert lat.distance(0, 3) == pytest.approx(3.0)

    def test_rescaling_to_unit_spacing(self):
        lat = Lattice(1, ((0.0,), (0.5,), (1.0,)))
        assert lat.scale == pytest.approx(2.0)
        assert lat.distance(0, 1) == pytest.approx(1.0)

    def test_distinct_coordinates_enforced(self):
        with pytest.raises(ValueError):
            Lattice(1, ((0.0,), (0.0,)))

    def test_density_cap(self):
        # interior chain sites have 3 neighbors within a unit ball
        with pytest.raises(ValueError):
            Lattice(1, tuple((float(i),) for i in range(5)), density_cap=2)

    def test_grid(self):
        lat = grid_lattice(6)
        assert lat.dimension == 2
        assert lat.n == 6
        assert lat.max_ball_occupancy() <= lat.density_cap


class TestHeisenbergBuilder:
    def test_minimal_chain_spectrum(self):
        ham = build_heisenberg_1d(2, [0.0, 0.0])
        assert len(ham.slices[0].terms) == 1
        evals = np.linalg.eigvalsh(materialize(ham.slices[0].terms[0].operator))
        assert np.allclose(sorted(evals), [-3.0, 1.0, 1.0, 1.0], atol=1e-12)

    def test_field_placement(self):
        ham = build_heisenberg_1d(3, [0.5, 0.25, -0.75])
        terms = ham.slices[0].terms
        assert len(terms) == 2
        # bond 0: three couplings + z_0; bond 1 also absorbs the last site's field
        assert len(terms[0].operator.terms) == 4
        assert len(terms[1].operator.terms) == 5

    def test_total_matches_dense_oracle(self):
        rng = np.random.default_rng(42)
        z = rng.uniform(-1, 1, 5)
        ham = build_heisenberg_1d(5, z)
        total = sum(materialize(t.operator) for t in ham.slices[0].terms)
        assert np.abs(total - heisenberg_dense(5, z)).max() < 1e-12

    def test_zero_fields_dropped(self):
        ham = build_heisenberg_1d(3, [0.0, 1.0, 0.0])
        assert len(ham.slices[0].terms[0].operator.terms) == 3

    def test_size_validation(self):
        with pytest.raises(ValueError):
            build_heisenberg_1d(1, [0.0])

    def test_unit_slices(self):
        ham = build_heisenberg_1d(4, [0.0] * 4, total_time=2.5)
        assert [(s.t_start, s.t_end) for s in ham.slices] == [(0.0, 1.0), (1.0, 2.0), (2.0, 2.5)]
        assert ham.is_time_independent()


class TestBoundInputs:
    def test_commuting_hamiltonian(self):
        terms = tuple(
            LocalTerm(
                frozenset({j, j + 1}),
                OperatorSum(4, ((0.5, PauliString(4, {j: "Z", j + 1: "Z"})),)),
            )
            for j in range(3)
        )
        ham = LatticeHamiltonian(chain_lattice(4), (TimeSlice(0.0, 1.0, terms),))
        bi = extract_bound_inputs(ham, mu=1.0)
        assert bi.eta == 0.0
        assert bi.k_cap == 0.0

    def test_single_term(self):
        term = LocalTerm(
            frozenset({0, 1}),
            OperatorSum(2, ((2.0, PauliString(2, {0: "X", 1: "X"})),)),
        )
        ham = LatticeHamiltonian(chain_lattice(2), (TimeSlice(0.0, 1.0, (term,)),))
        bi = extract_bound_inputs(ham, mu=0.5)
        assert bi.zeta0 == pytest.approx(2 * 2.0)  # |X| * ||h||
        assert bi.zeta == pytest.approx(2.0 * 4 * math.exp(0.5))
        assert bi.degree == 0

    def test_heisenberg_against_brute_force(self):
        rng = np.random.default_rng(42)
        z = rng.uniform(-1, 1, 5)
        ham = build_heisenberg_1d(5, z)
        bi = extract_bound_inputs(ham, mu=1.0)
        zeta0, zeta, eta, k_cap, degree = brute_force_bound_inputs(5, z, 1.0)
        assert bi.zeta0 == pytest.approx(zeta0, rel=1e-9)
        assert bi.zeta == pytest.approx(zeta, rel=1e-9)
        assert bi.eta == pytest.approx(eta, rel=1e-7)
        assert bi.k_cap == pytest.approx(k_cap, rel=1e-7)
        assert bi.degree == degree

    def test_monotone_under_term_addition(self):
        rng = np.random.default_rng(1)
        z = rng.uniform(-1, 1, 4)
        small = build_heisenberg_1d(4, z)
        extra = small.slices[0].terms + (
            LocalTerm(frozenset({1, 2}), OperatorSum(4, ((0.7, PauliString(4, {1: "X"})),))),
        )
        big = LatticeHamiltonian(small.lattice, (TimeSlice(0.0, 1.0, extra),))
        bi_small = extract_bound_inputs(small, mu=1.0)
        bi_big = extract_bound_inputs(big, mu=1.0)
        assert bi_big.zeta0 >= bi_small.zeta0
        assert bi_big.zeta >= bi_small.zeta
        assert bi_big.k_cap >= bi_small.k_cap

    def test_rescaling_covariance(self):
        rng = np.random.default_rng(4)
        z = rng.uniform(-1, 1, 5)
        ham = build_heisenberg_1d(5, z)
        c = 0.37
        scaled = rescale_hamiltonian(ham, c)
        bi = extract_bound_inputs(ham, mu=1.0)
        bi_c = extract_bound_inputs(scaled, mu=1.0)
        assert bi_c.zeta0 == pytest.approx(c * bi.zeta0, rel=1e-12)
        assert bi_c.zeta == pytest.approx(c * bi.zeta, rel=1e-12)
        assert bi_c.k_cap == pytest.approx(c**2 * bi.k_cap, rel=1e-9)
        assert bi_c.eta == pytest.approx(bi.eta, rel=1e-9)

    def test_eta_range(self):
        for seed in range(3):
            z = np.random.default_rng(seed).uniform(-1, 1, 4)
            bi = extract_bound_inputs(build_heisenberg_1d(4, z), mu=1.0)
            assert 0.0 <= bi.eta <= 2.0
            assert bi.k_cap <= 2.0 * bi.eta * max(t.norm() for t in build_heisenberg_1d(4, z).slices[0].terms) ** 2


class TestValidate:
    def test_heisenberg_flags_norms(self):
        ham = build_heisenberg_1d(5, [1.0, -1.0, 1.0, -1.0, 1.0])
        report = validate(ham)
        assert not report.ok
        assert len(report.norm_violations) == 4
        # per-term spectral norms stay below the coefficient sum 4
        assert report.max_term_norm <= 4.0
        assert report.suggested_rescale == pytest.approx(1.0 / report.max_term_norm)
        rescaled = rescale_hamiltonian(ham, report.suggested_rescale)
        assert validate(rescaled).ok

    def test_strong_term_flag(self):
        base = build_heisenberg_1d(4, [0.0] * 4)
        report0 = validate(base)
        scaled = rescale_hamiltonian(base, report0.suggested_rescale)
        terms = list(scaled.slices[0].terms)
        terms[1] = LocalTerm(terms[1].support, terms[1].operator.scaled(10.0))
        strong = LatticeHamiltonian(scaled.lattice, (TimeSlice(0.0, 1.0, tuple(terms)),))
        report = validate(strong)
        assert len(report.strong_terms) == 1
        assert report.strong_terms[0][2] == pytest.approx(10.0, rel=1e-9)

    def test_empty_hamiltonian_clean(self):
        ham = LatticeHamiltonian(chain_lattice(3), (TimeSlice(0.0, 1.0, ()),))
        report = validate(ham)
        assert report.ok
        assert report.suggested_rescale == 1.0

    def test_long_slice_flagged(self):
        term = LocalTerm(frozenset({0}), OperatorSum(2, ((0.5, PauliString(2, {0: "Z"})),)))
        ham = LatticeHamiltonian(chain_lattice(2), (TimeSlice(0.0, 2.5, (term,)),))
        report = validate(ham)
        assert report.slice_length_violations == (0,)

    def test_diam_violation_flagged(self):
        term = LocalTerm(frozenset({0, 3}), OperatorSum(4, ((0.5, PauliString(4, {0: "X", 3: "X"})),)))
        ham = LatticeHamiltonian(chain_lattice(4), (TimeSlice(0.0, 1.0, (term,)),))
        report = validate(ham)
        assert len(report.diam_violations) == 1


class TestJsonIngestion:
    def doc(self):
        return {
            "n": 3,
            "dimension": 1,
            "boundary": "open",
            "terms": [
                {
                    "support": [0, 1],
                    "paulis": [
                        {"coeff": 1.0, "string": {"0": "X", "1": "X"}},
                        {"coeff": -0.5, "string": {"0": "Z"}},
                    ],
                }
            ],
            "slices": [{"t0": 0.0, "t1": 1.0}],
        }

    def test_round_trip(self):
        ham = hamiltonian_from_json_dict(self.doc())
        assert ham.n == 3
        assert hamiltonian_from_json_dict(hamiltonian_to_json_dict(ham)).slices == ham.slices

    def test_unknown_field_rejected(self):
        doc = self.doc()
        doc["extra"] = 1
        with pytest.raises(SchemaError):
            hamiltonian_from_json_dict(doc)

    def test_missing_field_rejected(self):
        doc = self.doc()
        del doc["slices"]
        with pytest.raises(SchemaError):
            hamiltonian_from_json_dict(doc)

    def test_bad_pauli_rejected(self):
        doc = self.doc()
        doc["terms"][0]["paulis"][0]["string"] = {"0": "Q"}
        with pytest.raises(SchemaError):
            hamiltonian_from_json_dict(doc)

    def test_string_outside_support_rejected(self):
        doc = self.doc()
        doc["terms"][0]["paulis"][0]["string"] = {"2": "X"}
        with pytest.raises(SchemaError):
            hamiltonian_from_json_dict(doc)

    def test_bad_slices_rejected(self):
        doc = self.doc()
        doc["slices"] = [{"t0": 0.5, "t1": 1.0}]
        with pytest.raises(SchemaError):
            hamiltonian_from_json_dict(doc)

    def test_matches_builder(self):
        ham = build_heisenberg_1d(3, [0.1, 0.2, 0.3])
        doc = hamiltonian_to_json_dict(ham)
        again = hamiltonian_from_json_dict(doc)
        total_a = sum(materialize(t.operator) for t in ham.slices[0].terms)
        total_b = sum(materialize(t.operator) for t in again.slices[0].terms)
        assert np.abs(total_a - total_b).max() < 1e-12
