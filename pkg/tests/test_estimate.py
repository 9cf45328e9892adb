import json

import pytest

from lrsim.errorfit import FitModel, blocks_merged, blocks_unmerged
from lrsim.errors import BudgetInfeasibleError, SchemaError
from lrsim.estimate import (
    ResourceReport,
    heisenberg_estimate,
    jacobi_anger_order,
    report_from_json_dict,
)
from lrsim.qsp import jacobi_anger_error_bound


def model():
    return FitModel(0.18, 2.3, 0.7)


class TestResourceReport:
    def make(self, **kw):
        base = dict(
            n=50,
            total_time=50.0,
            eps=1e-3,
            ell=8,
            t_block=0.5,
            m_blocks=1250,
            q_per_block=21,
            queries_total=26250,
            gate_estimate=1e7,
            reference_full_qsp=1e9,
            eps_lr_total=1e-4,
            eps_box_total=1e-3 / 3,
        )
        base.update(kw)
        return ResourceReport(**base)

    def test_budget_invariant_enforced(self):
        with pytest.raises(BudgetInfeasibleError):
            self.make(eps_lr_total=9e-4, eps_box_total=9e-4)

    def test_headroom(self):
        r = self.make()
        assert r.headroom == pytest.approx(1e-3 - 1e-4 - 1e-3 / 3)

    def test_json_round_trip_idempotent(self):
        r = self.make()
        doc = r.to_json_dict()
        again = report_from_json_dict(doc)
        assert again.to_json_dict() == doc
        assert json.dumps(doc, sort_keys=True) == json.dumps(again.to_json_dict(), sort_keys=True)

    def test_schema_keys_exact(self):
        doc = self.make().to_json_dict()
        doc["surprise"] = 1
        with pytest.raises(SchemaError):
            report_from_json_dict(doc)


class TestJacobiAngerOrder:
    def test_matches_bound_scan(self):
        for (at, eps) in [(1.0, 1e-3), (8.0, 1e-7), (50.0, 1e-4)]:
            q = jacobi_anger_order(at, eps)
            assert jacobi_anger_error_bound(at, q) <= eps
            assert q == 1 or jacobi_anger_error_bound(at, q - 1) > eps


class TestHeisenbergEstimate:
    def test_budget_satisfied(self):
        r = heisenberg_estimate(50, 50.0, 1e-3, 8, model(), seed=42, t_max=0.5)
        assert r.eps_lr_total + r.eps_box_total <= r.eps
        assert r.queries_total == r.m_blocks * r.q_per_block
        assert r.gate_estimate > 0

    def test_larger_eps_never_costs_more(self):
        r1 = heisenberg_estimate(50, 50.0, 1e-3, 8, model(), seed=42)
        r2 = heisenberg_estimate(50, 50.0, 2e-3, 8, model(), seed=42)
        assert r2.gate_estimate <= r1.gate_estimate

    def test_merged_flag_switches_block_count(self):
        ru = heisenberg_estimate(50, 50.0, 1e-3, 8, model(), seed=42, t_max=0.5, merged=False)
        rm = heisenberg_estimate(50, 50.0, 1e-3, 8, model(), seed=42, t_max=0.5, merged=True)
        import math

        assert ru.m_blocks == math.ceil(blocks_unmerged(50, 50, ru.t_block, 8) - 1e-9)
        assert rm.m_blocks == math.ceil(blocks_merged(50, 50, rm.t_block, 8) - 1e-9)
        assert rm.m_blocks < ru.m_blocks

    def test_uniform_prep_cheaper(self):
        ra = heisenberg_estimate(50, 50.0, 1e-3, 8, model(), seed=42)
        ru = heisenberg_estimate(50, 50.0, 1e-3, 8, model(), seed=42, uniform_prep=True)
        assert ru.gate_estimate < ra.gate_estimate

    def test_capped_regime_scales_as_spacetime_volume(self):
        reports = [
            heisenberg_estimate(n, float(n), 1e-3, 8, model(), seed=42, t_max=0.5)
            for n in (50, 100, 200)
        ]
        assert all(r.t_block == 0.5 for r in reports)
        for a, b in zip(reports, reports[1:]):
            assert b.gate_estimate / a.gate_estimate == pytest.approx(4.0, rel=0.05)
            assert b.reference_full_qsp / a.reference_full_qsp == pytest.approx(8.0, rel=0.1)

    def test_family_size_guard(self):
        with pytest.raises(ValueError):
            heisenberg_estimate(300, 300.0, 1e-3, 8, model())
