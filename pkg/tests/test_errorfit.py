import math

import pytest

from lrsim.errorfit import (
    CSV_HEADER,
    ErrorSample,
    FitModel,
    blocks_merged,
    blocks_unmerged,
    fit,
    fit_result_from_json_dict,
    samples_from_csv,
    samples_to_csv,
    solve_budget,
)
from lrsim.errors import BudgetInfeasibleError, DegenerateDataError, SchemaError


def synthetic_samples(ampl=0.5, vel=2.0, offset=1.0, scale=1.0):
    model = FitModel(ampl, vel, offset)
    out = []
    for t in (0.5, 1.0, 2.0):
        for ell in range(2, 8):
            for a in (1, 2):
                out.append(ErrorSample(11, t, a, ell, min(2.0, scale * model.predict(t, ell))))
    return out


class TestFit:
    def test_recovers_exact_model(self):
        res = fit(synthetic_samples())
        assert res.model.ampl == pytest.approx(0.5, rel=1e-4)
        assert res.model.vel == pytest.approx(2.0, rel=1e-4)
        assert res.model.offset == pytest.approx(1.0, abs=1e-3)
        assert res.r2_log > 0.999999

    def test_scaling_moves_only_amplitude(self):
        # scale down so no sample hits the error <= 2 clamp
        base = fit(synthetic_samples())
        scaled = fit(synthetic_samples(scale=0.25))
        assert scaled.model.ampl == pytest.approx(0.25 * base.model.ampl, rel=1e-3)
        assert scaled.model.vel == pytest.approx(base.model.vel, rel=1e-3)
        assert scaled.model.offset == pytest.approx(base.model.offset, abs=1e-2)

    def test_reproducible_bit_for_bit(self):
        r1 = fit(synthetic_samples())
        r2 = fit(synthetic_samples())
        assert (r1.model.ampl, r1.model.vel, r1.model.offset) == (
            r2.model.ampl,
            r2.model.vel,
            r2.model.offset,
        )

    def test_zero_errors_excluded_with_count(self):
        samples = synthetic_samples()
        samples.append(ErrorSample(11, 0.5, 3, 4, 0.0))
        res = fit(samples)
        assert res.n_zero_excluded == 1

    def test_degenerate_data_rejected(self):
        flat = [ErrorSample(8, 0.5, a, 3, 1e-3 * (a + 1)) for a in range(8)]
        with pytest.raises(DegenerateDataError):
            fit(flat)

    def test_too_few_samples_rejected(self):
        with pytest.raises(DegenerateDataError):
            fit([ErrorSample(8, 0.5, 1, ell, 1e-3) for ell in (2, 3, 4)])

    def test_json_round_trip(self):
        res = fit(synthetic_samples())
        doc = res.to_json_dict()
        assert set(doc) == {"ampl", "vel", "offset", "r2_log"}
        again = fit_result_from_json_dict(doc)
        assert again.model == res.model

    def test_error_range_enforced(self):
        with pytest.raises(ValueError):
            ErrorSample(8, 0.5, 1, 3, 2.5)


class TestSolveBudget:
    def model(self):
        return FitModel(0.2, 2.3, 0.7)

    def test_slack_budget_caps_at_t_max(self):
        sol = solve_budget(4.0, 8, 8, 0.5, self.model())
        assert sol.capped_at_t_max
        assert sol.t_block == 1.0
        assert sol.m_blocks == math.ceil(blocks_unmerged(4.0, 8, 1.0, 8))

    def test_fixed_point_identity(self):
        model = self.model()
        sol = solve_budget(50.0, 50, 5, 1e-3, model)
        assert not sol.capped_at_t_max
        ratio = model.predict(sol.t_block, 5) * 3.0 * blocks_unmerged(50.0, 50, sol.t_block, 5) / 1e-3
        assert 0.999 <= ratio <= 1.001

    def test_merged_flag_switches_count(self):
        sol_u = solve_budget(10.0, 10, 6, 0.5, self.model(), merged=False)
        sol_m = solve_budget(10.0, 10, 6, 0.5, self.model(), merged=True)
        assert sol_u.capped_at_t_max and sol_m.capped_at_t_max
        assert sol_u.m_blocks == math.ceil(blocks_unmerged(10, 10, 1.0, 6))
        assert sol_m.m_blocks == math.ceil(blocks_merged(10, 10, 1.0, 6))

    def test_larger_eps_never_shrinks_t(self):
        model = self.model()
        prev = 0.0
        for eps in (1e-5, 1e-4, 1e-3, 1e-2):
            sol = solve_budget(50.0, 50, 5, eps, model)
            assert sol.t_block >= prev
            prev = sol.t_block

    def test_infeasible_budget_raises(self):
        # ell + offset barely above zero: eps_LR * m grows as t shrinks
        model = FitModel(1.0, 1.0, -1.5)
        with pytest.raises(BudgetInfeasibleError) as info:
            solve_budget(10.0, 10, 2, 1e-6, model)
        assert info.value.limiting_value is not None

    def test_budget_shares(self):
        sol = solve_budget(50.0, 50, 5, 1e-3, self.model())
        assert sol.eps_box == pytest.approx(1e-3 / (3 * sol.m_blocks))
        assert sol.eps_lr <= sol.eps_box * 1.001


class TestCsv:
    def test_round_trip_bytes(self):
        samples = synthetic_samples()[:10]
        text = samples_to_csv(samples)
        assert text.splitlines()[0] == ",".join(CSV_HEADER)
        again = samples_from_csv(text)
        assert again == samples
        assert samples_to_csv(again) == text

    def test_header_enforced(self):
        with pytest.raises(SchemaError):
            samples_from_csv("n,t,a,l,error\n8,0.5,1,3,0.001\n")

    def test_empty_rejected(self):
        with pytest.raises(SchemaError):
            samples_from_csv("")

    def test_bad_row_rejected(self):
        with pytest.raises(SchemaError):
            samples_from_csv("n,t,a,ell,error\n8,0.5,1,3\n")
