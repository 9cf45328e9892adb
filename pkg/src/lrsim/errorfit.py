"""Empirical decomposition-error model and error-budget arithmetic.

The single-cut error of the block decomposition is fit, in log space, to

    eps_LR(t, ell) = ampl * (t * vel / (ell + offset)) ** (ell + offset)

and the fitted model is then inverted to pick a block time t and block
count m such that the per-cut error meets its share eps/(3m) of the
total budget.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.optimize

from .errors import BudgetInfeasibleError, DegenerateDataError, SchemaError

CSV_HEADER = ["n", "t", "a", "ell", "error"]

_AMPL_STARTS = (0.1, 1.0, 10.0)
_VEL_STARTS = (0.5, 1.0, 2.0, 4.0)
_OFFSET_STARTS = (0.0, 1.0, 2.0)
_SIMPLEX_MAXITER = 10**4


@dataclass(frozen=True)
class ErrorSample:
    """One measured decomposition error at (chain length, time, cut, overlap)."""

    n: int
    t: float
    position: int
    ell: int
    error: float

    def __post_init__(self):
        if not (0.0 <= self.error <= 2.0 + 1e-9):
            raise ValueError(f"error {self.error} outside [0, 2]")
        if self.ell < 1:
            raise ValueError("ell must be positive")


@dataclass(frozen=True)
class FitModel:
    """Parameters of the empirical single-cut error law."""

    ampl: float
    vel: float
    offset: float

    def __post_init__(self):
        if self.ampl <= 0 or self.vel <= 0:
            raise ValueError("ampl and vel must be positive")

    def predict(self, t: float, ell: float) -> float:
        x = ell + self.offset
        if x <= 0:
            raise ValueError(f"model invalid at ell={ell} (ell + offset <= 0)")
        return self.ampl * (abs(t) * self.vel / x) ** x

    def log_predict(self, t: float, ell: float) -> float:
        x = ell + self.offset
        if x <= 0:
            raise ValueError(f"model invalid at ell={ell} (ell + offset <= 0)")
        return math.log(self.ampl) + x * (math.log(abs(t) * self.vel) - math.log(x))


@dataclass(frozen=True)
class FitResult:
    model: FitModel
    r2_log: float
    residual: float
    n_samples: int
    n_zero_excluded: int

    def to_json_dict(self) -> dict:
        return {
            "ampl": self.model.ampl,
            "vel": self.model.vel,
            "offset": self.model.offset,
            "r2_log": self.r2_log,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())


def fit_result_from_json_dict(doc: dict) -> FitResult:
    expected = {"ampl", "vel", "offset", "r2_log"}
    if set(doc) != expected:
        raise SchemaError(f"fit document must have keys {sorted(expected)}, got {sorted(doc)}")
    model = FitModel(float(doc["ampl"]), float(doc["vel"]), float(doc["offset"]))
    return FitResult(model, float(doc["r2_log"]), math.nan, 0, 0)


def fit(samples: Sequence[ErrorSample]) -> FitResult:
    """Log-space least squares over a deterministic multi-start simplex grid.

    Zero (or sub-roundoff) errors carry no log-space information and are
    excluded; the count of exclusions is reported. Requires at least six
    usable samples spanning at least three overlap sizes.
    """
    usable = [s for s in samples if s.error > 0.0]
    n_zero = len(samples) - len(usable)
    ells = np.array([s.ell for s in usable], dtype=float)
    if len(set(s.ell for s in usable)) < 2:
        raise DegenerateDataError("need samples at two or more distinct overlap sizes")
    if len(usable) < 6 or len(set(s.ell for s in usable)) < 3:
        raise DegenerateDataError("need >= 6 positive samples spanning >= 3 overlap sizes")
    ts = np.array([s.t for s in usable], dtype=float)
    log_err = np.log(np.array([s.error for s in usable], dtype=float))
    ell_min = float(ells.min())

    def objective(params: np.ndarray) -> float:
        log_ampl, log_vel, offset = params
        x = ells + offset
        if np.any(x <= 0.05):
            return 1e9 * (1 + float(np.sum(np.maximum(0.06 - x, 0))))
        pred = log_ampl + x * (np.log(ts) + log_vel - np.log(x))
        return float(np.sum((pred - log_err) ** 2))

    best: tuple[float, np.ndarray] | None = None
    for ampl0 in _AMPL_STARTS:
        for vel0 in _VEL_STARTS:
            for off0 in _OFFSET_STARTS:
                if ell_min + off0 <= 0.05:
                    continue
                res = scipy.optimize.minimize(
                    objective,
                    np.array([math.log(ampl0), math.log(vel0), off0]),
                    method="Nelder-Mead",
                    options={"maxiter": 2000, "xatol": 1e-10, "fatol": 1e-14},
                )
                if best is None or res.fun < best[0]:
                    best = (float(res.fun), res.x)
    assert best is not None
    polish = scipy.optimize.minimize(
        objective,
        best[1],
        method="Nelder-Mead",
        options={"maxiter": _SIMPLEX_MAXITER, "xatol": 1e-12, "fatol": 1e-16},
    )
    params = polish.x if polish.fun <= best[0] else best[1]
    residual = float(min(polish.fun, best[0]))
    model = FitModel(math.exp(params[0]), math.exp(params[1]), float(params[2]))
    ss_tot = float(np.sum((log_err - log_err.mean()) ** 2))
    r2 = 1.0 - residual / ss_tot if ss_tot > 0 else 1.0
    return FitResult(model, r2, residual, len(usable), n_zero)


def blocks_unmerged(total_time: float, n: int, t: float, ell: float) -> float:
    """Block count 2 T n / (t ell) for the plain stacked decomposition."""
    return 2.0 * total_time * n / (t * ell)


def blocks_merged(total_time: float, n: int, t: float, ell: float) -> float:
    """Block count 3 T n / (2 t ell) once adjacent stacks are merged."""
    return 1.5 * total_time * n / (t * ell)


@dataclass(frozen=True)
class BudgetSolution:
    t_block: float
    m_blocks: int
    eps_lr: float
    eps_box: float
    merged: bool
    capped_at_t_max: bool


def solve_budget(
    total_time: float,
    n: int,
    ell: int,
    eps: float,
    model: FitModel,
    merged: bool = False,
    t_max: float = 1.0,
    split: float = 3.0,
) -> BudgetSolution:
    """Pick the block time t (and count m) meeting eps_LR(t, ell) = eps / (split m).

    m = 2Tn/(t ell) (or the merged 3Tn/(2 t ell)), so the defining relation
    is a one-dimensional root problem in t, monotone on (0, t_max]; if the
    budget is slack at t_max the time is capped there.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    count = blocks_merged if merged else blocks_unmerged

    def mismatch(t: float) -> float:
        # eps_LR(t) * split * m(t) / eps : == 1 at the solution
        return model.predict(t, ell) * split * count(total_time, n, t, ell) / eps

    if mismatch(t_max) <= 1.0:
        t = t_max
        capped = True
    else:
        lo = 1e-12
        if mismatch(lo) > 1.0:
            raise BudgetInfeasibleError(
                f"even t -> 0 cannot meet eps={eps} at ell={ell}", limiting_value=mismatch(lo)
            )
        hi = t_max
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mismatch(mid) > 1.0:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-7 * hi:
                break
        t = lo
        capped = False
    m = math.ceil(count(total_time, n, t, ell) - 1e-9)
    eps_lr = model.predict(t, ell)
    return BudgetSolution(t, m, eps_lr, eps / (split * m), merged, capped)


def samples_to_csv(samples: Iterable[ErrorSample]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for s in samples:
        writer.writerow([s.n, repr(s.t), s.position, s.ell, repr(s.error)])
    return buf.getvalue()


def samples_from_csv(text: str) -> list[ErrorSample]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty CSV") from None
    if header != CSV_HEADER:
        raise SchemaError(f"CSV header must be {','.join(CSV_HEADER)}, got {','.join(header)}")
    out = []
    for row in reader:
        if not row:
            continue
        if len(row) != 5:
            raise SchemaError(f"expected 5 columns, got {row}")
        try:
            out.append(
                ErrorSample(int(row[0]), float(row[1]), int(row[2]), int(row[3]), float(row[4]))
            )
        except ValueError as exc:
            raise SchemaError(f"bad CSV row {row}: {exc}") from exc
    return out
