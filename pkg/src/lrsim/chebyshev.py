"""Chebyshev expansion kernel for analytic coefficient profiles.

Certifies that a caller-supplied analytic function can be evaluated to
accuracy eps with a degree O(log(1/eps)) polynomial, given its analyticity
parameters (rho, M) on a Bernstein ellipse. The caller owns the (rho, M)
claim; this module computes coefficients, checks the implied decay, and
evaluates by Clenshaw recurrence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class ChebyshevExpansion:
    """Coefficients a_0..a_J of sum_j a_j T_j on an affine image of [-1, 1]."""

    coeffs: tuple[float, ...]
    rho: float
    bound_m: float
    domain: tuple[float, float] = (-1.0, 1.0)
    decay_ok: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.rho <= 1:
            raise ValueError(f"rho must exceed 1, got {self.rho}")
        if self.bound_m < 0:
            raise ValueError("bound_m must be nonnegative")
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"empty domain {self.domain}")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def decay_violations(self) -> list[int]:
        """Indices j where |a_j| breaks the analytic bound 2 M rho^-j."""
        bad = []
        for j, a in enumerate(self.coeffs):
            cap = self.bound_m if j == 0 else 2 * self.bound_m * self.rho ** (-j)
            if abs(a) > cap * (1 + 1e-9) + 1e-15:
                bad.append(j)
        return bad

    def to_json_dict(self) -> dict:
        return {
            "coeffs": list(self.coeffs),
            "rho": self.rho,
            "M": self.bound_m,
            "domain": list(self.domain),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ChebyshevExpansion":
        exp = cls(
            coeffs=tuple(doc["coeffs"]),
            rho=float(doc["rho"]),
            bound_m=float(doc["M"]),
            domain=(float(doc["domain"][0]), float(doc["domain"][1])),
        )
        return exp

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())


def expand(
    f: Callable[[float], float],
    rho: float,
    bound_m: float,
    degree: int,
    domain: tuple[float, float] = (-1.0, 1.0),
    nodes_per_coeff: int = 8,
) -> ChebyshevExpansion:
    """Expand ``f`` in Chebyshev polynomials up to ``degree``.

    Coefficients come from the cosine-series integrals
        a_j = (1/pi) int_0^{2pi} f(cos th) cos(j th) dth   (halved for j=0)
    evaluated by the trapezoid rule on a uniform periodic grid with at
    least ``nodes_per_coeff * (degree+1)`` nodes; for smooth periodic
    integrands the rule converges spectrally, so the margin is generous.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    lo, hi = domain
    n_nodes = max(nodes_per_coeff * (degree + 1), 8)
    theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
    x = np.cos(theta)
    samples = np.array([f(lo + (hi - lo) * (xi + 1) / 2) for xi in x], dtype=float)
    js = np.arange(degree + 1)
    cosines = np.cos(np.outer(js, theta))
    coeffs = (2.0 / n_nodes) * cosines @ samples
    coeffs[0] /= 2
    exp = ChebyshevExpansion(tuple(coeffs), rho, bound_m, domain)
    if exp.decay_violations():
        exp = ChebyshevExpansion(tuple(coeffs), rho, bound_m, domain, decay_ok=False)
    return exp


def evaluate(expansion: ChebyshevExpansion, x: float) -> float:
    """Clenshaw evaluation of the expansion at a point in its domain."""
    lo, hi = expansion.domain
    if not (lo - 1e-12 <= x <= hi + 1e-12):
        raise ValueError(f"{x} outside domain [{lo}, {hi}]")
    u = 2 * (x - lo) / (hi - lo) - 1
    u = min(1.0, max(-1.0, u))
    b1 = b2 = 0.0
    for a in reversed(expansion.coeffs[1:]):
        b1, b2 = 2 * u * b1 - b2 + a, b1
    return u * b1 - b2 + expansion.coeffs[0]


def evaluate_many(expansion: ChebyshevExpansion, xs: Sequence[float]) -> np.ndarray:
    return np.array([evaluate(expansion, float(x)) for x in xs])


def degree_for_accuracy(rho: float, bound_m: float, eps: float) -> int:
    """Smallest J with 2 M rho^-J / (rho - 1) <= eps (clamped at 0)."""
    if rho <= 1:
        raise ValueError("rho must exceed 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    threshold = 2 * bound_m / (rho - 1)
    if threshold <= eps:
        return 0
    j = math.ceil(math.log(threshold / eps) / math.log(rho))
    # guard against ceil landing one short through roundoff
    while threshold * rho ** (-j) > eps:
        j += 1
    return j


def truncation_bound(rho: float, bound_m: float, degree: int) -> float:
    """Sup-norm error bound 2 M rho^-J / (rho - 1) for degree J."""
    return 2 * bound_m * rho ** (-degree) / (rho - 1)
