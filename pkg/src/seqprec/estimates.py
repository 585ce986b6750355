"""Probability estimates with their error bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

# two-sided 99%
Z99 = 2.5758293035489004


def wilson_interval(k: int, n: int, z: float = Z99) -> tuple[float, float]:
    """Wilson score interval for ``k`` successes out of ``n`` trials."""
    if n <= 0:
        raise ValueError("n must be positive")
    p = k / n
    z2 = z * z
    denom = 1.0 + z2 / n
    centre = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    # the bounds at k = 0 and k = n are exactly 0 and 1; rounding would miss them
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class ProbEstimate:
    """A probability with its method tag and error.

    ``err`` is zero for exact results, the grid-refinement estimate for
    quadrature, and the 99% Wilson half-width for Monte Carlo.
    """

    value: float
    method: str
    err: float = 0.0
    samples: int | None = None
    seed: int | None = None
    ci: tuple[float, float] | None = None
    exact: Fraction | None = None

    @classmethod
    def from_fraction(cls, p: Fraction) -> ProbEstimate:
        return cls(float(p), "exact", 0.0, exact=p)

    @classmethod
    def from_counts(cls, k: int, n: int, seed: int | None = None) -> ProbEstimate:
        lo, hi = wilson_interval(k, n)
        return cls(k / n, "monte-carlo", (hi - lo) / 2, samples=n, seed=seed, ci=(lo, hi))

    def covers(self, x: float) -> bool:
        if self.ci is not None:
            return self.ci[0] <= x <= self.ci[1]
        return abs(self.value - x) <= self.err

    def to_dict(self) -> dict:
        out = {"value": self.value, "method": self.method, "err": self.err}
        if self.samples is not None:
            out["samples"] = self.samples
            out["seed"] = self.seed
            out["ci"] = list(self.ci)
        if self.exact is not None:
            out["fraction"] = str(self.exact)
        return out
