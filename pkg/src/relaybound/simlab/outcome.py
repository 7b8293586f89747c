"""Result record shared by every simulation, plus the interval estimators it uses."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

Z95 = 1.959963984540054


@dataclass(frozen=True)
class SimOutcome:
    operation: str
    estimate: float
    exact: bool
    trials: int
    ci_halfwidth: float
    seed: int | None = None
    params: dict = field(default_factory=dict)
    references: dict = field(default_factory=dict)
    passed: bool | None = None

    def __post_init__(self):
        if self.exact and self.ci_halfwidth != 0.0:
            raise ValueError("an exact outcome carries no confidence interval")
        if self.ci_halfwidth < 0 or not math.isfinite(self.ci_halfwidth):
            raise ValueError("ci_halfwidth must be a finite nonnegative number")

    @property
    def interval(self) -> tuple[float, float]:
        return self.estimate - self.ci_halfwidth, self.estimate + self.ci_halfwidth

    def to_dict(self) -> dict:
        return {
            "operation": self.operation,
            "params": _plain(self.params),
            "seed": self.seed,
            "estimate": _plain(self.estimate),
            "ci_halfwidth": _plain(self.ci_halfwidth),
            "exact": self.exact,
            "trials": self.trials,
            "references": _plain(self.references),
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _plain(v):
    """Numpy scalars/arrays to JSON-ready values; floats rounded to 12 significant digits."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.12g}")
    return v


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval (lower, upper) for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def proportion_estimate(successes: int, trials: int) -> tuple[float, float]:
    """Point estimate and the wider side of its Wilson interval."""
    lo, hi = wilson_interval(successes, trials)
    phat = successes / trials
    return phat, max(phat - lo, hi - phat)


def mean_interval(values, z: float = Z95) -> tuple[float, float]:
    """Sample mean and normal-approximation halfwidth z * s / sqrt(T)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("no values")
    if values.size == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(z * values.std(ddof=1) / math.sqrt(values.size))
