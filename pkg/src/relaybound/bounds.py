"""Capacity upper bounds for the relay channel with a lossless relay link.

Every new bound comes from the same two constraints on a feasible rate R, for
some a in [0, r0]:

    Fano line:      R <= C_fano + r0 - a
    exponent line:  E(R) <= offset + H2(sqrt a) + sqrt(a) log2|Omega|

The first is decreasing in a and the second, solved for R through the inverse
exponent, is nondecreasing in a, so the bound is the value where they cross.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize

from .channels import (CompanionChannel, RelayChannel, companion_from_kernel, degradation_test,
                       joint_channel, product_companion)
from .exponent import ExponentSolver, solver_for
from .info import _mi, binary_entropy, capacity, mutual_information_grad

ACTIVE_TAGS = ("fano", "exponent", "cutset-capped")
SWEEP_HEADER = ("r0", "cutset", "new_bound", "a_star", "active")


class BoundPreconditionError(ValueError):
    """The relay channel does not have the structure the requested bound needs."""


class BoundInvariantError(RuntimeError):
    pass


@dataclass(frozen=True)
class BoundReport:
    cutset: float
    new_bound: float
    a_star: float
    active: str
    c1: float = 0.0
    c2: float = 0.0
    companion_capacity: float | None = None
    method: str = "iid"
    r0: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def summary(self) -> str:
        labels = {
            "fano": "Fano line (new bound equals C_XY + R0 - a)",
            "exponent": "exponent constraint (strictly below the Fano line)",
            "cutset-capped": "cut-set bound (exponent constraint not binding)",
        }
        return (f"method={self.method} r0={self.r0:.12g}: cut-set {self.cutset:.12g}, "
                f"new bound {self.new_bound:.12g} at a*={self.a_star:.6g}; "
                f"active constraint: {labels[self.active]}")


# --- cut-set bound -----------------------------------------------------------

def _simplex_grid(k: int, steps: int):
    for combo in itertools.combinations_with_replacement(range(k), steps):
        yield np.bincount(combo, minlength=k) / steps


def cutset_bound(relay: RelayChannel, tol: float = 1e-9, starts: int = 16, seed: int = 0) -> float:
    """max_p min{ I(X;Y) + r0, I(X;Y,Z) }.

    The objective is concave; it is maximised in epigraph form with SLSQP from
    several starting points, then checked against a simplex grid.
    """
    w_y = relay.w_y
    w_yz = joint_channel(relay)
    k = relay.in_size
    r0 = relay.r0

    def objective(p):
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
        return min(_mi(p, w_y) + r0, _mi(p, w_yz))

    if k == 1:
        return objective(np.ones(1))

    def neg_t(v):
        return -v[-1]

    def neg_t_grad(v):
        g = np.zeros_like(v)
        g[-1] = -1.0
        return g

    def _safe(p):
        p = np.clip(p, 1e-15, None)
        return p / p.sum()

    cons = [
        {"type": "ineq", "fun": lambda v: _mi(_safe(v[:-1]), w_y) + r0 - v[-1],
         "jac": lambda v: np.append(mutual_information_grad(_safe(v[:-1]), w_y), -1.0)},
        {"type": "ineq", "fun": lambda v: _mi(_safe(v[:-1]), w_yz) - v[-1],
         "jac": lambda v: np.append(mutual_information_grad(_safe(v[:-1]), w_yz), -1.0)},
        {"type": "eq", "fun": lambda v: v[:-1].sum() - 1.0,
         "jac": lambda v: np.append(np.ones(k), 0.0)},
    ]
    rng = np.random.default_rng(seed)
    inits = [np.full(k, 1.0 / k), capacity(w_y, tol=1e-10)[1], capacity(w_yz, tol=1e-10)[1]]
    for i in range(k):
        v = np.full(k, 0.05 / k)
        v[i] += 0.95
        inits.append(v)
    while len(inits) < starts:
        inits.append(rng.dirichlet(np.ones(k)))

    best_p, best = None, -math.inf
    for p0 in inits[:max(starts, 3)]:
        val0 = objective(p0)
        if val0 > best:
            best_p, best = p0, val0
        res = minimize(neg_t, np.append(p0, val0), jac=neg_t_grad, constraints=cons,
                       bounds=[(0.0, 1.0)] * k + [(None, None)], method="SLSQP",
                       options={"ftol": 1e-15, "maxiter": 500})
        val = objective(res.x[:-1])
        if val > best:
            best_p, best = res.x[:-1], val

    # grid certificate at desk-scale alphabets
    steps = {2: 2000, 3: 120, 4: 30}.get(k, 0)
    if steps:
        grid_best = max(_simplex_grid(k, steps), key=objective)
        if objective(grid_best) > best + tol:
            res = minimize(neg_t, np.append(grid_best, objective(grid_best)), jac=neg_t_grad,
                           constraints=cons, bounds=[(0.0, 1.0)] * k + [(None, None)],
                           method="SLSQP", options={"ftol": 1e-15, "maxiter": 500})
            best = max(best, objective(grid_best), objective(res.x[:-1]))
    return float(best)


# --- Hamming ball volume -----------------------------------------------------

def ball_log_volume(n: int, radius: float, alphabet: int, mode: str = "exact") -> float:
    """log2 of the Hamming-ball volume in Omega^n.

    ``exact`` counts sum_{k <= ceil(radius)} C(n, k) (q-1)^k with integer arithmetic.
    ``asymptotic`` returns the per-symbol surrogate rho log2 q + H2(rho), rho = radius/n,
    which is what the bound solvers use.
    """
    if n < 1:
        raise ValueError("blocklength must be positive")
    if alphabet < 2:
        raise ValueError("alphabet must have at least two symbols")
    if radius < 0 or radius > n:
        raise ValueError(f"radius {radius} outside [0, {n}]")
    if mode == "exact":
        r = math.ceil(radius - 1e-12)
        volume = sum(math.comb(n, k) * (alphabet - 1) ** k for k in range(r + 1))
        return math.log2(volume)
    if mode == "asymptotic":
        rho = radius / n
        return rho * math.log2(alphabet) + binary_entropy(rho)
    raise ValueError(f"unknown mode {mode!r}")


def ball_exponent(a: float, alphabet: int) -> float:
    """H2(sqrt a) + sqrt(a) log2|Omega|, with sqrt(a) capped at 1 (ball = whole space)."""
    rho = min(math.sqrt(max(a, 0.0)), 1.0)
    return rho * math.log2(alphabet) + binary_entropy(rho)


# --- crossing solver ---------------------------------------------------------

def _crossing(solver: ExponentSolver, fano_rate: float, r0: float, offset: float, alphabet: int,
              a_tol: float, r_tol: float) -> tuple[float, float, str]:
    """Return (value, a*, tag) of max_a min(R1(a), R2(a))."""

    def r1(a):
        return fano_rate + r0 - a

    def r2(a):
        rate, saturated = solver.inverse(offset + ball_exponent(a, alphabet), tol=r_tol)
        return math.inf if saturated else rate

    if r1(0.0) <= r2(0.0):
        return r1(0.0), 0.0, "fano"
    if r2(r0) <= r1(r0):
        return r2(r0), r0, "exponent"
    lo, hi = 0.0, r0
    for _ in range(200):
        if hi - lo <= min(a_tol, 1e-6 * hi):
            break
        mid = 0.5 * (lo + hi)
        if r1(mid) > r2(mid):
            lo = mid
        else:
            hi = mid
    v_lo, v_hi = min(r1(lo), r2(lo)), min(r1(hi), r2(hi))
    return (v_hi, hi, "exponent") if v_hi >= v_lo else (v_lo, lo, "exponent")


def _finish(value: float, a_star: float, tag: str, cutset: float, c_xy: float, **fields) -> BoundReport:
    value = max(value, c_xy)
    if value >= cutset - 1e-12:
        value, tag = cutset, "cutset-capped"
    return BoundReport(cutset=cutset, new_bound=value, a_star=a_star, active=tag, **fields)


def iid_bound(relay: RelayChannel, tol: float = 1e-9, a_tol: float = 1e-9,
              r_tol: float = 1e-10) -> BoundReport:
    """New bound when Y and Z are conditionally i.i.d. given X."""
    if not relay.is_iid():
        raise BoundPreconditionError(
            "iid_bound needs p(y|x) == p(z|x); use degraded_bound or general_bound instead")
    solver = solver_for(relay.w_y)
    c_xy = solver.capacity
    if relay.r0 == 0:
        return BoundReport(c_xy, c_xy, 0.0, "fano", method="iid", r0=0.0)
    cut = cutset_bound(relay, tol)
    value, a_star, tag = _crossing(solver, c_xy, relay.r0, 0.0, relay.w_y.shape[1], a_tol, r_tol)
    return _finish(value, a_star, tag, cut, c_xy, method="iid", r0=relay.r0)


def degraded_bound(relay: RelayChannel, direction: str = "XYZ", tol: float = 1e-9,
                   a_tol: float = 1e-9, r_tol: float = 1e-10) -> BoundReport:
    """New bound for a statistically degraded relay channel.

    XYZ: Z is degraded from Y, Y guesses (exponent of the X->Y channel).
    XZY: Y is degraded from Z, Z guesses (exponent of the X->Z channel).
    The ball lives in Omega_Z^n in both cases.
    """
    direction = direction.upper()
    if direction == "XYZ":
        if degradation_test(relay.w_y, relay.w_z) is None:
            raise BoundPreconditionError("XYZ degradation fails: no q1(z|y) with p(z|x) = sum_y q1 p(y|x)")
        guess = relay.w_y
    elif direction == "XZY":
        if degradation_test(relay.w_z, relay.w_y) is None:
            raise BoundPreconditionError("XZY degradation fails: no q2(y|z) with p(y|x) = sum_z q2 p(z|x)")
        guess = relay.w_z
    else:
        raise ValueError(f"direction must be XYZ or XZY, got {direction!r}")
    c_xy = solver_for(relay.w_y).capacity
    method = f"degraded-{direction}"
    if relay.r0 == 0:
        return BoundReport(c_xy, c_xy, 0.0, "fano", method=method, r0=0.0)
    cut = cutset_bound(relay, tol)
    value, a_star, tag = _crossing(solver_for(guess), c_xy, relay.r0, 0.0, relay.w_z.shape[1],
                                   a_tol, r_tol)
    return _finish(value, a_star, tag, cut, c_xy, method=method, r0=relay.r0)


def general_bound(relay: RelayChannel, companion: CompanionChannel, c1: float = 0.0, c2: float = 0.0,
                  tol: float = 1e-9, a_tol: float = 1e-9, r_tol: float = 1e-10) -> BoundReport:
    """Bound from a companion channel; c1, c2 are user-supplied slack constants."""
    if c1 < 0 or c2 < 0:
        raise ValueError("c1 and c2 must be nonnegative")
    parent = companion.parent
    if parent is not relay and not (np.array_equal(parent.w_y, relay.w_y)
                                    and np.array_equal(parent.w_z, relay.w_z)):
        raise BoundPreconditionError("companion channel belongs to a different relay channel")
    solver = solver_for(relay.w_y)
    c_xy = solver.capacity
    c_bar = capacity(companion.joint, tol=1e-12)[0]
    fields = dict(c1=c1, c2=c2, companion_capacity=c_bar, method="general", r0=relay.r0)
    if relay.r0 == 0:
        return BoundReport(c_xy, c_xy, 0.0, "fano", **fields)
    cut = cutset_bound(relay, tol)
    offset = max(c_bar - c_xy, 0.0) + c1
    value, a_star, tag = _crossing(solver, c_xy - c2, relay.r0, offset, relay.w_z.shape[1],
                                   a_tol, r_tol)
    return _finish(value, a_star, tag, cut, c_xy, **fields)


def default_companion(relay: RelayChannel) -> CompanionChannel:
    """Markov companion when Z is degraded from Y, else the relay channel itself."""
    q1 = degradation_test(relay.w_y, relay.w_z)
    if q1 is not None:
        return companion_from_kernel(relay, q1)
    return product_companion(relay)


def degraded_direction(relay: RelayChannel) -> str | None:
    """'XYZ' if Z is degraded from Y, else 'XZY' if Y is degraded from Z, else None."""
    if degradation_test(relay.w_y, relay.w_z) is not None:
        return "XYZ"
    if degradation_test(relay.w_z, relay.w_y) is not None:
        return "XZY"
    return None


def _degraded_direction(relay: RelayChannel) -> str:
    direction = degraded_direction(relay)
    if direction is None:
        raise BoundPreconditionError("relay channel is degraded in neither direction")
    return direction


def solve_bound(relay: RelayChannel, method: str, tol: float = 1e-9, *, direction: str | None = None,
                companion: CompanionChannel | None = None, c1: float = 0.0,
                c2: float = 0.0) -> BoundReport:
    if method == "iid":
        return iid_bound(relay, tol)
    if method == "degraded":
        return degraded_bound(relay, direction or _degraded_direction(relay), tol)
    if method == "general":
        if companion is None:
            companion = default_companion(relay)
        companion = CompanionChannel(companion.joint, relay)
        return general_bound(relay, companion, c1, c2, tol)
    raise ValueError(f"unknown method {method!r}; expected iid, degraded or general")


def sweep(relay: RelayChannel, r0_grid, method: str = "iid", tol: float = 1e-9,
          **kwargs) -> list[BoundReport]:
    """One report per R0 value, in grid order; checks monotonicity in R0."""
    grid = [float(r) for r in r0_grid]
    if any(r < 0 for r in grid):
        raise ValueError("R0 grid values must be nonnegative")
    rows = [solve_bound(relay.with_r0(r), method, tol, **kwargs) for r in grid]
    order = sorted(range(len(grid)), key=grid.__getitem__)
    for i, j in zip(order, order[1:]):
        if rows[j].new_bound < rows[i].new_bound - 1e-9:
            raise BoundInvariantError(
                f"new bound decreases from R0={grid[i]} to R0={grid[j]}")
    return rows


def sweep_csv(rows: list[BoundReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow([format(row.r0, ".12g"), format(row.cutset, ".12g"),
                         format(row.new_bound, ".12g"), format(row.a_star, ".12g"), row.active])
    return buf.getvalue()
