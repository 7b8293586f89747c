"""Arimoto strong-converse exponent of a discrete memoryless channel.

For rho in (-1, 0) and input distribution p,

    phi0(rho, p) = -log2 sum_j ( sum_k p_k P[k, j]^(1/(1+rho)) )^(1+rho)

and E(R) = max_rho ( -rho R + min_p phi0(rho, p) ). All evaluations happen in the
log domain, since P^(1/(1+rho)) underflows for rho near -1.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import channel_matrix, prob_vector
from .info import capacity

LN2 = math.log(2.0)
RHO_MIN = -1.0 + 1e-6
RHO_MAX = -1e-9
COARSE_POINTS = 64
VALUE_TOL = 1e-13      # certified accuracy of min_p phi0
MAX_FIXED_POINT = 200_000
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def logsumexp(a: np.ndarray, axis=None) -> np.ndarray:
    """log(sum(exp(a))) along ``axis``; all -inf slices give -inf."""
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True)) + m
    return np.squeeze(out, axis=axis) if axis is not None else out.reshape(())


def _check_rho(rho: float) -> None:
    if not -1.0 < rho < 0.0:
        raise ValueError(f"rho must lie in the open interval (-1, 0), got {rho}")


def _log_w(w: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(w)


def _phi0_batch(rho: float, ps: np.ndarray, log_w: np.ndarray) -> np.ndarray:
    """phi0 for each row of ``ps`` (shape (m, K)); returns shape (m,)."""
    s = 1.0 / (1.0 + rho)
    with np.errstate(divide="ignore"):
        log_p = np.log(ps)
    # ln S_j = ln sum_k p_k P_kj^s
    log_s = logsumexp(log_p[:, :, None] + s * log_w[None, :, :], axis=1)
    return -logsumexp((1.0 + rho) * log_s, axis=1) / LN2


def phi0(rho: float, p, w) -> float:
    _check_rho(rho)
    w = channel_matrix(w)
    p = prob_vector(p)
    if p.size != w.shape[0]:
        raise ValueError(f"input distribution has {p.size} symbols, channel expects {w.shape[0]}")
    return float(_phi0_batch(rho, p[None, :], _log_w(w))[0])


def _section_search_binary(rho: float, log_w: np.ndarray, xtol: float = 1e-9) -> tuple[np.ndarray, float]:
    # phi0 is convex in p; shrink a bracket around the grid minimiser
    lo, hi = 0.0, 1.0
    best_p, best_v = 0.5, math.inf
    while True:
        xs = np.linspace(lo, hi, 33)
        vals = _phi0_batch(rho, np.column_stack([xs, 1.0 - xs]), log_w)
        i = int(np.argmin(vals))
        if vals[i] < best_v:
            best_p, best_v = float(xs[i]), float(vals[i])
        if hi - lo < xtol:
            break
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    return np.array([best_p, 1.0 - best_p]), best_v


def _ratios(rho: float, p: np.ndarray, log_w: np.ndarray) -> tuple[float, np.ndarray]:
    """(ln G, ln r) with G = sum_j S_j^(1+rho) and r_k = sum_j S_j^rho P_kj^s / G."""
    s = 1.0 / (1.0 + rho)
    with np.errstate(divide="ignore"):
        log_p = np.log(p)
    log_s = logsumexp(log_p[:, None] + s * log_w, axis=0)
    log_g = float(logsumexp((1.0 + rho) * log_s))
    # an output no live input reaches has S_j = 0: S_j^rho is infinite for inputs that reach
    # it and the term is absent for the rest
    dead = np.isneginf(log_s)[None, :]
    with np.errstate(invalid="ignore"):
        terms = np.where(dead, np.where(np.isneginf(log_w), -np.inf, np.inf), rho * log_s[None, :] + s * log_w)
    return log_g, logsumexp(terms, axis=1) - log_g


def _newton_step(rho: float, p: np.ndarray, log_w: np.ndarray) -> np.ndarray | None:
    """Newton step for max G on the support of ``p``; inputs the step drives negative are dropped
    and the step is recomputed on what remains. None when no valid step exists.
    """
    live = np.flatnonzero(p > 0)
    while live.size >= 2:
        q = _newton_on(rho, p, live, log_w)
        if q is None:
            return None
        bad = q[live] <= 0
        if not bad.any():
            return q / q.sum()
        live = live[~bad]
    return None


def _newton_on(rho: float, p: np.ndarray, live: np.ndarray, log_w: np.ndarray) -> np.ndarray | None:
    # with u_kj = P_kj^s / S_j and c_j = S_j^(1+rho) / G:
    # grad G / G = (1+rho) U c and hess G / G = rho (1+rho) U diag(c) U^T
    s = 1.0 / (1.0 + rho)
    p = np.where(np.isin(np.arange(p.size), live), p, 0.0)
    p = p / p.sum()
    lw = s * log_w[live]
    log_s = logsumexp(np.log(p[live])[:, None] + lw, axis=0)
    keep = np.isfinite(log_s)
    lw, log_s = lw[:, keep], log_s[keep]
    c = np.exp((1.0 + rho) * log_s - logsumexp((1.0 + rho) * log_s))
    u = np.exp(lw - log_s[None, :])
    grad = (1.0 + rho) * (u @ c)
    hess = rho * (1.0 + rho) * (u * c[None, :]) @ u.T
    m = live.size
    kkt = np.zeros((m + 1, m + 1))
    kkt[:m, :m] = hess
    kkt[:m, m] = kkt[m, :m] = 1.0
    sol = np.linalg.lstsq(kkt, np.concatenate([-grad, [0.0]]), rcond=1e-14)[0]
    q = p.copy()
    q[live] += sol[:m]
    return q if np.all(np.isfinite(q)) else None


def _fixed_point(rho: float, log_w: np.ndarray, tol: float = VALUE_TOL,
                 max_iter: int = MAX_FIXED_POINT) -> tuple[np.ndarray, float, float]:
    """Maximise the concave G(p) by p_k <- p_k r_k^beta; returns (p, phi0, certified error).

    Since sum_k p_k r_k = 1 and G is concave and homogeneous of degree 1 + rho,
    max G <= G(p) (1 + (1 + rho)(max_k r_k - 1)), which bounds the error in phi0. The
    relaxed exponent beta = 1/|rho| matches Blahut-Arimoto steps as rho -> 0; whenever it
    fails to increase G the plain (monotone) step beta = 1 is taken instead. Multiplicative
    steps find the support; interleaved Newton steps on that support supply the fast local
    convergence, and are kept only when they raise G or tighten the certificate.
    """
    k = log_w.shape[0]
    p = np.full(k, 1.0 / k)
    beta = max(1.0, -1.0 / rho)
    log_g, log_r = _ratios(rho, p, log_w)
    err = math.inf
    for it in range(max_iter):
        err = (1.0 + rho) * math.expm1(float(log_r.max())) / LN2
        if err <= tol:
            break
        if it % 32 == 31:
            # inputs leaving the support decay only geometrically; drop them once they are
            # negligible and their ratio is below 1, and revive any whose ratio climbs above 1
            dead = (p < 1e-7 * p.max()) & (log_r < -1e-9)
            revive = (p == 0) & (log_r > 0)
            if dead.any() or revive.any():
                p = np.where(dead, 0.0, np.where(revive, 1e-7 * p.max(), p))
                p /= p.sum()
                log_g, log_r = _ratios(rho, p, log_w)
                continue
        if it >= 8 and it % 4 == 0:
            # Newton on the support converges quadratically once the support is right
            q = _newton_step(rho, p, log_w)
            if q is not None:
                log_g_new, log_r_new = _ratios(rho, q, log_w)
                if log_g_new >= log_g or log_r_new.max() < log_r.max():
                    p, log_g, log_r = q, log_g_new, log_r_new
                    continue
        for b in (beta, 1.0):
            q = p * np.exp(b * (log_r - log_r.max()))
            q /= q.sum()
            log_g_new, log_r_new = _ratios(rho, q, log_w)
            if log_g_new >= log_g or b == 1.0:
                break
        p, log_g, log_r = q, log_g_new, log_r_new
    return p, -log_g / LN2, err


def _min_phi0(rho: float, w: np.ndarray, log_w: np.ndarray) -> tuple[np.ndarray, float]:
    k = w.shape[0]
    if k == 1:
        p = np.ones(1)
        return p, float(_phi0_batch(rho, p[None, :], log_w)[0])
    if k == 2:
        return _section_search_binary(rho, log_w)
    p, value, err = _fixed_point(rho, log_w)
    if err > 1e-9:
        warnings.warn(f"min_phi0 at rho={rho} only certified to {err:.3g}", RuntimeWarning, stacklevel=3)
    return p, value


def min_phi0(rho: float, w) -> tuple[np.ndarray, float]:
    """Minimise phi0 over the input simplex; returns (minimiser, value)."""
    _check_rho(rho)
    w = channel_matrix(w)
    p, v = _min_phi0(rho, w, _log_w(w))
    return prob_vector(p / p.sum(), tol=1e-9), v


class ExponentSolver:
    """Per-channel cache of min_p phi0 values and the capacity."""

    def __init__(self, w):
        self.w = channel_matrix(w)
        self._log_w = _log_w(self.w)
        self._g: dict[float, tuple[float, np.ndarray]] = {}
        self.capacity = capacity(self.w, tol=1e-12)[0]
        self.rate_cap = math.log2(self.w.shape[0])
        self._grid = np.linspace(RHO_MIN, RHO_MAX, COARSE_POINTS)
        self._grid_g = np.array([self.g(r) for r in self._grid])

    def g(self, rho: float) -> float:
        return self.min_phi0(rho)[1]

    def min_phi0(self, rho: float) -> tuple[np.ndarray, float]:
        rho = float(rho)
        hit = self._g.get(rho)
        if hit is None:
            p, v = _min_phi0(rho, self.w, self._log_w)
            hit = self._g[rho] = (v, p)
        return hit[1], hit[0]

    def exponent(self, r: float, xtol: float = 1e-9) -> tuple[float, float, np.ndarray]:
        """(E(r), maximising rho, minimising p); E is clamped to 0 for r <= capacity."""
        if r < 0:
            raise ValueError("rate must be nonnegative")
        if r <= self.capacity:
            p, _ = self.min_phi0(RHO_MAX)
            return 0.0, RHO_MAX, p
        vals = -self._grid * r + self._grid_g
        i = int(np.argmax(vals))
        best_rho, best_val = float(self._grid[i]), float(vals[i])
        lo = self._grid[max(i - 1, 0)]
        hi = self._grid[min(i + 1, self._grid.size - 1)]

        def f(rho):
            return -rho * r + self.g(rho)

        rho, neg = _golden_min(lambda x: -f(x), float(lo), float(hi), xtol)
        if -neg > best_val:
            best_rho, best_val = rho, -neg
        p, _ = self.min_phi0(best_rho)
        return max(best_val, 0.0), best_rho, p

    def inverse(self, e_target: float, tol: float = 1e-10) -> tuple[float, bool]:
        """Smallest rate with E(R) >= e_target, and whether it saturated at log2|X|.

        Uses R(e) = min_rho (e - g(rho)) / (-rho), the exact inverse of the max over rho.
        """
        if e_target < 0:
            raise ValueError("target exponent must be nonnegative")
        if e_target == 0:
            return self.capacity, False

        def f(rho):
            return (e_target - self.g(rho)) / -rho

        vals = (e_target - self._grid_g) / -self._grid
        i = int(np.argmin(vals))
        best_rho, best_val = float(self._grid[i]), float(vals[i])
        a = float(self._grid[max(i - 1, 0)])
        b = float(self._grid[min(i + 1, self._grid.size - 1)])
        rho, val = _golden_min(f, a, b, tol * 1e-2)
        if val < best_val:
            best_rho, best_val = rho, val
        r = max(best_val, self.capacity)
        if r >= self.rate_cap:
            return self.rate_cap, True
        return r, False


def _golden_min(f, a: float, b: float, xtol: float) -> tuple[float, float]:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    cands = [(f(x), x) for x in (a, b)] + [(fc, c), (fd, d)]
    v, x = min(cands)
    return x, v


@lru_cache(maxsize=64)
def _cached_solver(key: bytes, shape: tuple[int, int]) -> ExponentSolver:
    return ExponentSolver(np.frombuffer(key, dtype=float).reshape(shape))


def solver_for(w) -> ExponentSolver:
    w = channel_matrix(w)
    return _cached_solver(np.ascontiguousarray(w).tobytes(), w.shape)


def error_exponent(r: float, w) -> float:
    return solver_for(w).exponent(r)[0]


def inverse_exponent(e_target: float, w, tol: float = 1e-10) -> tuple[float, bool]:
    """Rate R >= C with E(R) = e_target; the flag is True when capped at log2|X|."""
    return solver_for(w).inverse(e_target, tol)


def bec_switch_rate(eps: float) -> float:
    """Rate where the closed-form erasure exponent changes branch."""
    return 1.0 - eps / (2.0 - eps)


def bec_exponent(r: float, eps: float, branch: str | None = None) -> float:
    """Closed-form exponent of the binary erasure channel, valid for r > 1 - eps.

    ``branch`` ('low' or 'high') forces one of the two formulas regardless of r.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"erasure probability must be in (0, 1), got {eps}")
    if r <= 1.0 - eps:
        raise ValueError(f"rate {r} is not above the capacity {1.0 - eps}")
    if branch is None:
        branch = "high" if r >= bec_switch_rate(eps) else "low"
    if branch == "high":
        return r - math.log2(2.0 - eps)
    if branch != "low":
        raise ValueError(f"branch must be 'low' or 'high', got {branch!r}")
    if r >= 1.0:
        raise ValueError("the low-rate branch needs r < 1")
    return (r * math.log2(r * eps / ((1.0 - eps) * (1.0 - r)))
            - math.log2(r * eps / (1.0 - r) + eps))


@dataclass(frozen=True)
class ExponentCurve:
    channel: np.ndarray
    samples: tuple[tuple[float, float], ...]
    capacity: float
    rho_star: tuple[float, ...] = ()
    p_star: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        rates = [r for r, _ in self.samples]
        if any(b <= a for a, b in zip(rates, rates[1:])):
            raise ValueError("curve rates must be strictly increasing")

    def rate_for(self, e_target: float) -> tuple[float, bool]:
        return inverse_exponent(e_target, self.channel)

    def to_csv(self) -> str:
        k = self.channel.shape[0]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["R", "E", "rho_star"] + [f"p_star_{i}" for i in range(k)])
        for (r, e), rho, p in zip(self.samples, self.rho_star, self.p_star):
            writer.writerow([_fmt(r), _fmt(e), _fmt(rho)] + [_fmt(v) for v in p])
        return buf.getvalue()


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


def exponent_curve(w, rates) -> ExponentCurve:
    solver = solver_for(w)
    rates = sorted(float(r) for r in rates)
    rows = [solver.exponent(r) for r in rates]
    return ExponentCurve(
        channel=solver.w,
        samples=tuple((r, e) for r, (e, _, _) in zip(rates, rows)),
        capacity=solver.capacity,
        rho_star=tuple(rho for _, rho, _ in rows),
        p_star=tuple(tuple(float(x) for x in p) for _, _, p in rows),
    )
