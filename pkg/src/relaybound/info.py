"""Information measures in bits: entropy, mutual information, capacity, point mutual information."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .blocks import check_budget
from .channels import ChannelError, channel_matrix, prob_vector


class CapacityConvergenceError(RuntimeError):
    def __init__(self, lower: float, upper: float, iterations: int):
        self.lower, self.upper, self.iterations = lower, upper, iterations
        super().__init__(
            f"Blahut-Arimoto did not converge in {iterations} iterations: "
            f"capacity in [{lower:.12g}, {upper:.12g}]")


def _xlogx_ratio(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise a*log2(a/b) with 0*log(0/b) = 0."""
    out = np.zeros(np.broadcast(a, b).shape)
    a, b = np.broadcast_arrays(a, b)
    mask = a > 0
    out[mask] = a[mask] * np.log2(a[mask] / b[mask])
    return out


def entropy(p) -> float:
    p = prob_vector(p)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum()) + 0.0


def binary_entropy(rho: float) -> float:
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"binary entropy argument {rho} outside [0, 1]")
    if rho in (0.0, 1.0):
        return 0.0
    return float(-rho * np.log2(rho) - (1 - rho) * np.log2(1 - rho))


def kl_divergences(w: np.ndarray, q: np.ndarray) -> np.ndarray:
    """D(w[x] || q) for each row x, in bits."""
    return _xlogx_ratio(w, q[None, :]).sum(axis=1)


def mutual_information(p, w) -> float:
    p = prob_vector(p)
    w = channel_matrix(w)
    if p.size != w.shape[0]:
        raise ChannelError(f"input distribution has {p.size} symbols, channel expects {w.shape[0]}")
    return _mi(p, w)


def _mi(p: np.ndarray, w: np.ndarray) -> float:
    q = p @ w
    used = p > 0
    return max(float(p[used] @ kl_divergences(w[used], q)), 0.0)


def mutual_information_grad(p: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Gradient of I(p, w) with respect to p (unconstrained, bits)."""
    q = p @ w
    return kl_divergences(w, q) - 1.0 / np.log(2)


def capacity(w, tol: float = 1e-9, max_iter: int = 100_000) -> tuple[float, np.ndarray]:
    """Blahut-Arimoto capacity and an achieving input distribution.

    Iterates until the certified bracket ``I(p) <= C <= max_x D(w_x || p w)`` is
    narrower than ``tol``; returns the lower end.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w = channel_matrix(w)
    p = np.full(w.shape[0], 1.0 / w.shape[0])
    lower = upper = 0.0
    for it in range(max_iter):
        d = kl_divergences(w, p @ w)
        lower = float(p @ d)
        upper = float(d.max())
        if upper - lower <= tol:
            return max(lower, 0.0), prob_vector(p / p.sum())
        p = p * np.exp2(d - upper)
        p /= p.sum()
    raise CapacityConvergenceError(lower, upper, max_iter)


# --- point mutual information ------------------------------------------------

class PmiSample(NamedTuple):
    value: float
    weight: float


def pmi_samples(p_in, w, condition=None, budget: int = 10**7) -> list[PmiSample]:
    """Exact distribution of the point mutual information.

    Without ``condition``: i(X;V) = log p(v|x)/p(v) for X ~ p_in, V ~ w.
    With ``condition`` (the p(y|x) channel), ``w`` is read as the joint kernel over
    (y, z) with index ``y * |Z| + z`` and the samples are i(X;Z|Y). Outcomes with
    zero probability are dropped; equal values (to 1e-12) are merged.
    """
    p_in = prob_vector(p_in)
    w = channel_matrix(w)
    if p_in.size != w.shape[0]:
        raise ChannelError(f"input distribution has {p_in.size} symbols, channel expects {w.shape[0]}")
    check_budget(w.size, "PMI outcomes", budget)
    joint = p_in[:, None] * w
    if condition is None:
        out = p_in @ w
        ratio_num, ratio_den = w, np.broadcast_to(out, w.shape)
    else:
        condition = channel_matrix(condition)
        ny = condition.shape[1]
        if condition.shape[0] != w.shape[0] or w.shape[1] % ny:
            raise ChannelError("condition channel does not match the joint kernel")
        cube = w.reshape(w.shape[0], ny, -1)
        if np.max(np.abs(cube.sum(axis=2) - condition)) > 1e-9:
            raise ChannelError("condition channel is not the y-marginal of the joint kernel")
        p_yz = p_in @ w
        p_y = p_in @ condition
        # p(z|x,y) / p(z|y)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio_num = (cube / condition[:, :, None]).reshape(w.shape)
            ratio_den = np.broadcast_to((p_yz.reshape(ny, -1) / p_y[:, None]).ravel(), w.shape)
    mask = joint > 0
    values = np.log2(ratio_num[mask] / ratio_den[mask])
    weights = joint[mask]
    keys = np.round(values, 12)
    uniq, inv = np.unique(keys, return_inverse=True)
    merged = np.bincount(inv, weights=weights)
    return [PmiSample(float(v), float(m)) for v, m in zip(uniq, merged)]


def pmi_mean(samples: list[PmiSample]) -> float:
    return float(sum(s.value * s.weight for s in samples))


def pmi_quantile(samples: list[PmiSample], q: float) -> float:
    """Smallest value whose cumulative weight reaches ``q`` (lower weighted quantile)."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("quantile level must be in [0, 1]")
    ordered = sorted(samples)
    values = np.array([s.value for s in ordered])
    cum = np.cumsum([s.weight for s in ordered])
    k = int(np.searchsorted(cum, q - 1e-12, side="left"))
    return float(values[min(k, values.size - 1)])
