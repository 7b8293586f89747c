"""Finite probability objects: input distributions, channel matrices and the relay channel.

Distributions and channels are plain numpy arrays (read-only after validation).
A channel matrix ``w`` has shape ``(in_size, out_size)`` with ``w[x, y] = p(y|x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

STOCHASTIC_TOL = 1e-12
MARGINAL_TOL = 1e-9


class ChannelError(ValueError):
    """Invalid probability vector, channel matrix or channel combination."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def prob_vector(p, tol: float = STOCHASTIC_TOL) -> np.ndarray:
    """Validate ``p`` as a distribution and return it as a read-only float array."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ChannelError(f"probability vector must be 1-D and nonempty, got shape {p.shape}")
    if np.any(p < -tol) or np.any(p > 1 + tol):
        raise ChannelError("probability weights must lie in [0, 1]")
    if abs(p.sum() - 1.0) > tol:
        raise ChannelError(f"probability weights sum to {p.sum()!r}, not 1")
    return _frozen(np.clip(p, 0.0, 1.0))


def channel_matrix(w, tol: float = STOCHASTIC_TOL) -> np.ndarray:
    """Validate ``w`` as a row-stochastic matrix and return it read-only."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
        raise ChannelError(f"channel matrix must be 2-D with positive sizes, got shape {w.shape}")
    if np.any(w < -tol) or np.any(w > 1 + tol):
        raise ChannelError("channel entries must lie in [0, 1]")
    bad = np.flatnonzero(np.abs(w.sum(axis=1) - 1.0) > tol)
    if bad.size:
        raise ChannelError(f"row {bad[0]} of channel matrix sums to {w[bad[0]].sum()!r}")
    return _frozen(np.clip(w, 0.0, 1.0))


def compose(w: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Cascade ``x -> w -> q``: returns sum_y w[x, y] q[y, z]."""
    if w.shape[1] != q.shape[0]:
        raise ChannelError(f"cannot compose {w.shape} with {q.shape}")
    return _frozen(w @ q)


# --- built-in channels -------------------------------------------------------

def bec(eps: float) -> np.ndarray:
    """Binary erasure channel; outputs ordered (0, 1, erasure)."""
    if not 0.0 <= eps <= 1.0:
        raise ChannelError(f"erasure probability {eps} outside [0, 1]")
    return channel_matrix([[1 - eps, 0.0, eps], [0.0, 1 - eps, eps]])


def bsc(p: float) -> np.ndarray:
    if not 0.0 <= p <= 1.0:
        raise ChannelError(f"crossover probability {p} outside [0, 1]")
    return channel_matrix([[1 - p, p], [p, 1 - p]])


def identity(k: int) -> np.ndarray:
    if k < 1:
        raise ChannelError("identity channel needs at least one symbol")
    return channel_matrix(np.eye(k))


def det_example_channels() -> tuple[np.ndarray, np.ndarray]:
    """The 4-input deterministic relay pair: Y splits {1,2}|{3,4}, Z splits {1,3}|{2,4}.

    Inputs 1..4 map to rows 0..3; Y outputs (A, B), Z outputs (C, D).
    """
    w_y = channel_matrix([[1, 0], [1, 0], [0, 1], [0, 1]])
    w_z = channel_matrix([[1, 0], [0, 1], [1, 0], [0, 1]])
    return w_y, w_z


# --- relay channel -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RelayChannel:
    """Relay channel with p(y,z|x) = p(y|x) p(z|x) and a lossless Z->Y link of rate r0."""

    w_y: np.ndarray
    w_z: np.ndarray
    r0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "w_y", channel_matrix(self.w_y))
        object.__setattr__(self, "w_z", channel_matrix(self.w_z))
        if self.w_y.shape[0] != self.w_z.shape[0]:
            raise ChannelError(
                f"input alphabets differ: {self.w_y.shape[0]} vs {self.w_z.shape[0]}")
        if not np.isfinite(self.r0) or self.r0 < 0:
            raise ChannelError(f"r0 must be a nonnegative real, got {self.r0}")

    @property
    def in_size(self) -> int:
        return self.w_y.shape[0]

    def with_r0(self, r0: float) -> "RelayChannel":
        return RelayChannel(self.w_y, self.w_z, r0)

    def is_iid(self) -> bool:
        """Y and Z identically distributed given X (entrywise equal channels)."""
        return self.w_y.shape == self.w_z.shape and bool(np.array_equal(self.w_y, self.w_z))


def joint_channel(relay: RelayChannel) -> np.ndarray:
    """X -> (Y, Z) channel; output index is ``y * |Z| + z``."""
    joint = relay.w_y[:, :, None] * relay.w_z[:, None, :]
    return _frozen(joint.reshape(relay.in_size, -1))


def degradation_test(w_a: np.ndarray, w_b: np.ndarray, tol: float = 1e-9) -> np.ndarray | None:
    """Find a stochastic kernel q with ``w_b = w_a @ q`` (w_b degraded from w_a).

    Solves the LP  min t  s.t.  |w_a q - w_b| <= t entrywise,  q row-stochastic, q >= 0.
    Returns q when the optimal max-abs residual is within ``tol``, else None.
    """
    w_a = channel_matrix(w_a)
    w_b = channel_matrix(w_b)
    if w_a.shape[0] != w_b.shape[0]:
        raise ChannelError(f"input alphabets differ: {w_a.shape[0]} vs {w_b.shape[0]}")
    if w_a.shape == w_b.shape and np.array_equal(w_a, w_b):
        return _frozen(np.eye(w_a.shape[1]))
    nx, ny = w_a.shape
    nz = w_b.shape[1]
    nq = ny * nz
    # variables: q (row-major, ny x nz) then t
    c = np.zeros(nq + 1)
    c[-1] = 1.0
    # composition residual rows: for each (x, z): sum_y w_a[x, y] q[y, z] - w_b[x, z]
    comp = np.zeros((nx * nz, nq))
    for x in range(nx):
        for z in range(nz):
            comp[x * nz + z, np.arange(ny) * nz + z] = w_a[x]
    ones = np.ones((nx * nz, 1))
    a_ub = np.vstack([np.hstack([comp, -ones]), np.hstack([-comp, -ones])])
    b_ub = np.concatenate([w_b.ravel(), -w_b.ravel()])
    a_eq = np.zeros((ny, nq + 1))
    for y in range(ny):
        a_eq[y, y * nz:(y + 1) * nz] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=np.ones(ny),
                  bounds=[(0, None)] * (nq + 1), method="highs")
    if res.status != 0:
        return None
    q = np.clip(res.x[:nq].reshape(ny, nz), 0.0, None)
    q /= q.sum(axis=1, keepdims=True)
    if np.max(np.abs(w_a @ q - w_b)) > tol:
        return None
    return _frozen(q)


# --- companion channel -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CompanionChannel:
    """A joint p_bar(y,z|x) sharing both marginals with ``parent``.

    ``joint`` has shape ``(in, |Y| * |Z|)`` indexed like :func:`joint_channel`.
    """

    joint: np.ndarray
    parent: RelayChannel = field(repr=False)

    def __post_init__(self):
        joint = channel_matrix(self.joint)
        ny, nz = self.parent.w_y.shape[1], self.parent.w_z.shape[1]
        if joint.shape != (self.parent.in_size, ny * nz):
            raise ChannelError(
                f"companion joint has shape {joint.shape}, expected {(self.parent.in_size, ny * nz)}")
        cube = joint.reshape(-1, ny, nz)
        dy = np.max(np.abs(cube.sum(axis=2) - self.parent.w_y))
        dz = np.max(np.abs(cube.sum(axis=1) - self.parent.w_z))
        if dy > MARGINAL_TOL or dz > MARGINAL_TOL:
            raise ChannelError(f"companion marginals mismatch (y: {dy:.3g}, z: {dz:.3g})")
        object.__setattr__(self, "joint", joint)

    @property
    def cube(self) -> np.ndarray:
        """Joint as a ``(x, y, z)`` array."""
        return self.joint.reshape(self.parent.in_size, self.parent.w_y.shape[1], -1)

    def y_marginal(self) -> np.ndarray:
        return _frozen(self.cube.sum(axis=2))


def companion_from_kernel(relay: RelayChannel, q1: np.ndarray) -> CompanionChannel:
    """Markov companion p(y|x) q1(z|y); requires ``w_y @ q1 == w_z``."""
    q1 = channel_matrix(q1)
    if q1.shape != (relay.w_y.shape[1], relay.w_z.shape[1]):
        raise ChannelError(f"kernel shape {q1.shape} does not map Y to Z")
    resid = np.max(np.abs(relay.w_y @ q1 - relay.w_z))
    if resid > MARGINAL_TOL:
        raise ChannelError(f"kernel does not reproduce p(z|x): residual {resid:.3g}")
    joint = relay.w_y[:, :, None] * q1[None, :, :]
    return CompanionChannel(joint.reshape(relay.in_size, -1), relay)


def product_companion(relay: RelayChannel) -> CompanionChannel:
    """The relay channel itself, which trivially shares its own marginals."""
    return CompanionChannel(joint_channel(relay), relay)


def mix_companions(a: CompanionChannel, b: CompanionChannel, weight: float) -> CompanionChannel:
    """Convex combination ``weight * a + (1 - weight) * b``; marginals are preserved."""
    if a.parent is not b.parent and not (
            np.array_equal(a.parent.w_y, b.parent.w_y) and np.array_equal(a.parent.w_z, b.parent.w_z)):
        raise ChannelError("companions belong to different relay channels")
    if not 0.0 <= weight <= 1.0:
        raise ChannelError("mixing weight must be in [0, 1]")
    return CompanionChannel(weight * a.joint + (1 - weight) * b.joint, a.parent)
