"""Hamming blow-ups of events in finite product spaces and the concentration checks built on them.

An event is stored as a boolean mask over all ``alphabet**n`` sequences, in the big-endian
index order of :mod:`relaybound.blocks`. Expanding by one Hamming step is an OR of
axis-wise ``any`` reductions on the ``(alphabet,) * n`` view of the mask.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..blocks import ENUMERATION_BUDGET, all_sequences, check_budget, product_distribution
from ..channels import prob_vector
from ..info import entropy
from .outcome import SimOutcome

RADIUS_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class ProductSpace:
    alphabet: int
    n: int
    per_coordinate: tuple

    def __post_init__(self):
        if self.alphabet < 2 or self.n < 1:
            raise ValueError("need alphabet >= 2 and n >= 1")
        coords = tuple(prob_vector(p) for p in self.per_coordinate)
        if len(coords) != self.n or any(p.size != self.alphabet for p in coords):
            raise ValueError(f"need {self.n} coordinate distributions over {self.alphabet} symbols")
        check_budget(self.size, "sequences")
        object.__setattr__(self, "per_coordinate", coords)

    @classmethod
    def iid(cls, p, n: int) -> "ProductSpace":
        p = prob_vector(p)
        return cls(p.size, n, (p,) * n)

    @property
    def size(self) -> int:
        return self.alphabet ** self.n

    @property
    def shape(self) -> tuple:
        return (self.alphabet,) * self.n

    def probabilities(self) -> np.ndarray:
        return product_distribution(self.per_coordinate)


class EventSet:
    """A subset of a product space; built from indices, a mask, or a predicate on sequences."""

    def __init__(self, space: ProductSpace, mask: np.ndarray):
        mask = np.asarray(mask, dtype=bool).ravel()
        if mask.size != space.size:
            raise ValueError(f"mask has {mask.size} entries, space has {space.size}")
        self.space = space
        self.mask = mask

    @classmethod
    def from_indices(cls, space: ProductSpace, indices) -> "EventSet":
        mask = np.zeros(space.size, dtype=bool)
        mask[np.asarray(indices, dtype=np.int64)] = True
        return cls(space, mask)

    @classmethod
    def from_predicate(cls, space: ProductSpace, predicate) -> "EventSet":
        """``predicate`` maps an (N, n) array of sequences to N booleans."""
        return cls(space, predicate(all_sequences(space.alphabet, space.n)))

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __len__(self) -> int:
        return int(self.mask.sum())

    def probability(self) -> float:
        return float(self.space.probabilities()[self.mask].sum())

    def issubset(self, other: "EventSet") -> bool:
        return bool(np.all(other.mask[self.mask]))


def _expand_once(cube: np.ndarray) -> np.ndarray:
    out = cube.copy()
    for axis in range(cube.ndim):
        out |= cube.any(axis=axis, keepdims=True)
    return out


def blow_up(event: EventSet, l: int) -> EventSet:
    """All sequences within Hamming distance ``l`` of the event."""
    if l < 0:
        raise ValueError("blow-up radius must be nonnegative")
    space = event.space
    check_budget(space.size * space.n, "blow-up cell updates", ENUMERATION_BUDGET)
    cube = event.mask.reshape(space.shape)
    for _ in range(min(l, space.n)):
        nxt = _expand_once(cube)
        if np.array_equal(nxt, cube):
            break
        cube = nxt
    return EventSet(space, cube.ravel())


def blowup_radius(n: int, lam: float, c: float) -> int:
    """Smallest integer not below n * lam * sqrt(c), with float noise just above an integer ignored."""
    return max(int(math.ceil(n * lam * math.sqrt(max(c, 0.0)) - RADIUS_SLACK)), 0)


def blowing_up_check(event: EventSet, lam: float) -> SimOutcome:
    """Exact probability of the radius-n*lam*sqrt(c_n) blow-up, with c_n = -log2 Pr(A) / n.

    Passes when that probability is at least 1 - 1/lam.
    """
    if lam <= 1:
        raise ValueError("lambda must exceed 1")
    space = event.space
    prob = event.probability()
    if prob <= 0:
        raise ValueError("event has zero probability")
    c_n = max(-math.log2(prob) / space.n, 0.0)
    radius = blowup_radius(space.n, lam, c_n)
    blown = blow_up(event, radius).probability()
    floor = 1 - 1 / lam
    return SimOutcome(
        operation="blowing_up_check", estimate=blown, exact=True, trials=1, ci_halfwidth=0.0,
        params={"n": space.n, "alphabet": space.alphabet, "lambda": lam, "event_size": len(event)},
        references={"event_probability": prob, "c_n": c_n, "radius": radius, "floor": floor},
        passed=blown >= floor - 1e-12)


def codeword_entropy_check(entropies, lam: float) -> SimOutcome:
    """Mass of codewords whose color entropy is at most lam times the average is >= 1 - 1/lam.

    ``entropies`` holds H(color | x_m) for each (equiprobable) codeword.
    """
    h = np.asarray(entropies, dtype=float)
    mean = float(h.mean())
    mass = float(np.mean(h <= lam * mean + 1e-12))
    floor = 1 - 1 / lam
    return SimOutcome(
        operation="codeword_entropy_check", estimate=mass, exact=True, trials=1, ci_halfwidth=0.0,
        params={"lambda": lam, "codewords": h.size}, references={"mean_entropy": mean, "floor": floor},
        passed=mass >= floor - 1e-12)


def likely_colors_check(p, lam: float, entropy_cap: float | None = None) -> SimOutcome:
    """Colors with p_j >= 2^(-lam * H) carry mass >= 1 - 1/lam, for any cap H >= H(p)."""
    p = prob_vector(p)
    h = entropy(p)
    cap = h if entropy_cap is None else entropy_cap
    if cap < h - 1e-12:
        raise ValueError("entropy cap below the distribution's entropy")
    mass = float(p[p >= 2.0 ** (-lam * cap) * (1 - 1e-12)].sum())
    floor = 1 - 1 / lam
    return SimOutcome(
        operation="likely_colors_check", estimate=mass, exact=True, trials=1, ci_halfwidth=0.0,
        params={"lambda": lam, "colors": p.size}, references={"entropy": h, "cap": cap, "floor": floor},
        passed=mass >= floor - 1e-12)
