"""Small relay codes: codebook, relay coloring of Z-sequences, and a table decoder f(color, y^n).

Sequences are referred to by their big-endian flat index (see :mod:`relaybound.blocks`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..blocks import check_budget, codebook_channel, index_to_seq, seq_to_index
from ..channels import RelayChannel, det_example_channels
from ..info import entropy
from .outcome import SimOutcome, proportion_estimate


def color_count(n: int, r0: float) -> int:
    """ceil(2^(n r0)), ignoring float noise just above an integer."""
    return max(int(math.ceil(2.0 ** (n * r0) - 1e-9)), 1)


@dataclass(frozen=True, eq=False)
class Coloring:
    """Relay map from Z^n (by flat index) to colors 0..colors-1."""

    color_of: np.ndarray
    n: int
    r0: float
    z_size: int

    def __post_init__(self):
        color_of = np.asarray(self.color_of, dtype=np.int64)
        if color_of.shape != (self.z_size ** self.n,):
            raise ValueError(f"coloring must assign a color to all {self.z_size ** self.n} Z-sequences")
        if color_of.min() < 0 or color_of.max() >= self.colors:
            raise ValueError(f"colors must lie in [0, {self.colors})")
        color_of.setflags(write=False)
        object.__setattr__(self, "color_of", color_of)

    @property
    def colors(self) -> int:
        return color_count(self.n, self.r0)

    def onehot(self) -> np.ndarray:
        out = np.zeros((self.color_of.size, self.colors))
        out[np.arange(self.color_of.size), self.color_of] = 1.0
        return out


def constant_coloring(z_size: int, n: int, r0: float = 0.0) -> Coloring:
    return Coloring(np.zeros(z_size ** n, dtype=np.int64), n, r0, z_size)


def random_balanced_coloring(z_size: int, n: int, r0: float, seed) -> Coloring:
    """Seeded coloring whose color classes differ in size by at most one."""
    rng = np.random.default_rng(seed)
    count = z_size ** n
    colors = color_count(n, r0)
    color_of = np.empty(count, dtype=np.int64)
    color_of[rng.permutation(count)] = np.arange(count) % colors
    return Coloring(color_of, n, r0, z_size)


def color_distributions(codebook: np.ndarray, coloring: Coloring, w_z: np.ndarray) -> np.ndarray:
    """P[m, j] = Pr(color j | codeword m) under the memoryless channel w_z."""
    return codebook_channel(codebook, w_z) @ coloring.onehot()


@dataclass(frozen=True, eq=False)
class RelayCode:
    """Codebook rows are X-sequences; ``decoder[j, y]`` is the decoded codeword index."""

    codebook: np.ndarray
    coloring: Coloring
    decoder: np.ndarray
    x_size: int
    y_size: int

    def __post_init__(self):
        codebook = np.asarray(self.codebook, dtype=np.int64)
        if codebook.ndim != 2 or codebook.shape[1] != self.coloring.n:
            raise ValueError("codebook must be an (M, n) array matching the coloring blocklength")
        if codebook.min() < 0 or codebook.max() >= self.x_size:
            raise ValueError("codebook symbols outside the input alphabet")
        if np.unique(seq_to_index(codebook, self.x_size)).size != codebook.shape[0]:
            raise ValueError("codebook entries must be distinct")
        decoder = np.asarray(self.decoder, dtype=np.int64)
        if decoder.shape != (self.coloring.colors, self.y_size ** self.n):
            raise ValueError("decoder must be defined for every (color, y-sequence) pair")
        if decoder.min() < 0 or decoder.max() >= codebook.shape[0]:
            raise ValueError("decoder outputs must be codeword indices")
        codebook.setflags(write=False)
        decoder.setflags(write=False)
        object.__setattr__(self, "codebook", codebook)
        object.__setattr__(self, "decoder", decoder)

    @property
    def n(self) -> int:
        return self.coloring.n

    @property
    def size(self) -> int:
        return self.codebook.shape[0]

    @property
    def rate(self) -> float:
        return math.log2(self.size) / self.n

    @classmethod
    def with_map_decoder(cls, codebook, coloring: Coloring, relay: RelayChannel) -> "RelayCode":
        """Maximum a posteriori decoder for equiprobable codewords (ties go to the lower index)."""
        codebook = np.asarray(codebook, dtype=np.int64)
        p_y = codebook_channel(codebook, relay.w_y)
        p_c = color_distributions(codebook, coloring, relay.w_z)
        check_budget(p_y.size * p_c.shape[1], "decoder likelihoods")
        like = p_c[:, :, None] * p_y[:, None, :]
        return cls(codebook, coloring, like.argmax(axis=0), relay.in_size, relay.w_y.shape[1])


def random_code(relay: RelayChannel, n: int, rate: float, r0: float, seed) -> RelayCode:
    """Distinct uniformly drawn codewords, a balanced random coloring and the MAP decoder."""
    rng = np.random.default_rng(seed)
    total = relay.in_size ** n
    m = min(color_count(n, rate), total)
    idx = np.sort(rng.choice(total, size=m, replace=False))
    coloring = random_balanced_coloring(relay.w_z.shape[1], n, r0, rng)
    return RelayCode.with_map_decoder(index_to_seq(idx, relay.in_size, n), coloring, relay)


def coloring_conditional_entropy(code: RelayCode, w_z: np.ndarray) -> float:
    """a_n = H(color | X^n) / n with X^n uniform over the codebook."""
    return float(np.mean(color_entropies(code, w_z))) / code.n


def color_entropies(code: RelayCode, w_z: np.ndarray) -> np.ndarray:
    """H(color | X^n = x_m) for every codeword, in bits."""
    p_c = color_distributions(code.codebook, code.coloring, w_z)
    return np.array([entropy(row / row.sum()) for row in p_c])


def code_success_probability(code: RelayCode, relay: RelayChannel) -> float:
    """Exact Pr(decoder(color(Z^n), Y^n) = X^n) with the true color."""
    p_y = codebook_channel(code.codebook, relay.w_y)
    p_c = color_distributions(code.codebook, code.coloring, relay.w_z)
    hits = code.decoder[None, :, :] == np.arange(code.size)[:, None, None]
    return float(np.sum(p_c[:, :, None] * p_y[:, None, :] * hits) / code.size)


# --- the deterministic four-input relay example ------------------------------

def _check_det_params(n: int, r0: float) -> int:
    if not 0 <= r0 < 1:
        raise ValueError("the deterministic scheme needs 0 <= r0 < 1")
    k = round(n * r0)
    if abs(k - n * r0) > 1e-9:
        raise ValueError(f"n * r0 = {n * r0} is not an integer")
    return k


def det_codebooks(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Rate-1 book of all binary n-strings and a 2^k book carrying w2 in its first k symbols."""
    alpha = index_to_seq(np.arange(2 ** n), 2, n)
    beta = np.zeros((2 ** k, n), dtype=np.int64)
    beta[:, :k] = index_to_seq(np.arange(2 ** k), 2, k)
    return alpha, beta


def det_encode(alpha_row: np.ndarray, beta_row: np.ndarray) -> np.ndarray:
    """Symbol merge: (a,c)->0, (a,d)->1, (b,c)->2, (b,d)->3, i.e. inputs 1..4."""
    return 2 * alpha_row + beta_row


def det_code(n: int, r0: float) -> RelayCode:
    """The merged code as a :class:`RelayCode`; message m = w1 * 2^k + w2."""
    k = _check_det_params(n, r0)
    alpha, beta = det_codebooks(n, k)
    codebook = det_encode(np.repeat(alpha, 2 ** k, axis=0), np.tile(beta, (2 ** n, 1)))
    z_first = index_to_seq(np.arange(2 ** n), 2, n)[:, :k]
    coloring = Coloring(seq_to_index(z_first, 2) if k else np.zeros(2 ** n, dtype=np.int64), n, k / n, 2)
    decoder = np.arange(2 ** n)[None, :] * 2 ** k + np.arange(2 ** k)[:, None]
    return RelayCode(codebook, coloring, decoder, 4, 2)


def det_example_run(n: int, r0: float, messages: int | None = None, seed: int = 0) -> SimOutcome:
    """Send message pairs through the deterministic relay channel and count decoding errors.

    ``messages=None`` enumerates all 2^(n+k) pairs; otherwise that many uniform pairs are drawn.
    """
    k = _check_det_params(n, r0)
    w_y, w_z = det_example_channels()
    alpha, beta = det_codebooks(n, k)
    total = 2 ** (n + k)
    if messages is None:
        w1, w2 = np.divmod(np.arange(total), 2 ** k)
    else:
        if messages < 1:
            raise ValueError("need at least one message")
        rng = np.random.default_rng(seed)
        w1 = rng.integers(0, 2 ** n, size=messages)
        w2 = rng.integers(0, 2 ** k, size=messages)
    x = det_encode(alpha[w1], beta[w2])
    y = w_y.argmax(axis=1)[x]          # both channels are deterministic
    z = w_z.argmax(axis=1)[x]
    w2_hat = seq_to_index(z[:, :k], 2) if k else np.zeros_like(w2)   # relay decodes and forwards
    w1_hat = seq_to_index(y, 2)
    errors = int(np.count_nonzero((w1_hat != w1) | (w2_hat != w2)))
    trials = w1.size
    exhaustive = messages is None
    if exhaustive:
        estimate, half = errors / trials, 0.0
    else:
        estimate, half = proportion_estimate(errors, trials)
    return SimOutcome(
        operation="det_example_run", estimate=estimate, exact=exhaustive, trials=trials,
        ci_halfwidth=half, seed=None if exhaustive else seed,
        params={"n": n, "r0": r0, "k": k, "messages": messages},
        references={"errors": errors, "bits_per_block": n + k, "rate": (n + k) / n},
        passed=errors == 0)
