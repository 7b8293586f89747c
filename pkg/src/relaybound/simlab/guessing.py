"""Color guessing: the destination replaces the relay's color by the color of a random point
drawn uniformly from a Hamming ball around a proxy of Z^n, then runs the code's decoder.

Proxy constructions, chosen from the channel structure:

* ``iid``        Y and Z are conditionally i.i.d.; Y^n itself is the proxy.
* ``XYZ``        Z is degraded from Y via q1; the proxy is q1 applied letterwise to Y^n.
* ``XZY``        Y is degraded from Z via q2; roles swap: Z^n is the ball center and
                 Y~ = q2(Z^n) plays the decoder's side information.
* ``companion``  the proxy is drawn from the block conditional pbar(z^n | y^n) of a companion
                 channel, with X^n uniform over the codebook.
"""
from __future__ import annotations

import math

import numpy as np

from ..blocks import (channel_power, check_budget, codebook_channel, hamming_distances,
                      index_to_seq, seq_to_index)
from ..channels import CompanionChannel, RelayChannel, degradation_test
from ..exponent import error_exponent
from .blowup import RADIUS_SLACK
from .codes import RelayCode, code_success_probability, coloring_conditional_entropy
from .outcome import SimOutcome, proportion_estimate

MIN_TRIALS = 1000
CHUNK = 4096


class ProxyUnavailableError(ValueError):
    """Neither i.i.d. nor degraded and no companion given: use csicr_sim instead."""


def proxy_mode(relay: RelayChannel, companion: CompanionChannel | None = None):
    """Return (mode, kernel) where kernel is q1, q2, the companion conditional, or None."""
    if companion is not None:
        return "companion", companion
    if relay.is_iid():
        return "iid", None
    q1 = degradation_test(relay.w_y, relay.w_z)
    if q1 is not None:
        return "XYZ", q1
    q2 = degradation_test(relay.w_z, relay.w_y)
    if q2 is not None:
        return "XZY", q2
    raise ProxyUnavailableError(
        "relay is neither i.i.d. nor statistically degraded; pass a companion channel "
        "or simulate the relay observation with csicr_sim")


def ball_size(n: int, radius: int, alphabet: int) -> int:
    return sum(math.comb(n, d) * (alphabet - 1) ** d for d in range(min(radius, n) + 1))


def guess_radius(n: int, lam: float, a_n: float) -> int:
    return min(max(int(math.ceil(n * lam ** 1.5 * math.sqrt(max(a_n, 0.0)) - RADIUS_SLACK)), 0), n)


def sample_ball(centers: np.ndarray, radius: int, alphabet: int, rng) -> np.ndarray:
    """One uniform point of the radius-``radius`` Hamming ball around each center row."""
    t, n = centers.shape
    radius = min(radius, n)
    weights = np.array([math.comb(n, d) * (alphabet - 1) ** d for d in range(radius + 1)], dtype=float)
    dist = rng.choice(radius + 1, size=t, p=weights / weights.sum())
    # the first dist[i] positions of a random permutation get changed
    order = np.argsort(rng.random((t, n)), axis=1)
    change = np.zeros((t, n), dtype=bool)
    np.put_along_axis(change, order, np.arange(n)[None, :] < dist[:, None], axis=1)
    shift = rng.integers(1, alphabet, size=(t, n)) if alphabet > 1 else np.zeros((t, n), dtype=np.int64)
    return np.where(change, (centers + shift) % alphabet, centers)


def _sample_letters(w: np.ndarray, inputs: np.ndarray, rng) -> np.ndarray:
    cum = np.cumsum(w, axis=1)
    cum[:, -1] = 1.0
    u = rng.random(inputs.shape)
    return (u[..., None] >= cum[inputs]).sum(axis=-1)


def companion_conditional(code: RelayCode, companion: CompanionChannel) -> np.ndarray:
    """pbar(z^n | y^n) with X^n uniform over the codebook, shape (|Y|^n, |Z|^n).

    Y-sequences of zero probability get a uniform row.
    """
    n = code.n
    ny, nz = companion.parent.w_y.shape[1], companion.parent.w_z.shape[1]
    block = codebook_channel(code.codebook, companion.joint).sum(axis=0)
    check_budget(block.size, "companion block outcomes")
    axes = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    table = block.reshape((ny, nz) * n).transpose(axes).reshape(ny ** n, nz ** n)
    mass = table.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(mass > 0, table / np.where(mass > 0, mass, 1.0), 1.0 / nz ** n)


def _references(code: RelayCode, relay: RelayChannel, mode: str, lam: float, a_n: float,
                radius: int) -> dict:
    z_size = relay.w_z.shape[1]
    size = ball_size(code.n, radius, z_size)
    p0 = 1 - 1 / lam
    guesser = relay.w_z if mode == "XZY" else relay.w_y
    exponent = error_exponent(code.rate, guesser)
    return {"a_n": a_n, "radius": radius, "ball_size": size, "floor": p0 ** 3 / 4 / size,
            "ceiling": 2.0 ** (-code.n * exponent), "rate": code.rate,
            "code_success": code_success_probability(code, relay)}


def guessing_decoder_sim(code: RelayCode, relay: RelayChannel, lam: float, trials: int, seed: int,
                         companion: CompanionChannel | None = None) -> SimOutcome:
    """Monte Carlo success probability of the ball-guessing decoder.

    Trials are processed in fixed chunks of ``CHUNK``; chunk ``c`` draws from the
    generator seeded by ``[seed, c]``, so results depend only on (seed, trials).
    """
    if lam <= 1:
        raise ValueError("lambda must exceed 1")
    if trials < MIN_TRIALS:
        raise ValueError(f"guessing simulation needs at least {MIN_TRIALS} trials")
    mode, kernel = proxy_mode(relay, companion)
    n = code.n
    a_n = coloring_conditional_entropy(code, relay.w_z)
    radius = guess_radius(n, lam, a_n)
    z_size = relay.w_z.shape[1]
    y_size = relay.w_y.shape[1]
    cond_cum = None
    if mode == "companion":
        cond_cum = np.cumsum(companion_conditional(code, kernel), axis=1)
        cond_cum[:, -1] = 1.0
    successes = 0
    for chunk, start in enumerate(range(0, trials, CHUNK)):
        t = min(CHUNK, trials - start)
        rng = np.random.default_rng([seed, chunk])
        m = rng.integers(0, code.size, size=t)
        x = code.codebook[m]
        if mode == "XZY":
            center = _sample_letters(relay.w_z, x, rng)
            side = _sample_letters(kernel, center, rng)
        else:
            side = _sample_letters(relay.w_y, x, rng)
            if mode == "iid":
                center = side
            elif mode == "XYZ":
                center = _sample_letters(kernel, side, rng)
            else:
                u = rng.random(t)
                rows = cond_cum[seq_to_index(side, y_size)]
                center = index_to_seq((u[:, None] >= rows).sum(axis=1), z_size, n)
        guess = sample_ball(center, radius, z_size, rng)
        colors = code.coloring.color_of[seq_to_index(guess, z_size)]
        decoded = code.decoder[colors, seq_to_index(side, y_size)]
        successes += int(np.count_nonzero(decoded == m))
    estimate, half = proportion_estimate(successes, trials)
    refs = _references(code, relay, mode, lam, a_n, radius)
    return SimOutcome(
        operation="guessing_decoder_sim", estimate=estimate, exact=False, trials=trials,
        ci_halfwidth=half, seed=seed,
        params={"n": n, "codewords": code.size, "colors": code.coloring.colors, "lambda": lam,
                "proxy": mode},
        references=refs)


def exact_guessing_success(code: RelayCode, relay: RelayChannel, lam: float,
                           companion: CompanionChannel | None = None,
                           radius: int | None = None) -> float:
    """Exact success probability of the guessing decoder by full enumeration.

    ``radius`` overrides the lambda-derived ball radius.
    """
    mode, kernel = proxy_mode(relay, companion)
    n = code.n
    z_size, y_size = relay.w_z.shape[1], relay.w_y.shape[1]
    if radius is None:
        radius = guess_radius(n, lam, coloring_conditional_entropy(code, relay.w_z))
    check_budget(code.size * z_size ** n * y_size ** n, "codeword/center/side triples")
    if mode == "iid":
        p_s = codebook_channel(code.codebook, relay.w_y)
        joint = p_s[:, None, :] * np.eye(z_size ** n)[None, :, :]
    elif mode == "XYZ":
        p_s = codebook_channel(code.codebook, relay.w_y)
        joint = p_s[:, None, :] * channel_power(kernel, n).T[None, :, :]
    elif mode == "XZY":
        p_c = codebook_channel(code.codebook, relay.w_z)
        joint = p_c[:, :, None] * channel_power(kernel, n)[None, :, :]
    else:
        p_s = codebook_channel(code.codebook, relay.w_y)
        joint = p_s[:, None, :] * companion_conditional(code, kernel).T[None, :, :]
    dist = hamming_distances(z_size, n)
    ball = (dist <= radius).astype(float)
    ball /= ball.sum(axis=1, keepdims=True)
    decoded = code.decoder[code.coloring.color_of]          # (omega, side) -> codeword
    total = 0.0
    for m in range(code.size):
        hit = ball @ (decoded == m)
        total += float(np.sum(joint[m] * hit))
    return total / code.size
