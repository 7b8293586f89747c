"""Soft covering experiments: how well a uniform mixture over a random codebook imitates an
output distribution, with and without side information at the decoder.

Distances are total variation in the unnormalised form sum |p - p~|, which ranges over [0, 2].
"""
from __future__ import annotations

import math

import numpy as np

from ..blocks import ENUMERATION_BUDGET, channel_power, check_budget, codebook_channel, product_distribution
from ..channels import CompanionChannel, RelayChannel, channel_matrix, prob_vector
from ..info import PmiSample, pmi_samples
from .codes import RelayCode, color_count
from .outcome import SimOutcome, mean_interval

MAX_COMMON_RANDOMNESS = 256


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def block_pmi(p_u, w, n: int) -> list[PmiSample]:
    """Distribution of i(U^n; V^n) / n for a memoryless source and channel."""
    p_u = prob_vector(p_u)
    w = channel_matrix(w)
    samples = pmi_samples(product_distribution([p_u] * n), channel_power(w, n))
    return [PmiSample(s.value / n, s.weight) for s in samples]


def resolvability_sim(p_u, w, n: int, rate: float, trials: int, seed: int) -> SimOutcome:
    """Mean of sum |P_V^n - (1/M) sum_j W^n(. | c_j)| over random codebooks of M = ceil(2^(n rate)).

    Trial t draws its codebook from the generator seeded by ``[seed, t]``.
    """
    p_u = prob_vector(p_u)
    w = channel_matrix(w)
    if p_u.size != w.shape[0]:
        raise ValueError("source and channel input alphabets differ")
    if trials < 1:
        raise ValueError("need at least one trial")
    m = color_count(n, rate)
    check_budget(m * w.shape[1] ** n, "codeword/output pairs")
    target = product_distribution([p_u @ w] * n)
    dists = np.empty(trials)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        book = rng.choice(p_u.size, size=(m, n), p=p_u)
        dists[t] = tv_distance(target, codebook_channel(book, w).mean(axis=0))
    est, half = mean_interval(dists)
    return SimOutcome(
        operation="resolvability_sim", estimate=est, exact=False, trials=trials, ci_halfwidth=half,
        seed=seed, params={"n": n, "rate": rate, "codewords": m, "p_u": p_u.tolist(), "w": w.tolist()},
        references={"min": float(dists.min()), "max": float(dists.max())})


# --- conditional version with side information and common randomness --------

def _block_tables(relay: RelayChannel, companion: CompanionChannel, code: RelayCode):
    """Exact joint pbar(x_m, y^n, z^n) with X^n uniform over the codebook, shape (M, Y^n, Z^n)."""
    n = code.n
    ny, nz = relay.w_y.shape[1], relay.w_z.shape[1]
    check_budget(code.size * (ny * nz) ** n, "codeword/output triples")
    block = codebook_channel(code.codebook, companion.joint) / code.size
    axes = [0] + list(range(1, 2 * n + 1, 2)) + list(range(2, 2 * n + 1, 2))
    return block.reshape((code.size,) + (ny, nz) * n).transpose(axes).reshape(code.size, ny ** n, nz ** n)


def conditional_block_pmi(relay: RelayChannel, companion: CompanionChannel,
                          code: RelayCode) -> list[PmiSample]:
    """Distribution of i(X^n; Z^n | Y^n) / n under the companion, X^n uniform over the codebook."""
    joint = _block_tables(relay, companion, code)
    p_xy = joint.sum(axis=2)
    p_yz = joint.sum(axis=0)
    p_y = p_xy.sum(axis=0)
    mask = joint > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = joint * p_y[None, :, None] / (p_xy[:, :, None] * p_yz[None, :, :])
    values = np.round(np.log2(ratio[mask]) / code.n, 12)
    uniq, inv = np.unique(values, return_inverse=True)
    weights = np.bincount(inv, weights=joint[mask])
    return [PmiSample(float(v), float(m)) for v, m in zip(uniq, weights)]


def csicr_sim(relay: RelayChannel, companion: CompanionChannel, code: RelayCode, r1: float,
              r2: float | None = None, trials: int = 100, seed: int = 0) -> SimOutcome:
    """Simulate pbar(z^n | x^n, y^n) from a rate-r1 message, common randomness and side information y^n.

    For every y^n a fresh codebook of 2^(n r1) x K sequences is drawn from pbar(z^n | y^n), where
    K = min(ceil(2^(n r2)), MAX_COMMON_RANDOMNESS) is the number of common-randomness values. The
    encoder sees (x^n, y^n, k) and picks message m with probability proportional to
    pbar(x^n | z_{m,k}, y^n); the decoder outputs z_{m,k}. The reported distance is the exact

        sum_{x,y,z} | pbar(x, y, z) - pbar(x, y) Q(z | x, y) |

    averaged over codebook draws (draw t uses the generator seeded by ``[seed, t]``).
    """
    if r1 < 0:
        raise ValueError("message rate must be nonnegative")
    r2 = r1 + 2.0 if r2 is None else r2
    if trials < 1:
        raise ValueError("need at least one trial")
    n = code.n
    joint = _block_tables(relay, companion, code)          # (M, Y^n, Z^n)
    p_xy = joint.sum(axis=2)
    p_yz = joint.sum(axis=0)
    p_y = p_xy.sum(axis=0)
    n_msg = color_count(n, r1)
    k_cr = min(color_count(n, r2), MAX_COMMON_RANDOMNESS)
    book = n_msg * k_cr
    check_budget(code.size * book * p_y.size, "encoder likelihoods", ENUMERATION_BUDGET)
    with np.errstate(divide="ignore", invalid="ignore"):
        z_given_y = np.where(p_y[:, None] > 0, p_yz / p_y[:, None], 0.0)
        # pbar(x | z, y) up to a factor that does not depend on the codeword
        x_given_zy = np.where(p_yz[None, :, :] > 0, joint / p_yz[None, :, :], 0.0)
    live = np.flatnonzero(p_y > 0)
    dists = np.empty(trials)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        simulated = np.zeros_like(joint)
        for y in live:
            z_book = rng.choice(z_given_y.shape[1], size=book, p=z_given_y[y] / z_given_y[y].sum())
            like = x_given_zy[:, y, z_book].reshape(code.size, k_cr, n_msg)
            norm = like.sum(axis=2, keepdims=True)
            # a (codeword, k) pair no candidate explains falls back to a uniform message
            choose = np.where(norm > 0, like / np.where(norm > 0, norm, 1.0), 1.0 / n_msg)
            weight = choose.reshape(code.size, book) / k_cr
            q = np.zeros((code.size, z_given_y.shape[1]))
            for xi in range(code.size):
                q[xi] = np.bincount(z_book, weights=weight[xi], minlength=q.shape[1])
            simulated[:, y, :] = p_xy[:, y, None] * q
        dists[t] = float(np.abs(joint - simulated).sum())
    est, half = mean_interval(dists)
    return SimOutcome(
        operation="csicr_sim", estimate=est, exact=False, trials=trials, ci_halfwidth=half, seed=seed,
        params={"n": n, "r1": r1, "r2": r2, "messages": n_msg, "common_randomness": k_cr,
                "codewords": code.size},
        references={"min": float(dists.min()), "max": float(dists.max())})
