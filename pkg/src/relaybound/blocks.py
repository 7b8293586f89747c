"""Blocklength-n helpers: sequence indexing and memoryless product channels.

Sequences over an alphabet of size q are integer arrays of shape (..., n); their flat
index is big-endian, i.e. ``sum_i s[i] * q**(n-1-i)``.
"""
from __future__ import annotations

import numpy as np

ENUMERATION_BUDGET = 10**7


class EnumerationBudgetError(RuntimeError):
    """Exact enumeration would exceed the outcome budget; use a Monte Carlo mode instead."""


def check_budget(count: int, what: str = "outcomes", budget: int = ENUMERATION_BUDGET) -> None:
    if count > budget:
        raise EnumerationBudgetError(
            f"exact enumeration of {count} {what} exceeds the budget of {budget}; "
            "switch to Monte Carlo mode or reduce the blocklength")


def all_sequences(q: int, n: int) -> np.ndarray:
    """Every sequence in lexicographic (= index) order, shape (q**n, n)."""
    check_budget(q**n, "sequences")
    return index_to_seq(np.arange(q**n), q, n)


def seq_to_index(seqs, q: int) -> np.ndarray:
    seqs = np.asarray(seqs, dtype=np.int64)
    n = seqs.shape[-1]
    weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return seqs @ weights


def index_to_seq(idx, q: int, n: int) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[..., None] // weights) % q


def hamming_distances(q: int, n: int) -> np.ndarray:
    """All pairwise Hamming distances on the q-ary n-cube, shape (q**n, q**n)."""
    check_budget(q ** (2 * n), "sequence pairs")
    seqs = all_sequences(q, n)
    return (seqs[:, None, :] != seqs[None, :, :]).sum(axis=2)


def product_distribution(per_coordinate) -> np.ndarray:
    """Probability of every sequence under independent coordinates (index order)."""
    out = np.ones(1)
    for p in per_coordinate:
        out = np.outer(out, p).ravel()
    return out


def channel_power(w: np.ndarray, n: int) -> np.ndarray:
    """n-fold memoryless extension of ``w``, shape (|X|**n, |Y|**n)."""
    check_budget(w.shape[0] ** n * w.shape[1] ** n, "block transitions")
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, w)
    return out


def codebook_channel(codebook, w: np.ndarray) -> np.ndarray:
    """Output distribution over Y^n for each codeword row, shape (M, |Y|**n)."""
    codebook = np.asarray(codebook, dtype=np.int64)
    m, n = codebook.shape
    check_budget(m * w.shape[1] ** n, "codeword/output pairs")
    out = np.ones((m, 1))
    for i in range(n):
        out = (out[:, :, None] * w[codebook[:, i]][:, None, :]).reshape(m, -1)
    return out
