"""Seeded, reproducible generation of random test matrices.

Every row derives its own generator from ``(seed, row_index)``, so rows can
be produced independently, in any order, or on different workers, and the
matrix is a pure function of its parameters. The derivation is
``numpy.random.SeedSequence([seed, row_index])`` feeding ``default_rng``;
it is stable across runs of one build but not guaranteed across library
major versions.
"""

from __future__ import annotations

import numpy as np

from .core import InputError, TestMatrix, _require_int

__all__ = ["row_generator", "rid_row", "rrsd_row", "gen_rid", "gen_rrsd"]


def row_generator(seed: int, row_index: int) -> np.random.Generator:
    """Generator for one row, derived from (seed, row_index)."""
    seed = _require_int(seed, "seed", 0)
    row_index = _require_int(row_index, "row_index", 0)
    return np.random.default_rng(np.random.SeedSequence([seed, row_index]))


def rid_row(seed: int, row_index: int, n: int, zero_prob: float) -> np.ndarray:
    """One independent-cell row as a boolean vector; P[cell is 0] = zero_prob."""
    rng = row_generator(seed, row_index)
    return rng.random(n) >= zero_prob


def rrsd_row(seed: int, row_index: int, n: int, row_weight: int) -> np.ndarray:
    """One uniform constant-weight row as a boolean vector."""
    rng = row_generator(seed, row_index)
    row = np.zeros(n, dtype=bool)
    row[rng.choice(n, size=row_weight, replace=False)] = True
    return row


def _check_common(m: int, n: int, seed: int) -> tuple[int, int, int]:
    return _require_int(m, "m", 1), _require_int(n, "n", 1), _require_int(seed, "seed", 0)


def gen_rid(m: int, n: int, zero_prob: float, seed: int) -> TestMatrix:
    """m x n matrix with i.i.d. cells, zero with probability ``zero_prob``."""
    m, n, seed = _check_common(m, n, seed)
    if isinstance(zero_prob, bool) or not isinstance(zero_prob, (int, float)):
        raise InputError(f"zero_prob must be a real number, got {zero_prob!r}")
    if not 0.0 < float(zero_prob) < 1.0:
        raise InputError(f"zero_prob must lie strictly inside (0, 1), got {zero_prob}")
    bits = np.empty((m, (n + 7) // 8), dtype=np.uint8)
    for j in range(m):
        bits[j] = np.packbits(rid_row(seed, j, n, float(zero_prob)))
    return TestMatrix(m=m, n=n, bits=bits, model_tag="RID", seed=seed)


def gen_rrsd(m: int, n: int, row_weight: int, seed: int) -> TestMatrix:
    """m x n matrix whose rows are independent uniform ``row_weight``-subsets."""
    m, n, seed = _check_common(m, n, seed)
    row_weight = _require_int(row_weight, "row_weight", 1, n)
    bits = np.empty((m, (n + 7) // 8), dtype=np.uint8)
    for j in range(m):
        bits[j] = np.packbits(rrsd_row(seed, j, n, row_weight))
    return TestMatrix(m=m, n=n, bits=bits, model_tag="RrSD", seed=seed)
