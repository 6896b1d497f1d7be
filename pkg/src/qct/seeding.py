"""Deterministic random streams.

A 64-bit master seed fans out into independent per-trial streams through a
counter-based generator: trial i uses Philox keyed by the master seed with
the highest counter word set to i. Any trial is therefore reproducible in
isolation from (seed, trial_index) alone, and results do not depend on how
trials are batched or ordered.
"""

from __future__ import annotations

import numpy as np

__all__ = ["session_rng", "trial_rng"]

_MASK64 = (1 << 64) - 1


def session_rng(seed: int) -> np.random.Generator:
    """Stream for a single session / one-shot command."""
    return np.random.default_rng(seed & _MASK64)


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent stream for trial `trial_index` under `seed`."""
    return np.random.Generator(
        np.random.Philox(key=seed & _MASK64, counter=[0, 0, 0, trial_index])
    )
