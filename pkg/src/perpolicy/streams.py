"""Deterministic counter-based random streams.

Every uniform draw is a pure function of (seed, task_index, draw_index), so a
task's stream can be replayed in isolation or generated in vectorized blocks,
and its values never depend on how many samples earlier tasks consumed.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TRIAL_SALT = 0xA5A5A5A5A5A5A5A5
_INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective scramble of a 64-bit word."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def task_key(seed: int, task_index: int) -> int:
    """Substream key for one task."""
    return mix64(mix64(seed) ^ ((task_index + 1) * _GOLDEN & _MASK))


def uniform_at(key: int, draw_index: int) -> float:
    """The draw_index-th uniform of a substream, in [0, 1)."""
    return (mix64((key + (draw_index + 1) * _GOLDEN) & _MASK) >> 11) * _INV_2_53


def substream_seed(seed: int, label: int) -> int:
    """Derive an independent 64-bit seed, e.g. one per trial."""
    return mix64(mix64(seed) ^ mix64((label ^ _TRIAL_SALT) & _MASK))


class TaskStream:
    """Sequential scalar view over one task's uniforms."""

    __slots__ = ("key", "cursor")

    def __init__(self, key: int):
        self.key = key
        self.cursor = 0

    def next(self) -> float:
        u = uniform_at(self.key, self.cursor)
        self.cursor += 1
        return u


def _mix64_array(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = z ^ (z >> np.uint64(30))
        z = z * np.uint64(0xBF58476D1CE4E5B9)
        z = z ^ (z >> np.uint64(27))
        z = z * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def uniform_block(seed: int, task_indices: np.ndarray, first_draw: int, n_draws: int) -> np.ndarray:
    """Uniforms for many tasks at once, identical to the scalar stream.

    Returns an array of shape (len(task_indices), n_draws) whose (i, j) entry
    equals uniform_at(task_key(seed, task_indices[i]), first_draw + j).
    """
    idx = np.asarray(task_indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        keys = _mix64_array(
            np.uint64(mix64(seed)) ^ ((idx + np.uint64(1)) * np.uint64(_GOLDEN))
        )
        offsets = (
            np.arange(first_draw + 1, first_draw + n_draws + 1, dtype=np.uint64)
            * np.uint64(_GOLDEN)
        )
        z = _mix64_array(keys[:, None] + offsets[None, :])
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53
