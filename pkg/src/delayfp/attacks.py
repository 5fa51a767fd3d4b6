"""Collusion and desynchronization attacks on fingerprinted copies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

AMOUNT_RANGE = (1, 512)


def _stack(copies) -> np.ndarray:
    copies = [np.asarray(c, dtype=float) for c in copies]
    if len(copies) < 2:
        raise ValueError("collusion needs at least two copies")
    if len({c.shape for c in copies}) != 1 or copies[0].ndim != 1:
        raise ValueError("colluding copies must be 1-D and equally long")
    return np.stack(copies)


def collude_average(copies) -> np.ndarray:
    return _stack(copies).mean(axis=0)


def collude_minmax(copies, mode: str = "minmax-midpoint") -> np.ndarray:
    s = _stack(copies)
    if mode == "min":
        return s.min(axis=0)
    if mode == "max":
        return s.max(axis=0)
    if mode == "minmax-midpoint":
        return (s.min(axis=0) + s.max(axis=0)) / 2
    raise ValueError(f"unknown min-max mode {mode!r}")


def crop(y, amount: int, position: int = 0) -> np.ndarray:
    """Cut ``amount`` samples starting at ``position``."""
    y = np.asarray(y, dtype=float)
    if amount < 1 or position < 0 or position + amount > len(y):
        raise ValueError(f"crop block [{position}, {position + amount}) outside signal of {len(y)}")
    return np.concatenate([y[:position], y[position + amount:]])


def time_shift(y, amount: int, position: int = 0) -> np.ndarray:
    """Insert ``amount`` samples of silence at ``position``."""
    y = np.asarray(y, dtype=float)
    if amount < 1:
        raise ValueError("shift amount must be >= 1")
    if not 0 <= position <= len(y):
        raise ValueError(f"shift offset {position} outside [0, {len(y)}]")
    return np.concatenate([y[:position], np.zeros(amount), y[position:]])


@dataclass(frozen=True)
class AttackSpec:
    kind: Literal["crop", "shift"]
    amount: int
    position: int = 0

    def __post_init__(self):
        if self.kind not in ("crop", "shift"):
            raise ValueError(f"unknown attack kind {self.kind!r}")
        if self.amount < 1:
            raise ValueError("attack amount must be >= 1")

    def apply(self, y) -> np.ndarray:
        if self.kind == "crop":
            return crop(y, self.amount, self.position)
        return time_shift(y, self.amount, self.position)

    @classmethod
    def random(cls, kind, rng: np.random.Generator, amount_range=AMOUNT_RANGE, position: int = 0):
        lo, hi = amount_range
        return cls(kind, int(rng.integers(lo, hi + 1)), position)
