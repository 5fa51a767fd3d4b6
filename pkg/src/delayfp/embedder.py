"""Delayed additive fingerprint embedding, frame by frame.

Within each ``n``-sample frame the group code is placed with a cyclic delay
``d``: sample ``p`` receives ``alpha * |x[p]| * w[(p - d) % n]``. The improved
scheme adds the shared sync code the same way at its fixed delay.
Nothing is clamped here; clamping happens when writing 16-bit PCM.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .assignment import SchemeParams, user_to_params
from .codebook import Codebook

Scheme = Literal["original", "improved"]
SCHEMES = ("original", "improved")


@dataclass(frozen=True)
class EmbedSpec:
    user_id: int
    scheme: Scheme
    params: SchemeParams
    codebook: Codebook

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0 <= self.user_id < self.params.N:
            raise ValueError(f"user id {self.user_id} outside [0, {self.params.N})")
        if self.codebook.n != self.params.n or self.codebook.M != self.params.M:
            raise ValueError("codebook shape does not match scheme params")


def delayed(code, d: int) -> np.ndarray:
    """Cyclically delay ``code`` by ``d`` samples: ``out[p] = code[(p - d) % n]``."""
    return np.roll(np.asarray(code, dtype=float), d)


def _check_frame(x, code, d):
    x = np.asarray(x, dtype=float)
    code = np.asarray(code, dtype=float)
    if x.shape != code.shape or x.ndim != 1:
        raise ValueError("frame and code must be 1-D with equal length")
    if not 0 <= d < len(code):
        raise ValueError(f"delay {d} outside [0, {len(code)})")
    return x, code


def _perturb(x: np.ndarray, pattern: np.ndarray, alpha: float) -> np.ndarray:
    """``x + alpha * |x| * pattern`` with ``|y - x|`` never above the exact term.

    ``y - x`` is exact here (y and x are within a factor of 2), so a rounding
    overshoot is detectable and is undone by one ulp toward ``x``.
    """
    term = alpha * np.abs(x) * pattern
    y = x + term
    over = np.abs(y - x) > np.abs(term)
    if over.any():
        y[over] = np.nextafter(y[over], x[over])
    return y


def embed_frame_original(x, code, d: int, alpha: float) -> np.ndarray:
    x, code = _check_frame(x, getattr(code, "samples", code), d)
    return _perturb(x, delayed(code, d), alpha)


def embed_frame_improved(x, code, d: int, sync, alpha: float) -> np.ndarray:
    x, code = _check_frame(x, getattr(code, "samples", code), d)
    s, _ = _check_frame(sync.samples, sync.samples, sync.base_delay)
    if len(s) != len(x):
        raise ValueError("sync code length must equal frame length")
    return _perturb(x, delayed(code, d) + delayed(s, sync.base_delay), alpha)


def watermark_pattern(spec: EmbedSpec) -> np.ndarray:
    """Per-frame bipolar pattern (code sum) that multiplies ``alpha * |x|``."""
    a = user_to_params(spec.user_id, spec.params)
    pattern = delayed(spec.codebook.codes[a.group_id].samples, a.delay)
    if spec.scheme == "improved":
        sync = spec.codebook.sync
        pattern = pattern + delayed(sync.samples, sync.base_delay)
    return pattern


def embed_stream(x, spec: EmbedSpec) -> np.ndarray:
    """Embed every complete frame; a trailing partial frame passes through."""
    x = np.asarray(x, dtype=float)
    n = spec.params.n
    if x.ndim != 1:
        raise ValueError("signal must be 1-D")
    if len(x) < n:
        raise ValueError(f"signal of {len(x)} samples is shorter than one frame ({n})")
    n_full = (len(x) // n) * n
    y = x.copy()
    frames = x[:n_full].reshape(-1, n)
    y[:n_full] = _perturb(frames, watermark_pattern(spec)[None, :], spec.params.alpha).ravel()
    return y


def snr_db(original, marked) -> float:
    """Signal-to-watermark ratio in dB."""
    original = np.asarray(original, dtype=float)
    noise = np.asarray(marked, dtype=float) - original
    return float(10 * np.log10(np.sum(original**2) / np.sum(noise**2)))
