"""Mono 16-bit PCM WAV I/O and synthetic test signals."""

from __future__ import annotations

import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCALE = 32768.0
DEFAULT_RATE = 44100


class AudioFormatError(ValueError):
    """Base class for WAV files we refuse to read."""


class MalformedWavError(AudioFormatError):
    pass


class UnsupportedWavError(AudioFormatError):
    pass


@dataclass
class Signal:
    samples: np.ndarray
    sample_rate: int = DEFAULT_RATE

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1:
            raise ValueError("signal must be 1-D")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("signal contains NaN or infinite samples")

    def __len__(self):
        return len(self.samples)


def to_pcm16(samples) -> np.ndarray:
    """Clamp to [-1, 1 - 2**-15], scale, and round half away from zero."""
    v = np.clip(np.asarray(samples, dtype=float), -1.0, 1.0 - 1.0 / SCALE) * SCALE
    return (np.sign(v) * np.floor(np.abs(v) + 0.5)).astype(np.int16)


def from_pcm16(ints) -> np.ndarray:
    return np.asarray(ints, dtype=np.int16).astype(float) / SCALE


def read_wav(path, mixdown: bool = False) -> Signal:
    """Read a 16-bit PCM WAV file.

    Multichannel input is rejected unless ``mixdown`` is set, in which case
    channels are averaged.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    try:
        with wave.open(str(path), "rb") as w:
            channels, width, rate = w.getnchannels(), w.getsampwidth(), w.getframerate()
            raw = w.readframes(w.getnframes())
    except wave.Error as e:
        if "unknown format" in str(e):
            raise UnsupportedWavError(f"{path}: non-PCM encoding ({e})") from e
        raise MalformedWavError(f"{path}: {e}") from e
    except EOFError as e:
        raise MalformedWavError(f"{path}: truncated header") from e
    if width != 2:
        raise UnsupportedWavError(f"{path}: {8 * width}-bit samples, only 16-bit supported")
    data = np.frombuffer(raw, dtype="<i2")
    if len(data) % channels:
        raise MalformedWavError(f"{path}: data length not a multiple of frame size")
    data = from_pcm16(data).reshape(-1, channels)
    if channels > 1:
        if not mixdown:
            raise UnsupportedWavError(f"{path}: {channels} channels, only mono supported")
        return Signal(data.mean(axis=1), rate)
    return Signal(data[:, 0], rate)


def write_wav(signal, path, sample_rate: int | None = None) -> None:
    """Write mono 16-bit PCM; out-of-range values are clamped, never rejected."""
    if isinstance(signal, Signal):
        samples, rate = signal.samples, signal.sample_rate
    else:
        samples, rate = signal, DEFAULT_RATE
    if sample_rate is not None:
        rate = sample_rate
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(rate))
        w.writeframes(to_pcm16(samples).astype("<i2").tobytes())


def synth_signal(kind: str, length: int, sample_rate: int = DEFAULT_RATE, seed: int = 0) -> Signal:
    """Deterministic synthetic host audio with peak amplitude <= 0.5."""
    if length < 1:
        raise ValueError("length must be >= 1")
    t = np.arange(length) / sample_rate
    if kind == "noise":
        x = np.random.default_rng(seed).uniform(-0.5, 0.5, length)
    elif kind == "tone":
        x = 0.5 * np.sin(2 * np.pi * 440.0 * t)
    elif kind == "chirp":
        # linear sweep 100 Hz -> 8 kHz over the signal
        f0, f1, dur = 100.0, 8000.0, max(t[-1], 1.0 / sample_rate)
        x = 0.5 * np.sin(2 * np.pi * (f0 * t + (f1 - f0) * t**2 / (2 * dur)))
    else:
        raise ValueError(f"unknown synth kind {kind!r}")
    return Signal(x, sample_rate)
