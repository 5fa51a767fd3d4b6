"""Fold-and-correlate detection and user tracing.

The stream is folded into one ``n``-sample accumulator (the watermark repeats
every frame, the host does not), then correlated against every code at every
cyclic lag. With the embedder's placement the peak lag equals the embedding
delay.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .assignment import DEFAULT_TOL, SchemeParams, delay_to_index, params_to_user
from .codebook import Codebook, cyclic_crosscorr

SYNC = "sync"


class SignalTooShort(ValueError):
    pass


@dataclass(frozen=True)
class ThresholdPolicy:
    """Peak acceptance: ``score >= max(kappa * median|values|, floor_abs)``.

    ``tol`` is both the exclusion half-width around accepted peaks and the
    grid tolerance used when mapping a delay to a delay index.
    """

    kappa: float = 5.0
    floor_abs: float = 0.15
    tol: int = DEFAULT_TOL

    def threshold(self, values: np.ndarray) -> float:
        return max(self.kappa * float(np.median(np.abs(values))), self.floor_abs)


@dataclass(frozen=True)
class CorrelationProfile:
    code_id: int | str
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DetectionHit:
    group_id: int
    detected_delay: int
    score: float
    corrected_delay: int
    delay_index: int | None
    user: int | None


@dataclass
class TraceReport:
    scheme: str
    hits: list[DetectionHit]
    sync_delay: int | None = None
    sync_missing: bool = False

    @property
    def traced_users(self) -> list[int]:
        return sorted({h.user for h in self.hits if h.user is not None})

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "sync_delay": self.sync_delay,
            "sync_missing": self.sync_missing,
            "traced_users": self.traced_users,
            "hits": [asdict(h) for h in self.hits],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def rows(self) -> list[str]:
        """One comma-separated line per hit, header first."""
        out = ["code_id,detected_delay,corrected_delay,score,traced_user"]
        for h in self.hits:
            user = "" if h.user is None else str(h.user)
            out.append(f"{h.group_id},{h.detected_delay},{h.corrected_delay},{h.score:.6f},{user}")
        return out


def fold_frames(y, n: int) -> np.ndarray:
    """Sum all complete ``n``-sample frames; the trailing partial frame is dropped."""
    y = np.asarray(y, dtype=float)
    if len(y) < n:
        raise SignalTooShort(f"signal of {len(y)} samples is shorter than one frame ({n})")
    return y[: (len(y) // n) * n].reshape(-1, n).sum(axis=0)


def correlate_all_lags(accumulator, code) -> CorrelationProfile:
    """``values[d] = sum_p A[p] * c[(p - d) % n] / (|A| |c|)``."""
    a = np.asarray(accumulator, dtype=float)
    c = np.asarray(getattr(code, "samples", code), dtype=float)
    if a.shape != c.shape:
        raise ValueError("accumulator and code lengths differ")
    na, nc = np.linalg.norm(a), np.linalg.norm(c)
    if na == 0:
        raise ValueError("zero-norm accumulator")
    code_id = getattr(code, "group_id", SYNC if hasattr(code, "base_delay") else -1)
    return CorrelationProfile(code_id, cyclic_crosscorr(c, a) / (na * nc))


def _profile_matrix(acc: np.ndarray, codes: np.ndarray) -> np.ndarray:
    # batched correlate_all_lags over the rows of ``codes``
    n = len(acc)
    spec = np.fft.rfft(acc)[None, :] * np.conj(np.fft.rfft(codes, axis=1))
    raw = np.fft.irfft(spec, n=n, axis=1)
    return raw / (np.linalg.norm(acc) * np.linalg.norm(codes, axis=1))[:, None]


def find_peaks(profile, policy: ThresholdPolicy = ThresholdPolicy()) -> list[tuple[int, float]]:
    """Greedy peak picking in descending score with a cyclic exclusion window."""
    values = np.asarray(getattr(profile, "values", profile), dtype=float)
    n = len(values)
    thr = policy.threshold(values)
    cand = np.flatnonzero(values >= thr)
    cand = cand[np.argsort(-values[cand], kind="stable")]
    peaks: list[tuple[int, float]] = []
    for lag in cand:
        lag = int(lag)
        if any(min((lag - p) % n, (p - lag) % n) <= policy.tol for p, _ in peaks):
            continue
        peaks.append((lag, float(values[lag])))
    return peaks


def correct_delay(detected: int, sync_detected: int, sync_base: int, n: int) -> int:
    """Undo a global desynchronization offset measured on the sync code."""
    return (detected - (sync_detected - sync_base)) % n


def _fingerprint_hits(acc, codebook, params, policy, sync_delay=None) -> list[DetectionHit]:
    base = codebook.sync.base_delay
    hits = []
    for code, values in zip(codebook.codes, _profile_matrix(acc, codebook.code_matrix())):
        for lag, score in find_peaks(values, policy):
            corrected = lag if sync_delay is None else correct_delay(lag, sync_delay, base, params.n)
            j = delay_to_index(corrected, params, policy.tol)
            user = None if j is None else params_to_user(code.group_id, j, params)
            hits.append(DetectionHit(code.group_id, lag, score, corrected, j, user))
    return hits


def _check(codebook: Codebook, params: SchemeParams):
    if codebook.n != params.n or codebook.M != params.M:
        raise ValueError("codebook shape does not match scheme params")


def detect_original(y, codebook: Codebook, params: SchemeParams,
                    policy: ThresholdPolicy = ThresholdPolicy()) -> TraceReport:
    """Trace users straight from the detected delays (``t = i * P + j``)."""
    _check(codebook, params)
    if len(y) < params.n:
        return TraceReport("original", [])
    acc = fold_frames(y, params.n)
    if not np.any(acc):
        return TraceReport("original", [])
    return TraceReport("original", _fingerprint_hits(acc, codebook, params, policy))


def detect_improved(y, codebook: Codebook, params: SchemeParams,
                    policy: ThresholdPolicy = ThresholdPolicy()) -> TraceReport:
    """Locate the sync code first and undo its displacement on every hit.

    The corrected delay is ``d' - (d_sync' - d_sync)`` modulo ``n``. Without a
    sync peak the offset falls back to zero and the report is flagged.
    """
    _check(codebook, params)
    if len(y) < params.n:
        return TraceReport("improved", [], sync_missing=True)
    acc = fold_frames(y, params.n)
    if not np.any(acc):
        return TraceReport("improved", [], sync_missing=True)
    sync_values = _profile_matrix(acc, codebook.sync.samples[None, :])[0]
    best = int(np.argmax(sync_values))
    sync_delay = best if sync_values[best] >= policy.threshold(sync_values) else None
    hits = _fingerprint_hits(acc, codebook, params, policy, sync_delay)
    return TraceReport("improved", hits, sync_delay=sync_delay, sync_missing=sync_delay is None)


def detect(y, codebook: Codebook, params: SchemeParams, scheme: str = "improved",
           policy: ThresholdPolicy = ThresholdPolicy()) -> TraceReport:
    if scheme == "original":
        return detect_original(y, codebook, params, policy)
    if scheme == "improved":
        return detect_improved(y, codebook, params, policy)
    raise ValueError(f"unknown scheme {scheme!r}")
