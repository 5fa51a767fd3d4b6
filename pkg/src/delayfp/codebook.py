"""Pseudo-noise fingerprint and synchronization codes.

Codes are seeded uniform bipolar draws, kept only when their normalized
cyclic cross-correlation against every previously accepted code stays
below ``epsilon_orth`` at *every* lag.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1
MAX_ATTEMPTS = 1000
DEFAULT_EPSILON = 0.2


class CodebookInfeasible(RuntimeError):
    """Rejection sampling ran out of attempts."""


@dataclass(frozen=True)
class FingerprintCode:
    group_id: int
    samples: np.ndarray = field(repr=False)
    seed: int

    @property
    def n(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class SyncCode:
    samples: np.ndarray = field(repr=False)
    base_delay: int
    seed: int

    @property
    def n(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class Codebook:
    codes: tuple[FingerprintCode, ...]
    sync: SyncCode
    n: int
    epsilon_orth: float
    seed: int | None = None

    @property
    def M(self) -> int:
        return len(self.codes)

    def code_matrix(self) -> np.ndarray:
        """All group codes stacked as an ``(M, n)`` array."""
        return np.stack([c.samples for c in self.codes])

    def digest(self) -> str:
        """SHA-256 over the raw code signs and the sync delay."""
        h = hashlib.sha256()
        for c in self.codes:
            h.update(_signs_to_str(c.samples).encode())
        h.update(_signs_to_str(self.sync.samples).encode())
        h.update(str(self.sync.base_delay).encode())
        return h.hexdigest()

    # serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": "delayfp-codebook",
            "version": FORMAT_VERSION,
            "n": self.n,
            "M": self.M,
            "epsilon_orth": self.epsilon_orth,
            "seed": self.seed,
            "codes": [
                {"group_id": c.group_id, "seed": c.seed, "signs": _signs_to_str(c.samples)}
                for c in self.codes
            ],
            "sync": {
                "seed": self.sync.seed,
                "base_delay": self.sync.base_delay,
                "signs": _signs_to_str(self.sync.samples),
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Codebook":
        if d.get("format") != "delayfp-codebook":
            raise ValueError("not a codebook record")
        if d.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported codebook version {d.get('version')!r}")
        n = int(d["n"])
        codes = tuple(
            FingerprintCode(int(c["group_id"]), _str_to_signs(c["signs"], n), int(c["seed"]))
            for c in d["codes"]
        )
        if len(codes) != int(d["M"]):
            raise ValueError("code count does not match M")
        s = d["sync"]
        sync = SyncCode(_str_to_signs(s["signs"], n), int(s["base_delay"]), int(s["seed"]))
        seed = d.get("seed")
        return cls(codes, sync, n, float(d["epsilon_orth"]), None if seed is None else int(seed))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "Codebook":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _signs_to_str(samples: np.ndarray) -> str:
    return "".join("+" if v > 0 else "-" for v in samples)


def _str_to_signs(text: str, n: int) -> np.ndarray:
    if len(text) != n or set(text) - {"+", "-"}:
        raise ValueError("corrupt sign string in codebook")
    return np.where(np.frombuffer(text.encode(), dtype=np.uint8) == ord("+"), 1.0, -1.0)


def cyclic_crosscorr(a, b) -> np.ndarray:
    """Raw cyclic cross-correlation ``r[d] = sum_k a[k] * b[(k + d) % n]``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.fft.irfft(np.conj(np.fft.rfft(a)) * np.fft.rfft(b), n=len(a))


def max_cyclic_crosscorr(a, b) -> float:
    """Largest normalized cyclic cross-correlation magnitude over all lags.

    Returns a value in ``[0, 1]``; 1 means ``b`` is a (possibly negated)
    cyclic shift of ``a``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or a.shape != b.shape or len(a) == 0:
        raise ValueError("sequences must be 1-D with equal, non-zero length")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("zero-norm sequence")
    peak = float(np.max(np.abs(cyclic_crosscorr(a, b)))) / (na * nb)
    return min(peak, 1.0)


def _draw_code(seed: int, n: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.choice(np.array([-1.0, 1.0]), size=n)


def _draw_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63, dtype=np.int64))


def _accept(candidate: np.ndarray, accepted: list[np.ndarray], eps: float) -> bool:
    return all(max_cyclic_crosscorr(candidate, other) <= eps for other in accepted)


def generate_sync_code(codebook_codes, n: int, seed: int, epsilon_orth: float,
                       rng_for_delay: np.random.Generator) -> SyncCode:
    """Draw a sync code quasi-orthogonal to every fingerprint code.

    ``base_delay`` comes from ``rng_for_delay`` (uniform over ``[0, n)``);
    candidate signs come from seeds drawn off ``seed``.
    """
    others = [np.asarray(c.samples, dtype=float) for c in codebook_codes]
    if any(len(o) != n for o in others):
        raise ValueError("all codes must have length n")
    seeds = np.random.default_rng(seed)
    for _ in range(MAX_ATTEMPTS):
        s = _draw_seed(seeds)
        cand = _draw_code(s, n)
        if _accept(cand, others, epsilon_orth):
            delay = int(rng_for_delay.integers(0, n))
            return SyncCode(cand, delay, s)
    raise CodebookInfeasible(
        f"sync infeasible: no candidate within eps={epsilon_orth} after {MAX_ATTEMPTS} attempts")


def generate_codebook(M: int, n: int, seed: int, epsilon_orth: float = DEFAULT_EPSILON) -> Codebook:
    """Generate ``M`` group codes plus one sync code, deterministic in ``seed``."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0 < epsilon_orth <= 1:
        raise ValueError("epsilon_orth must lie in (0, 1]")

    code_ss, sync_ss, delay_ss = np.random.SeedSequence(seed).spawn(3)
    seeds = np.random.default_rng(code_ss)
    accepted: list[np.ndarray] = []
    codes: list[FingerprintCode] = []
    for i in range(M):
        for _ in range(MAX_ATTEMPTS):
            s = _draw_seed(seeds)
            cand = _draw_code(s, n)
            if _accept(cand, accepted, epsilon_orth):
                break
        else:
            raise CodebookInfeasible(
                f"codebook infeasible: code {i} exceeded {MAX_ATTEMPTS} attempts "
                f"(M={M}, n={n}, eps={epsilon_orth})")
        accepted.append(cand)
        codes.append(FingerprintCode(i, cand, s))

    sync_seed = int(sync_ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
    sync = generate_sync_code(codes, n, sync_seed, epsilon_orth, np.random.default_rng(delay_ss))
    return Codebook(tuple(codes), sync, n, float(epsilon_orth), seed)
