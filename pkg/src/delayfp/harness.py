"""Seeded detection-rate experiments over attacked fingerprinted copies."""

from __future__ import annotations

import configparser
import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .assignment import SchemeParams
from .attacks import AttackSpec, collude_average
from .audio_io import read_wav, synth_signal
from .codebook import DEFAULT_EPSILON, Codebook, generate_codebook
from .detector import ThresholdPolicy, detect
from .embedder import SCHEMES, EmbedSpec, embed_stream

METRICS = ("exact-set", "any-colluder")
ATTACK_KINDS = ("crop", "shift", "none")
ROW_COLUMNS = ["copy_id", "scheme", "users", "attack_kind", "attack_amount", "traced_users", "correct"]


@dataclass(frozen=True)
class ExperimentConfig:
    # scheme geometry
    M: int = 16
    P: int = 4
    n: int = 1024
    delta_d: int = 20
    alpha: float = 0.05
    # codebook
    codebook_seed: int = 42
    epsilon_orth: float = DEFAULT_EPSILON
    # host audio: a WAV path, or seeded synthetic audio when empty
    input_path: str = ""
    synth_kind: str = "noise"
    synth_length: int = 262144
    synth_seed: int = 7
    # trials
    copies: int = 100
    crop_fraction: float = 0.5
    shift_fraction: float = 0.5
    none_fraction: float = 0.0
    amount_min: int = 1
    amount_max: int = 512
    colluders: int = 1
    user_selection: str = "random"
    schemes: tuple[str, ...] = SCHEMES
    metric: str = "exact-set"
    master_seed: int = 2024
    # detector policy
    kappa: float = 5.0
    floor_abs: float = 0.15
    tol: int = 2

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.copies < 1:
            raise ValueError("copies must be >= 1")
        fr = (self.crop_fraction, self.shift_fraction, self.none_fraction)
        if min(fr) < 0 or not np.isclose(sum(fr), 1.0):
            raise ValueError("attack fractions must be non-negative and sum to 1")
        if not 1 <= self.amount_min <= self.amount_max:
            raise ValueError("need 1 <= amount_min <= amount_max")
        if self.colluders < 1:
            raise ValueError("colluders must be >= 1")
        if self.colluders > self.M * self.P:
            raise ValueError("more colluders than users")
        if self.user_selection not in ("random", "cycle"):
            raise ValueError(f"unknown user selection {self.user_selection!r}")
        if not self.schemes or set(self.schemes) - set(SCHEMES):
            raise ValueError(f"schemes must be drawn from {SCHEMES}")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        self.params  # validates geometry

    @property
    def params(self) -> SchemeParams:
        return SchemeParams(self.M, self.P, self.n, self.delta_d, self.alpha)

    @property
    def policy(self) -> ThresholdPolicy:
        return ThresholdPolicy(self.kappa, self.floor_abs, self.tol)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schemes"] = list(self.schemes)
        return d

    @classmethod
    def from_mapping(cls, mapping) -> "ExperimentConfig":
        """Build from string-valued key/value pairs (config file or CLI)."""
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in mapping.items():
            key = key.replace("-", "_")
            if key not in types:
                raise KeyError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(types[key], raw)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise FileNotFoundError(path)
        if "experiment" not in parser:
            raise ValueError(f"{path}: missing [experiment] section")
        return cls.from_mapping(dict(parser["experiment"]))


def _coerce(type_name: str, raw):
    if not isinstance(raw, str):
        return raw
    if type_name == "int":
        return int(raw)
    if type_name == "float":
        return float(raw)
    if type_name.startswith("tuple"):
        return tuple(s.strip() for s in raw.replace(",", " ").split() if s.strip())
    return raw.strip()


@dataclass(frozen=True)
class CopyRecord:
    copy_id: int
    scheme: str
    users: tuple[int, ...]
    attack_kind: str
    attack_amount: int
    traced_users: tuple[int, ...]
    exact: bool
    any_colluder: bool
    correct: bool


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: list[CopyRecord]
    codebook_seed: int
    codebook_digest: str
    rates: dict[str, float] = field(init=False)
    alt_rates: dict[str, dict[str, float]] = field(init=False)

    def __post_init__(self):
        self.rates = {s: _rate(self.records, s, "correct") for s in self.config.schemes}
        self.alt_rates = {
            "exact-set": {s: _rate(self.records, s, "exact") for s in self.config.schemes},
            "any-colluder": {s: _rate(self.records, s, "any_colluder") for s in self.config.schemes},
        }

    def summary(self) -> dict:
        return {
            "rates": self.rates,
            "metric": self.config.metric,
            "rates_by_metric": self.alt_rates,
            "copies": self.config.copies,
            "codebook": {"seed": self.codebook_seed, "sha256": self.codebook_digest},
            "config": self.config.to_dict(),
        }


def _rate(records, scheme, attr) -> float:
    flags = [getattr(r, attr) for r in records if r.scheme == scheme]
    return sum(flags) / len(flags) if flags else 0.0


def load_host(config: ExperimentConfig) -> np.ndarray:
    if config.input_path:
        return read_wav(config.input_path).samples
    return synth_signal(config.synth_kind, config.synth_length, seed=config.synth_seed).samples


def build_codebook(config: ExperimentConfig) -> Codebook:
    return generate_codebook(config.M, config.n, config.codebook_seed, config.epsilon_orth)


def attack_kind_for(config: ExperimentConfig, copy_index: int) -> str:
    """Copies are partitioned in index order: cropped, then shifted, then clean."""
    c = config.copies
    b1 = round(config.crop_fraction * c)
    b2 = round((config.crop_fraction + config.shift_fraction) * c)
    if copy_index < b1:
        return "crop"
    if copy_index < b2:
        return "shift"
    return "none"


def copy_rng(config: ExperimentConfig, copy_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([config.master_seed, copy_index]))


def draw_users(config: ExperimentConfig, copy_index: int, rng: np.random.Generator) -> tuple[int, ...]:
    N, k = config.M * config.P, config.colluders
    if config.user_selection == "cycle":
        return tuple(sorted({(copy_index * k + m) % N for m in range(k)}))
    return tuple(sorted(int(u) for u in rng.choice(N, size=k, replace=False)))


def run_trial(config: ExperimentConfig, copy_index: int, scheme: str,
              host: np.ndarray | None = None, codebook: Codebook | None = None) -> CopyRecord:
    """Embed, collude, attack, and detect one copy.

    The user draw and the attack depend only on ``(master_seed, copy_index)``,
    so every scheme sees the same users and the same attack.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if host is None:
        host = load_host(config)
    if codebook is None:
        codebook = build_codebook(config)
    params = config.params

    rng = copy_rng(config, copy_index)
    users = draw_users(config, copy_index, rng)
    kind = attack_kind_for(config, copy_index)
    amount = int(rng.integers(config.amount_min, config.amount_max + 1))

    copies = [embed_stream(host, EmbedSpec(u, scheme, params, codebook)) for u in users]
    y = copies[0] if len(copies) == 1 else collude_average(copies)
    if kind == "none":
        amount = 0
    else:
        y = AttackSpec(kind, amount).apply(y)

    traced = tuple(detect(y, codebook, params, scheme, config.policy).traced_users)
    exact = set(traced) == set(users)
    anyc = bool(set(traced) & set(users))
    correct = exact if config.metric == "exact-set" else anyc
    return CopyRecord(copy_index, scheme, users, kind, amount, traced, exact, anyc, correct)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    host = load_host(config)
    codebook = build_codebook(config)
    records = [
        run_trial(config, i, scheme, host, codebook)
        for i in range(config.copies)
        for scheme in config.schemes
    ]
    return ExperimentReport(config, records, config.codebook_seed, codebook.digest())


def _users_cell(users) -> str:
    return " ".join(str(u) for u in users)


def rows_text(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_COLUMNS)
    for r in report.records:
        w.writerow([r.copy_id, r.scheme, _users_cell(r.users), r.attack_kind, r.attack_amount,
                    _users_cell(r.traced_users), int(r.correct)])
    return buf.getvalue()


def structured_text(report: ExperimentReport) -> str:
    return json.dumps(report.summary(), indent=1, sort_keys=True) + "\n"


def emit_report(report: ExperimentReport, path, fmt: str = "rows") -> Path:
    """Write per-copy rows (CSV) or the aggregate record (JSON) to ``path``."""
    if fmt == "rows":
        text = rows_text(report)
    elif fmt == "structured":
        text = structured_text(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    path = Path(path)
    path.write_text(text)
    return path
