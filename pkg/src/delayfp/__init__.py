"""Delay-based audio fingerprinting, desynchronization attacks, and sync-code repair."""

from .assignment import SchemeParams, UserAssignment, delay_to_index, params_to_user, user_to_params
from .attacks import AttackSpec, collude_average, collude_minmax, crop, time_shift
from .audio_io import Signal, read_wav, synth_signal, write_wav
from .codebook import (Codebook, CodebookInfeasible, FingerprintCode, SyncCode,
                       generate_codebook, generate_sync_code, max_cyclic_crosscorr)
from .detector import (CorrelationProfile, DetectionHit, ThresholdPolicy, TraceReport,
                       correlate_all_lags, detect, detect_improved, detect_original,
                       find_peaks, fold_frames)
from .embedder import EmbedSpec, embed_frame_improved, embed_frame_original, embed_stream
from .estimator import DelayFingerprinter
from .harness import ExperimentConfig, ExperimentReport, emit_report, run_experiment, run_trial

__version__ = "0.1.0"
