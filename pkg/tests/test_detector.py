import json

import numpy as np
import pytest

from delayfp.attacks import collude_average, crop, time_shift
from delayfp.detector import (CorrelationProfile, SignalTooShort, ThresholdPolicy, correct_delay,
                              correlate_all_lags, detect_improved, detect_original, find_peaks,
                              fold_frames)
from delayfp.embedder import EmbedSpec, embed_stream


def test_fold_definition():
    frame = np.arange(8.0)
    assert np.array_equal(fold_frames(np.tile(frame, 2), 8), 2 * frame)
    assert np.array_equal(fold_frames(frame, 8), frame)
    assert np.array_equal(fold_frames(np.concatenate([frame, frame[:3]]), 8), frame)
    with pytest.raises(SignalTooShort):
        fold_frames(frame[:7], 8)


def test_folding_improves_peak(params, codebook, host):
    y = embed_stream(host[:10 * 1024], EmbedSpec(11, "original", params, codebook))
    code = codebook.codes[2]
    one = correlate_all_lags(fold_frames(y[:1024], 1024), code).values
    ten = correlate_all_lags(fold_frames(y, 1024), code).values
    assert ten[60] > one[60]
    assert int(np.argmax(ten)) == 60


def _brute_profile(acc, code):
    n = len(acc)
    raw = np.array([sum(acc[p] * code[(p - d) % n] for p in range(n)) for d in range(n)])
    return raw / (np.sqrt(sum(a * a for a in acc)) * np.sqrt(sum(c * c for c in code)))


def test_correlate_self_and_shift():
    code = np.random.default_rng(3).choice([-1.0, 1.0], 64)
    assert correlate_all_lags(code, code).values[0] == pytest.approx(1.0)
    shifted = np.roll(code, 37)
    values = correlate_all_lags(shifted, code).values
    brute = _brute_profile(shifted, code)
    assert int(np.argmax(brute)) == 37
    assert int(np.argmax(values)) == 37
    assert values == pytest.approx(brute, abs=1e-12)


def test_correlate_errors():
    with pytest.raises(ValueError):
        correlate_all_lags(np.zeros(8), np.ones(8))
    with pytest.raises(ValueError):
        correlate_all_lags(np.ones(8), np.ones(9))


def test_correlate_labels(codebook):
    acc = np.random.default_rng(0).normal(size=1024)
    assert correlate_all_lags(acc, codebook.codes[4]).code_id == 4
    assert correlate_all_lags(acc, codebook.sync).code_id == "sync"


def test_noise_profile_stays_below_threshold(codebook):
    code = codebook.codes[0].samples
    policy = ThresholdPolicy()
    worst = 0.0
    for seed in range(20):
        acc = np.random.default_rng(seed).normal(size=1024)
        values = correlate_all_lags(acc, code).values
        worst = max(worst, np.max(np.abs(values)))
        assert find_peaks(values, policy) == []
    assert worst < policy.floor_abs


def test_find_peaks_simple():
    v = np.zeros(64)
    v[5] = 1.0
    assert find_peaks(CorrelationProfile(0, v)) == [(5, 1.0)]
    assert find_peaks(np.zeros(64)) == []


def test_find_peaks_exclusion_window():
    v = np.zeros(64)
    v[[10, 11, 12, 40, 63]] = [0.9, 0.8, 0.7, 0.5, 0.6]
    # 11 and 12 lie within tol=2 of 10; 63 wraps to distance 11 from 10
    assert find_peaks(v) == [(10, 0.9), (63, 0.6), (40, 0.5)]


def test_find_peaks_same_group_colluders(params, codebook, long_host):
    copies = [embed_stream(long_host, EmbedSpec(t, "original", params, codebook)) for t in (0, 1)]
    acc = fold_frames(collude_average(copies), 1024)
    peaks = find_peaks(correlate_all_lags(acc, codebook.codes[0]))
    assert sorted(lag for lag, _ in peaks) == [0, 20]


def test_detect_original_single_user(params, codebook, host):
    y = embed_stream(host, EmbedSpec(11, "original", params, codebook))
    report = detect_original(y, codebook, params)
    assert report.traced_users == [11]
    hit = [h for h in report.hits if h.user == 11][0]
    assert (hit.group_id, hit.detected_delay, hit.delay_index) == (2, 60, 3)


def test_detect_original_breaks_under_shift(params, codebook, host):
    y = time_shift(embed_stream(host, EmbedSpec(11, "original", params, codebook)), 300)
    report = detect_original(y, codebook, params)
    assert report.traced_users != [11]
    assert any(h.group_id == 2 and h.detected_delay == 360 and h.user is None for h in report.hits)


def test_detect_original_two_colluders(params, codebook, long_host):
    copies = [embed_stream(long_host, EmbedSpec(t, "original", params, codebook)) for t in (3, 9)]
    assert detect_original(collude_average(copies), codebook, params).traced_users == [3, 9]


def test_correct_delay_arithmetic():
    assert correct_delay(120, 70, 50, 1024) == 100
    assert correct_delay(5, 1000, 990, 1024) == 1019


def test_detect_improved_unattacked_matches_original(params, codebook, host):
    y = embed_stream(host, EmbedSpec(42, "improved", params, codebook))
    imp = detect_improved(y, codebook, params)
    assert imp.sync_delay == codebook.sync.base_delay and not imp.sync_missing
    assert imp.traced_users == detect_original(y, codebook, params).traced_users == [42]


@pytest.mark.parametrize("attack", ["crop", "shift"])
@pytest.mark.parametrize("c", [1, 77, 300, 512])
def test_detect_improved_repairs_desync(params, codebook, host, attack, c):
    y = embed_stream(host, EmbedSpec(11, "improved", params, codebook))
    y = crop(y, c) if attack == "crop" else time_shift(y, c)
    report = detect_improved(y, codebook, params)
    assert report.traced_users == [11]
    expected = (codebook.sync.base_delay + (c if attack == "shift" else -c)) % 1024
    assert report.sync_delay == expected


def test_detect_improved_without_sync_falls_back(params, codebook, host):
    y = embed_stream(host, EmbedSpec(11, "original", params, codebook))
    report = detect_improved(y, codebook, params)
    assert report.sync_missing and report.sync_delay is None
    assert report.traced_users == [11]


def test_short_or_silent_signal_has_no_hits(params, codebook):
    for y in (np.zeros(0), np.zeros(500), np.zeros(4096)):
        assert detect_original(y, codebook, params).hits == []
        assert detect_improved(y, codebook, params).traced_users == []


def test_report_serializations(params, codebook, host):
    y = embed_stream(host, EmbedSpec(11, "improved", params, codebook))
    report = detect_improved(time_shift(y, 64), codebook, params)
    d = json.loads(report.to_json())
    assert d["traced_users"] == [11] and d["scheme"] == "improved"
    rows = report.rows()
    assert rows[0] == "code_id,detected_delay,corrected_delay,score,traced_user"
    assert any(r.startswith("2,124,60,") and r.endswith(",11") for r in rows[1:])


def test_codebook_params_mismatch(params, codebook):
    from delayfp.assignment import SchemeParams
    with pytest.raises(ValueError):
        detect_original(np.zeros(4096), codebook, SchemeParams(M=8))
