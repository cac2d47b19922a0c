"""Acceptance suite: one test and one printed pass/fail line per criterion.

Run with `pytest tests/test_acceptance.py -v -s`. The SNR sweep criteria share
one detection pass (the filtered variant is scored from the same per-trial
boxes), so the whole suite stays within the stated runtime budgets.
"""

import time
from collections import deque
from dataclasses import replace

import numpy as np
import pytest

from speclocate.clustering import (
    DetectionFilters,
    GridBox,
    cluster_spectrogram,
    connected_components,
    filter_detections,
    find_core_points,
)
from speclocate.config import default_test_layout
from speclocate.metrics import (
    EvalReport,
    EvalRow,
    TimeFreqBox,
    boxes_from_annotations,
    iou,
    match_and_score,
    read_mask,
    sweep_calibration_seed,
    sweep_trial_seed,
    write_mask,
)
from speclocate.pipeline import RadiometerPipeline
from speclocate.radiometer import (
    RadiometerConfig,
    build_statistic_histogram,
    channelize_integrate,
    fit_noise_gaussian,
    fit_noise_model,
)
from speclocate.waveforms import (
    read_sigmf,
    snr_to_noise_std,
    synthesize_record,
    write_sigmf,
)

SWEEP_SEED = 20260809
SWEEP_TRIALS = 200
SWEEP_SNRS = [float(s) for s in range(-15, 16)]


def _line(ok: bool, name: str, detail: str):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


# ------------------------------------------------------------------ 1. CFAR

def test_cfar_fidelity():
    t0 = time.perf_counter()
    cfg = RadiometerConfig()  # 256 channels / N=2 / FAR 0.05
    std = 3.1e-4
    rng = np.random.default_rng(101)
    fit_noise = (rng.standard_normal(2 * 1_048_576, dtype=np.float32)
                 .view(np.complex64) * np.float32(std))
    model = fit_noise_model(channelize_integrate(fit_noise, cfg).stats, cfg)

    bins = 0
    alarms = 0
    for chunk in range(3):
        fresh = (np.random.default_rng(200 + chunk)
                 .standard_normal(2 * 1_048_576, dtype=np.float32)
                 .view(np.complex64) * np.float32(std))
        stats = channelize_integrate(fresh, cfg).stats
        bins += stats.size
        alarms += int((stats > model.threshold).sum())
    rate = alarms / bins
    elapsed = time.perf_counter() - t0

    ok = 0.04 <= rate <= 0.06 and bins >= 1_000_000 and elapsed < 60.0
    _line(ok, "CFAR fidelity",
          f"empirical FAR {rate:.4f} over {bins} AWGN bins "
          f"(target [0.04, 0.06]), runtime {elapsed:.1f}s < 60s")
    assert bins >= 1_000_000
    assert 0.04 <= rate <= 0.06
    assert elapsed < 60.0


# ------------------------------------------------- 2+3. recall / precision

@pytest.fixture(scope="module")
def qpsk_sweep_reports():
    """One detection pass over the QPSK sweep; boxes scored with filters off
    (baseline) and with contained-merge, per trial, identical noise."""
    layout = default_test_layout()
    record = synthesize_record(layout)
    truths = boxes_from_annotations(record)
    clean = np.ascontiguousarray(record.samples, dtype=np.complex64)
    p_sig = float(np.mean(np.abs(record.samples) ** 2))

    pipe = RadiometerPipeline()
    geom = pipe.geometry
    merge = DetectionFilters(contained_merge=True)

    base_rows = []
    merged_rows = []
    t0 = time.perf_counter()
    for snr_db in SWEEP_SNRS:
        std = snr_to_noise_std(p_sig, snr_db)
        pipe.prepare(std, sweep_calibration_seed(SWEEP_SEED, snr_db))
        acc = {"base": [0, 0, 0], "merged": [0, 0, 0]}
        for trial in range(SWEEP_TRIALS):
            rng = np.random.default_rng(sweep_trial_seed(SWEEP_SEED, snr_db,
                                                         trial))
            noisy = rng.standard_normal(2 * len(clean), dtype=np.float32) \
                       .view(np.complex64)
            noisy *= np.float32(std)
            noisy += clean
            grid_boxes, _ = pipe.detect_grid(noisy)
            for key, boxes in (("base", grid_boxes),
                               ("merged", filter_detections(grid_boxes, merge))):
                preds = [geom.grid_box_to_timefreq(b) for b in boxes]
                m = match_and_score(preds, truths, 0.5)
                acc[key][0] += m.tp
                acc[key][1] += m.fp
                acc[key][2] += m.p
        for key, rows in (("base", base_rows), ("merged", merged_rows)):
            tp, fp, p = acc[key]
            rows.append(EvalRow(
                snr_db=snr_db,
                precision=tp / (tp + fp) if tp + fp else 1.0,
                recall=tp / p, tp=tp, fp=fp, p=p, trials=SWEEP_TRIALS,
            ))
    elapsed = time.perf_counter() - t0
    return EvalReport(rows=base_rows), EvalReport(rows=merged_rows), elapsed


def test_radiometer_recall_curve(qpsk_sweep_reports):
    base, _, elapsed = qpsk_sweep_reports
    by_snr = {r.snr_db: r for r in base.rows}
    r_m15 = by_snr[-15.0].recall
    high_ok = all(by_snr[s].recall >= 0.9 for s in (12.0, 13.0, 14.0, 15.0))
    crossing = base.recall_crossing(0.5)
    cross_txt = "none" if crossing is None else f"{crossing:.2f} dB"
    in_window = crossing is not None and 6.0 <= crossing <= 12.0

    ok = (r_m15 < 0.05) and high_ok and in_window and elapsed < 600.0
    _line(ok, "Radiometer recall curve",
          f"recall(-15 dB)={r_m15:.3f} (<0.05), recall(>=12 dB)>=0.9: "
          f"{high_ok}, 0.5-crossing {cross_txt} (required [6, 12] dB), "
          f"sweep runtime {elapsed:.0f}s < 600s")
    assert r_m15 < 0.05
    assert high_ok
    assert elapsed < 600.0
    assert in_window, (
        f"recall 0.5-crossing at {cross_txt}: the detector reaches 0.5 recall "
        f"far below the [6, 12] dB window (see notes/decisions.md: with SNR "
        f"defined as total signal power over total noise power, the "
        f"energy of a 0.27-wide band concentrated into 256 channels makes "
        f"the transition occur near 0 dB; the cited 8-9 dB figure is not "
        f"reproducible under that SNR definition)"
    )


def test_precision_valley_and_contained_merge(qpsk_sweep_reports):
    base, merged, _ = qpsk_sweep_reports
    by_snr = {r.snr_db: r for r in base.rows}
    p15 = by_snr[15.0].precision
    moderate = [by_snr[float(s)].precision for s in range(7, 13)]
    valley = any(p < p15 for p in moderate)

    merge_ok = all(m.precision >= b.precision
                   for b, m in zip(base.rows, merged.rows))

    ok = valley and merge_ok
    _line(ok, "Precision valley + contained-merge",
          f"min precision in [7,12] dB = {min(moderate):.4f} vs "
          f"precision(15 dB) = {p15:.4f} (valley required: some moderate row "
          f"strictly below), contained-merge >= baseline on every row: "
          f"{merge_ok}")
    assert merge_ok, "contained-merge must never lower precision"
    assert valley, (
        f"no moderate-SNR precision valley below the 15 dB value: "
        f"precision rises only up to ~9 dB and then falls as DFT leakage "
        f"skirts widen with SNR (min [7,12] dB = {min(moderate):.4f}, "
        f"15 dB = {p15:.4f}; see notes/decisions.md)"
    )


# ------------------------------------------------------------ 4. IoU oracle

def test_iou_oracle_integer_aligned():
    def cell_count_iou(a, b):
        # brute force: count unit cells on the (sample x milli-frequency) grid
        af0, af1 = round(1000 * a.freq_lo), round(1000 * a.freq_hi)
        bf0, bf1 = round(1000 * b.freq_lo), round(1000 * b.freq_hi)
        inter = 0
        for tt in range(min(a.start_sample, b.start_sample),
                        max(a.stop_sample, b.stop_sample)):
            if not (a.start_sample <= tt < a.stop_sample
                    and b.start_sample <= tt < b.stop_sample):
                continue
            for ff in range(min(af0, bf0), max(af1, bf1)):
                if af0 <= ff < af1 and bf0 <= ff < bf1:
                    inter += 1
        area_a = (a.stop_sample - a.start_sample) * (af1 - af0)
        area_b = (b.stop_sample - b.start_sample) * (bf1 - bf0)
        union = area_a + area_b - inter
        return inter / union if union else 0.0

    rng = np.random.default_rng(404)
    worst = 0.0
    for _ in range(1000):
        t = rng.integers(0, 30, 4)
        f = rng.integers(0, 30, 4)
        a = TimeFreqBox(int(t[0]), int(t[0] + t[1] + 1),
                        f[0] * 0.001, (f[0] + f[1] + 1) * 0.001)
        b = TimeFreqBox(int(t[2]), int(t[2] + t[3] + 1),
                        f[2] * 0.001, (f[2] + f[3] + 1) * 0.001)
        worst = max(worst, abs(iou(a, b) - cell_count_iou(a, b)))
    ok = worst < 1e-9
    _line(ok, "IoU oracle", f"1000 integer-aligned pairs, max deviation "
                            f"from cell counting {worst:.2e} (< 1e-9)")
    assert worst < 1e-9


# ----------------------------------------------------- 5. clustering oracles

def _flood_fill_boxes(mask):
    n_t, n_f = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    boxes = set()
    for t in range(n_t):
        for f in range(n_f):
            if not mask[t, f] or seen[t, f]:
                continue
            q = deque([(t, f)])
            seen[t, f] = True
            t0 = t1 = t
            f0 = f1 = f
            while q:
                ct, cf = q.popleft()
                t0, t1 = min(t0, ct), max(t1, ct)
                f0, f1 = min(f0, cf), max(f1, cf)
                for dt in (-1, 0, 1):
                    for df in (-1, 0, 1):
                        nt, nf = ct + dt, cf + df
                        if 0 <= nt < n_t and 0 <= nf < n_f and \
                                mask[nt, nf] and not seen[nt, nf]:
                            seen[nt, nf] = True
                            q.append((nt, nf))
            boxes.add((t0, t1, f0, f1))
    return boxes


def test_clustering_oracles():
    # solid rectangles recovered exactly
    solid_ok = True
    rng = np.random.default_rng(55)
    for _ in range(10):
        mask = np.zeros((64, 64), dtype=bool)
        t0, f0 = rng.integers(2, 30, 2)
        h, w = rng.integers(6, 25, 2)
        mask[t0:t0 + h, f0:f0 + w] = True
        boxes = cluster_spectrogram(mask, find_core_points(mask))
        solid_ok &= boxes == [GridBox(int(t0), int(t0 + h - 1),
                                      int(f0), int(f0 + w - 1))]

    # single-bin bridge: 2 boxes from growth, 1 from components
    mask = np.zeros((20, 24), dtype=bool)
    mask[5:13, 2:10] = True
    mask[5:13, 13:21] = True
    mask[8, 10:13] = True
    grown = cluster_spectrogram(mask, find_core_points(mask))
    comps = connected_components(mask)
    bridge_ok = len(grown) == 2 and len(comps) == 1

    # flood-fill agreement on 100 random 128x128 masks
    agree = True
    for seed in range(100):
        m = np.random.default_rng(seed).random((128, 128)) < 0.3
        got = {(b.t_lo, b.t_hi, b.f_lo, b.f_hi)
               for b in connected_components(m)}
        agree &= got == _flood_fill_boxes(m)

    ok = solid_ok and bridge_ok and agree
    _line(ok, "Clustering oracles",
          f"solid rectangles exact: {solid_ok}, bridge 2-vs-1: {bridge_ok}, "
          f"flood-fill agreement on 100 masks: {agree}")
    assert solid_ok and bridge_ok and agree


# -------------------------------------------------- 6. noise-fit recovery

def test_noise_fit_recovery():
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        sigma_true = float(rng.uniform(0.5, 3.0))
        mu = float(rng.uniform(8 * sigma_true, 12 * sigma_true))
        draws = rng.normal(mu, sigma_true, 1_000_000)
        draws = draws[draws > 0]
        edges, counts = build_statistic_histogram(draws)
        model = fit_noise_gaussian(edges, counts)
        worst = max(worst, abs(model.sigma - sigma_true) / sigma_true)
    ok = worst < 0.05
    _line(ok, "Noise-fit recovery",
          f"max relative sigma error over 20 seeds: {worst:.4f} (< 0.05)")
    assert worst < 0.05


# ------------------------------------------------------- 7. round trips

def test_sigmf_and_sgm1_round_trips(tmp_path):
    layout = default_test_layout()
    layout = replace(layout, record_length_samples=65536,
                     bursts=[replace(layout.bursts[0],
                                     duration_samples=65536)])
    rec = synthesize_record(layout)
    write_sigmf(rec, tmp_path / "a")
    back = read_sigmf(tmp_path / "a")
    write_sigmf(back, tmp_path / "b")
    sigmf_ok = (
        (tmp_path / "a.sigmf-data").read_bytes()
        == (tmp_path / "b.sigmf-data").read_bytes()
        and (tmp_path / "a.sigmf-meta").read_bytes()
        == (tmp_path / "b.sigmf-meta").read_bytes()
    )

    rng = np.random.default_rng(1)
    scores = rng.integers(0, 256, (321, 257)).astype(np.uint8)
    write_mask(tmp_path / "m.sgm1", scores)
    size_ok = (tmp_path / "m.sgm1").stat().st_size == 12 + 321 * 257
    back_scores = read_mask(tmp_path / "m.sgm1")
    write_mask(tmp_path / "m2.sgm1", back_scores)
    sgm1_ok = (tmp_path / "m.sgm1").read_bytes() == \
        (tmp_path / "m2.sgm1").read_bytes()

    ok = sigmf_ok and size_ok and sgm1_ok
    _line(ok, "Round trips",
          f"SigMF bit-exact: {sigmf_ok}, SGM1 bit-exact: {sgm1_ok}, "
          f"SGM1 size formula 12+T*F: {size_ok}")
    assert sigmf_ok and size_ok and sgm1_ok


# ------------------------------------------------------- 8. determinism

def test_evaluate_determinism(tmp_path):
    import json

    from speclocate.cli import main

    cfg = {
        "seed": 31337,
        "radiometer": {"calibration_bins": 65536},
        "evaluate": {
            "snr_start_db": -4.0, "snr_stop_db": 12.0, "snr_step_db": 4.0,
            "trials_per_step": 3,
            "test_layout": {
                "record_length_samples": 131072, "rng_seed": 5,
                "bursts": [{"modulation": "psk4", "center_freq": 0.05,
                            "bandwidth": 0.27, "start_sample": 0,
                            "duration_samples": 131072,
                            "amplitude_db": 0.0, "rolloff": 0.35}],
            },
        },
    }
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert main(["evaluate", "--config", str(tmp_path / "cfg.json"),
                 "--out", str(tmp_path / "r1"), "--no-figure"]) == 0
    assert main(["evaluate", "--config", str(tmp_path / "cfg.json"),
                 "--out", str(tmp_path / "r2"), "--no-figure"]) == 0
    b1 = (tmp_path / "r1" / "report.csv").read_bytes()
    b2 = (tmp_path / "r2" / "report.csv").read_bytes()
    ok = b1 == b2
    _line(ok, "Determinism", f"cmd_evaluate twice with identical "
          f"(config, seed): byte-identical CSV: {ok}")
    assert ok
