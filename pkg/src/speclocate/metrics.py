"""Scoring: IoU-gated matching, precision/recall, SNR sweeps, SGM1 masks.

Boxes live in continuous (sample-time x frequency) coordinates with half-open
intervals on both axes. Grid boxes (inclusive bin indices) convert through a
GridGeometry so that channel width and step stride are honored.

The SGM1 mask file is the interchange format between the detector/scorer and
any external segmenter:

    bytes 0..3   magic "SGM1"
    bytes 4..7   u32 little-endian T (time steps)
    bytes 8..11  u32 little-endian F (frequency bins)
    bytes 12..   T*F bytes, row-major (time-major), quantized score 0..255

Hard masks use {0, 255}; reading with binary=True thresholds at > 127.
"""

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .clustering import GridBox
from .errors import (
    ConsistencyError,
    FormatError,
    InvalidArgumentError,
    SpeclocateError,
)
from .waveforms.sigmf import SigmfRecord
from .waveforms.synth import snr_to_noise_std, synthesize_record

SGM1_MAGIC = b"SGM1"
SGM1_HEADER = struct.Struct("<4sII")

# SeedSequence key offsets for the sweep protocol (documented in the README;
# an external detector can reproduce the exact noise of any trial)
SWEEP_SNR_KEY_OFFSET = 2**20
SWEEP_CALIBRATION_TAG = 2**31


@dataclass(frozen=True)
class TimeFreqBox:
    """Half-open rectangle [start_sample, stop_sample) x [freq_lo, freq_hi)."""

    start_sample: int
    stop_sample: int
    freq_lo: float
    freq_hi: float

    def __post_init__(self):
        if self.start_sample >= self.stop_sample:
            raise InvalidArgumentError(
                f"start {self.start_sample} must precede stop {self.stop_sample}"
            )
        if self.freq_lo >= self.freq_hi:
            raise InvalidArgumentError(
                f"freq_lo {self.freq_lo} must be below freq_hi {self.freq_hi}"
            )
        if self.freq_lo < -0.5 or self.freq_hi > 0.5:
            raise InvalidArgumentError(
                f"frequency band [{self.freq_lo}, {self.freq_hi}) outside [-0.5, 0.5)"
            )

    @property
    def area(self) -> float:
        return (self.stop_sample - self.start_sample) * (self.freq_hi - self.freq_lo)

    def to_dict(self) -> dict:
        return {
            "start_sample": self.start_sample,
            "stop_sample": self.stop_sample,
            "freq_lo": self.freq_lo,
            "freq_hi": self.freq_hi,
        }


def iou(a: TimeFreqBox, b: TimeFreqBox) -> float:
    """Intersection area over union area; 0 when disjoint."""
    dt = min(a.stop_sample, b.stop_sample) - max(a.start_sample, b.start_sample)
    df = min(a.freq_hi, b.freq_hi) - max(a.freq_lo, b.freq_lo)
    if dt <= 0 or df <= 0:
        return 0.0
    inter = dt * df
    return inter / (a.area + b.area - inter)


@dataclass
class MatchResult:
    tp: int
    fp: int
    p: int
    pairs: list[tuple[int, int, float]] = field(default_factory=list)

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if (self.tp + self.fp) > 0 else 1.0

    @property
    def recall(self) -> float:
        return self.tp / self.p if self.p > 0 else 1.0


def match_and_score(preds: list[TimeFreqBox], truths: list[TimeFreqBox],
                    iou_threshold: float = 0.5) -> MatchResult:
    """Greedy one-to-one matching in descending IoU order.

    A prediction is a true positive when it pairs with an unmatched truth at
    IoU >= threshold; remaining predictions are false positives. Precision is
    defined as 1.0 when there are no predictions.
    """
    if not 0.0 < iou_threshold < 1.0:
        raise InvalidArgumentError(
            f"iou_threshold must be in (0, 1), got {iou_threshold}"
        )
    candidates = []
    for pi, pred in enumerate(preds):
        for ti, truth in enumerate(truths):
            v = iou(pred, truth)
            if v >= iou_threshold:
                candidates.append((v, pi, ti))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))

    pred_used = [False] * len(preds)
    truth_used = [False] * len(truths)
    pairs = []
    for v, pi, ti in candidates:
        if pred_used[pi] or truth_used[ti]:
            continue
        pred_used[pi] = True
        truth_used[ti] = True
        pairs.append((pi, ti, v))
    tp = len(pairs)
    return MatchResult(tp=tp, fp=len(preds) - tp, p=len(truths), pairs=pairs)


@dataclass(frozen=True)
class GridGeometry:
    """Mapping between grid bins and absolute (samples x frequency) space."""

    step_stride_samples: int
    channels: int

    @property
    def channel_width(self) -> float:
        return 1.0 / self.channels

    def grid_box_to_timefreq(self, box: GridBox) -> TimeFreqBox:
        return TimeFreqBox(
            start_sample=box.t_lo * self.step_stride_samples,
            stop_sample=(box.t_hi + 1) * self.step_stride_samples,
            freq_lo=-0.5 + box.f_lo * self.channel_width,
            freq_hi=-0.5 + (box.f_hi + 1) * self.channel_width,
        )

    def rasterize_box(self, box: TimeFreqBox, steps: int) -> np.ndarray:
        """Paint every bin the box overlaps (partial overlap paints the bin)."""
        grid = np.zeros((steps, self.channels), dtype=bool)
        stride = self.step_stride_samples
        cw = self.channel_width
        t0 = max(int(np.floor(box.start_sample / stride)), 0)
        t1 = min(int(np.ceil(box.stop_sample / stride)), steps)
        f0 = max(int(np.floor((box.freq_lo + 0.5) / cw)), 0)
        f1 = min(int(np.ceil((box.freq_hi + 0.5) / cw)), self.channels)
        grid[t0:t1, f0:f1] = True
        return grid


def boxes_from_annotations(record: SigmfRecord) -> list[TimeFreqBox]:
    """Ground-truth boxes from a record's annotations, validated in bounds."""
    truths = []
    for a in record.annotations:
        if a.sample_start < 0 or a.sample_start + a.sample_count > len(record):
            raise ConsistencyError(
                f"annotation [{a.sample_start}, "
                f"{a.sample_start + a.sample_count}) outside record of "
                f"{len(record)} samples"
            )
        truths.append(TimeFreqBox(
            start_sample=a.sample_start,
            stop_sample=a.sample_start + a.sample_count,
            freq_lo=a.freq_lower_edge,
            freq_hi=a.freq_upper_edge,
        ))
    return truths


def write_mask(path, values: np.ndarray):
    """Write an SGM1 mask. Boolean grids map to {0, 255}; integer grids must
    already be quantized scores in 0..255."""
    values = np.asarray(values)
    if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
        raise InvalidArgumentError("mask must be a non-empty 2-D grid")
    if values.dtype == bool:
        payload = np.where(values, 255, 0).astype(np.uint8)
    else:
        if np.any(values < 0) or np.any(values > 255):
            raise InvalidArgumentError("scores must be within 0..255")
        payload = values.astype(np.uint8)
    t, f = payload.shape
    Path(path).write_bytes(
        SGM1_HEADER.pack(SGM1_MAGIC, t, f) + payload.tobytes(order="C")
    )


def read_mask(path, binary: bool = False) -> np.ndarray:
    """Read an SGM1 mask; with binary=True, threshold scores at > 127."""
    raw = Path(path).read_bytes()
    if len(raw) < SGM1_HEADER.size:
        raise FormatError(f"{path}: too short for an SGM1 header")
    magic, t, f = SGM1_HEADER.unpack_from(raw)
    if magic != SGM1_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if t < 1 or f < 1:
        raise FormatError(f"{path}: degenerate dimensions {t}x{f}")
    expected = SGM1_HEADER.size + t * f
    if len(raw) != expected:
        raise FormatError(
            f"{path}: size {len(raw)} does not match header ({expected} bytes)"
        )
    grid = np.frombuffer(raw, dtype=np.uint8, offset=SGM1_HEADER.size).reshape(t, f)
    return grid > 127 if binary else grid.copy()


@dataclass
class EvalRow:
    snr_db: float
    precision: float
    recall: float
    tp: int
    fp: int
    p: int
    trials: int

    def to_dict(self) -> dict:
        return {
            "snr_db": self.snr_db, "precision": self.precision,
            "recall": self.recall, "tp": self.tp, "fp": self.fp,
            "p": self.p, "trials": self.trials,
        }


@dataclass
class EvalReport:
    rows: list[EvalRow] = field(default_factory=list)

    CSV_HEADER = "snr_db,precision,recall,tp,fp,p,trials"

    def to_csv_text(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.snr_db:.10g},{r.precision:.10g},{r.recall:.10g},"
                f"{r.tp},{r.fp},{r.p},{r.trials}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        Path(path).write_text(self.to_csv_text())

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows]}

    def write_json(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    def recall_crossing(self, level: float = 0.5) -> float | None:
        """Linearly interpolated SNR where recall first crosses the level."""
        rows = sorted(self.rows, key=lambda r: r.snr_db)
        for lo, hi in zip(rows, rows[1:]):
            if lo.recall < level <= hi.recall:
                span = hi.recall - lo.recall
                if span <= 0:
                    return hi.snr_db
                return lo.snr_db + (level - lo.recall) / span * (hi.snr_db - lo.snr_db)
        if rows and rows[0].recall >= level:
            return rows[0].snr_db
        return None


def sweep_trial_seed(master_seed: int, snr_db: float, trial: int) -> np.random.SeedSequence:
    """Per-trial noise seed: SeedSequence([master, snr millidB key, trial])."""
    key = int(round(snr_db * 1000)) + SWEEP_SNR_KEY_OFFSET
    return np.random.SeedSequence([int(master_seed), key, int(trial)])


def sweep_calibration_seed(master_seed: int, snr_db: float) -> np.random.SeedSequence:
    key = int(round(snr_db * 1000)) + SWEEP_SNR_KEY_OFFSET
    return np.random.SeedSequence([int(master_seed), key, SWEEP_CALIBRATION_TAG])


def sweep_snr(detector, layout, snr_db_list, trials_per_step: int,
              master_seed: int, iou_threshold: float = 0.5) -> EvalReport:
    """Run the detector over an SNR grid with uniquely seeded AWGN per trial.

    The clean record synthesizes once; each trial adds noise seeded from
    (master_seed, snr, trial), so the report is a pure function of its
    configuration. P accumulates one count per truth per trial. The detector
    must expose prepare(noise_std, seed_sequence) and
    detect(samples) -> list[TimeFreqBox].
    """
    if trials_per_step < 1:
        raise InvalidArgumentError("trials_per_step must be >= 1")
    record = layout if isinstance(layout, SigmfRecord) else synthesize_record(layout)
    truths = boxes_from_annotations(record)
    clean = np.ascontiguousarray(record.samples, dtype=np.complex64)
    signal_power = float(np.mean(np.abs(record.samples) ** 2))

    rows = []
    for snr_db in snr_db_list:
        std = snr_to_noise_std(signal_power, snr_db)
        detector.prepare(std, sweep_calibration_seed(master_seed, snr_db))
        tp = fp = p = 0
        for trial in range(trials_per_step):
            rng = np.random.default_rng(sweep_trial_seed(master_seed, snr_db, trial))
            noise = rng.standard_normal(2 * len(clean), dtype=np.float32) \
                       .view(np.complex64)
            noise *= np.float32(std)
            noise += clean
            try:
                preds = detector.detect(noise)
            except SpeclocateError as exc:
                raise type(exc)(
                    f"{exc} (snr_db={snr_db}, trial={trial}, "
                    f"master_seed={master_seed})"
                ) from exc
            m = match_and_score(preds, truths, iou_threshold)
            tp += m.tp
            fp += m.fp
            p += m.p
        precision = tp / (tp + fp) if (tp + fp) > 0 else 1.0
        recall = tp / p if p > 0 else 1.0
        rows.append(EvalRow(
            snr_db=float(snr_db), precision=precision, recall=recall,
            tp=tp, fp=fp, p=p, trials=trials_per_step,
        ))
    return EvalReport(rows=rows)
