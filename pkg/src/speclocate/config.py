"""Run configuration: JSON file -> validated dataclasses with defaults.

Radiometer defaults follow the reference operating point (256 channels,
integration 2, false-alarm rate 0.05); the default evaluation layout is a
single full-duration QPSK burst at five samples per symbol.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .clustering import ClusterParams, DetectionFilters
from .errors import ConfigError, InvalidArgumentError, SpeclocateError
from .radiometer import RadiometerConfig
from .waveforms.layout import BandLayout, BurstRanges, SignalBurst
from .pipeline import DEFAULT_CALIBRATION_BINS


def default_test_layout() -> BandLayout:
    """Single QPSK burst, symbol rate 0.2 (5x oversampling), roll-off 0.35,
    spanning the whole ~1M-sample record."""
    n = 1_048_576
    return BandLayout(
        record_length_samples=n,
        bursts=[SignalBurst(
            modulation="psk4",
            center_freq=0.05,
            bandwidth=0.27,      # 0.2 * (1 + 0.35) occupied
            start_sample=0,
            duration_samples=n,
            amplitude_db=0.0,
            rolloff=0.35,
        )],
        rng_seed=42,
    )


@dataclass
class GenerateConfig:
    records: int = 20
    record_length: int = 262_144
    train_fraction: float = 0.8
    ranges: BurstRanges = field(default_factory=BurstRanges)

    def validate(self):
        if self.records < 0:
            raise ConfigError("generate.records must be >= 0")
        if self.record_length < 1024:
            raise ConfigError("generate.record_length must be >= 1024")
        if not 0.0 <= self.train_fraction <= 1.0:
            raise ConfigError("generate.train_fraction must be in [0, 1]")


@dataclass
class EvaluateConfig:
    snr_start_db: float = -15.0
    snr_stop_db: float = 15.0
    snr_step_db: float = 1.0
    trials_per_step: int = 200
    iou_threshold: float = 0.5
    test_layout: BandLayout = field(default_factory=default_test_layout)

    def snr_grid(self) -> list[float]:
        n = int(round((self.snr_stop_db - self.snr_start_db) / self.snr_step_db)) + 1
        return [self.snr_start_db + i * self.snr_step_db for i in range(n)]

    def validate(self):
        if self.snr_step_db <= 0:
            raise ConfigError("evaluate.snr_step_db must be > 0")
        if self.snr_stop_db < self.snr_start_db:
            raise ConfigError("evaluate.snr_stop_db must be >= snr_start_db")
        if self.trials_per_step < 1:
            raise ConfigError("evaluate.trials_per_step must be >= 1")
        if not 0.0 < self.iou_threshold < 1.0:
            raise ConfigError("evaluate.iou_threshold must be in (0, 1)")


@dataclass
class RunConfig:
    seed: int = 1234
    generate: GenerateConfig = field(default_factory=GenerateConfig)
    radiometer: RadiometerConfig = field(default_factory=RadiometerConfig)
    threshold_policy: str = "matched"
    calibration_bins: int = DEFAULT_CALIBRATION_BINS
    cluster: ClusterParams = field(default_factory=ClusterParams)
    filters: DetectionFilters = field(default_factory=DetectionFilters)
    evaluate: EvaluateConfig = field(default_factory=EvaluateConfig)

    def validate(self):
        try:
            self.generate.validate()
            self.radiometer.validate()
            self.cluster.validate()
            self.filters.validate()
            self.evaluate.validate()
        except (ConfigError, InvalidArgumentError) as exc:
            raise ConfigError(str(exc)) from exc
        if self.threshold_policy not in ("matched", "gaussian"):
            raise ConfigError(
                f"threshold_policy must be 'matched' or 'gaussian', "
                f"got {self.threshold_policy!r}"
            )
        if self.calibration_bins < 64:
            raise ConfigError("calibration_bins must be >= 64")


def _pair(value, name) -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{name} must be a [low, high] pair")
    return tuple(value)


def _build_ranges(d: dict) -> BurstRanges:
    kw = {}
    if "bursts_per_record" in d:
        lo, hi = _pair(d["bursts_per_record"], "ranges.bursts_per_record")
        kw["bursts_per_record"] = (int(lo), int(hi))
    for key in ("bandwidth", "duration_frac", "amplitude_db", "rolloff"):
        if key in d:
            lo, hi = _pair(d[key], f"ranges.{key}")
            kw[key] = (float(lo), float(hi))
    if "modulations" in d:
        kw["modulations"] = tuple(str(m) for m in d["modulations"])
    return BurstRanges(**kw)


def config_from_dict(d: dict) -> RunConfig:
    cfg = RunConfig()
    try:
        if "seed" in d:
            cfg.seed = int(d["seed"])
        g = d.get("generate", {})
        cfg.generate = GenerateConfig(
            records=int(g.get("records", cfg.generate.records)),
            record_length=int(g.get("record_length", cfg.generate.record_length)),
            train_fraction=float(g.get("train_fraction", cfg.generate.train_fraction)),
            ranges=_build_ranges(g.get("ranges", {})),
        )
        r = d.get("radiometer", {})
        cfg.radiometer = RadiometerConfig(
            channels_c=int(r.get("channels", cfg.radiometer.channels_c)),
            integration_n=int(r.get("integration", cfg.radiometer.integration_n)),
            false_alarm_rate=float(r.get("false_alarm_rate",
                                         cfg.radiometer.false_alarm_rate)),
        )
        cfg.threshold_policy = str(r.get("threshold_policy", cfg.threshold_policy))
        cfg.calibration_bins = int(r.get("calibration_bins", cfg.calibration_bins))
        c = d.get("cluster", {})
        cfg.cluster = ClusterParams(
            min_neighbors=int(c.get("min_neighbors", cfg.cluster.min_neighbors)),
            metric=str(c.get("metric", cfg.cluster.metric)),
            radius=float(c.get("radius", cfg.cluster.radius)),
            fill_ratio=float(c.get("fill_ratio", cfg.cluster.fill_ratio)),
        )
        f = d.get("filters", {})
        cfg.filters = DetectionFilters(
            contained_merge=bool(f.get("contained_merge",
                                       cfg.filters.contained_merge)),
            min_area=int(f.get("min_area", cfg.filters.min_area)),
        )
        e = d.get("evaluate", {})
        cfg.evaluate = EvaluateConfig(
            snr_start_db=float(e.get("snr_start_db", cfg.evaluate.snr_start_db)),
            snr_stop_db=float(e.get("snr_stop_db", cfg.evaluate.snr_stop_db)),
            snr_step_db=float(e.get("snr_step_db", cfg.evaluate.snr_step_db)),
            trials_per_step=int(e.get("trials_per_step",
                                      cfg.evaluate.trials_per_step)),
            iou_threshold=float(e.get("iou_threshold",
                                      cfg.evaluate.iou_threshold)),
            test_layout=(BandLayout.from_dict(e["test_layout"])
                         if "test_layout" in e else default_test_layout()),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, SpeclocateError) as exc:
        raise ConfigError(f"bad configuration: {exc}") from exc
    cfg.validate()
    return cfg


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config_from_dict(data)


def parse_filters_arg(text: str) -> DetectionFilters:
    """Parse the CLI --filters value, e.g. 'contained-merge,min-area=4'."""
    filters = DetectionFilters()
    if not text:
        return filters
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if part == "contained-merge":
            filters.contained_merge = True
        elif part.startswith("min-area="):
            try:
                filters.min_area = int(part.split("=", 1)[1])
            except ValueError as exc:
                raise ConfigError(f"bad min-area value in {part!r}") from exc
        else:
            raise ConfigError(f"unknown filter {part!r}")
    filters.validate()
    return filters


def derive_record_seed(master_seed: int, index: int) -> int:
    """Stable per-record layout seed from the master seed."""
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])
