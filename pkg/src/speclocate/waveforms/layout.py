"""Band layouts: the ground-truth description of every synthesized record."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgumentError, LayoutError
from .modems import Modulation

OFDM_SUBCARRIER_COUNT = 512


@dataclass
class SignalBurst:
    """One signal occupying a rectangle in (sample-time, frequency) space.

    center_freq and bandwidth are in cycles/sample; the occupied band
    [center_freq - bandwidth/2, center_freq + bandwidth/2) must fit inside
    the half-open sample band [-0.5, 0.5). amplitude_db sets mean burst power
    in dB relative to unit power.
    """

    modulation: str
    center_freq: float
    bandwidth: float
    start_sample: int
    duration_samples: int
    amplitude_db: float
    rolloff: float | None = None
    subcarrier_count: int | None = None

    def __post_init__(self):
        if isinstance(self.modulation, Modulation):
            self.modulation = self.modulation.value
        if self.modulation == Modulation.OFDM.value and self.subcarrier_count is None:
            self.subcarrier_count = OFDM_SUBCARRIER_COUNT

    @property
    def freq_lo(self) -> float:
        return self.center_freq - self.bandwidth / 2.0

    @property
    def freq_hi(self) -> float:
        return self.center_freq + self.bandwidth / 2.0

    def validate(self):
        if not 0.0 < self.bandwidth <= 1.0:
            raise InvalidArgumentError(
                f"bandwidth must be in (0, 1], got {self.bandwidth}"
            )
        if self.freq_lo < -0.5 or self.freq_hi > 0.5:
            raise InvalidArgumentError(
                f"burst band [{self.freq_lo}, {self.freq_hi}) exceeds [-0.5, 0.5)"
            )
        if self.start_sample < 0:
            raise InvalidArgumentError("start_sample must be >= 0")
        if self.duration_samples <= 0:
            raise InvalidArgumentError("duration_samples must be > 0")
        if self.modulation == Modulation.OFDM.value and \
                self.subcarrier_count != OFDM_SUBCARRIER_COUNT:
            raise InvalidArgumentError(
                f"OFDM bursts carry {OFDM_SUBCARRIER_COUNT} subcarriers"
            )

    def to_dict(self) -> dict:
        d = {
            "modulation": self.modulation,
            "center_freq": self.center_freq,
            "bandwidth": self.bandwidth,
            "start_sample": self.start_sample,
            "duration_samples": self.duration_samples,
            "amplitude_db": self.amplitude_db,
        }
        if self.rolloff is not None:
            d["rolloff"] = self.rolloff
        if self.subcarrier_count is not None:
            d["subcarrier_count"] = self.subcarrier_count
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SignalBurst":
        return cls(
            modulation=d["modulation"],
            center_freq=float(d["center_freq"]),
            bandwidth=float(d["bandwidth"]),
            start_sample=int(d["start_sample"]),
            duration_samples=int(d["duration_samples"]),
            amplitude_db=float(d["amplitude_db"]),
            rolloff=d.get("rolloff"),
            subcarrier_count=d.get("subcarrier_count"),
        )


@dataclass
class BandLayout:
    """Reproducible recipe for one wideband record: length, bursts, seed."""

    record_length_samples: int
    bursts: list[SignalBurst] = field(default_factory=list)
    rng_seed: int = 0

    def validate(self):
        if self.record_length_samples <= 0:
            raise LayoutError("record length must be positive")
        for i, burst in enumerate(self.bursts):
            try:
                burst.validate()
            except InvalidArgumentError as exc:
                raise LayoutError(f"burst {i}: {exc}") from exc
            if burst.start_sample + burst.duration_samples > self.record_length_samples:
                raise LayoutError(
                    f"burst {i} ends at "
                    f"{burst.start_sample + burst.duration_samples}, beyond "
                    f"record length {self.record_length_samples}"
                )

    def to_dict(self) -> dict:
        return {
            "record_length_samples": self.record_length_samples,
            "rng_seed": self.rng_seed,
            "bursts": [b.to_dict() for b in self.bursts],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BandLayout":
        return cls(
            record_length_samples=int(d["record_length_samples"]),
            bursts=[SignalBurst.from_dict(b) for b in d.get("bursts", [])],
            rng_seed=int(d.get("rng_seed", 0)),
        )


@dataclass
class BurstRanges:
    """Randomization ranges for layout generation (configuration, not constants)."""

    bursts_per_record: tuple[int, int] = (1, 6)
    bandwidth: tuple[float, float] = (0.01, 0.25)
    duration_frac: tuple[float, float] = (0.05, 0.8)
    amplitude_db: tuple[float, float] = (-20.0, 0.0)
    rolloff: tuple[float, float] = (0.2, 0.4)
    modulations: tuple[str, ...] = tuple(m.value for m in Modulation)


def random_layout(record_length: int, rng_seed: int,
                  ranges: BurstRanges | None = None) -> BandLayout:
    """Draw a random band layout, reproducible from rng_seed."""
    ranges = ranges or BurstRanges()
    rng = np.random.default_rng(rng_seed)
    n_bursts = int(rng.integers(ranges.bursts_per_record[0],
                                ranges.bursts_per_record[1] + 1))
    bursts = []
    for _ in range(n_bursts):
        bw = float(rng.uniform(*ranges.bandwidth))
        duration = int(rng.uniform(*ranges.duration_frac) * record_length)
        duration = max(duration, 256)
        start = int(rng.integers(0, max(record_length - duration, 0) + 1))
        cf = float(rng.uniform(-0.5 + bw / 2.0, 0.5 - bw / 2.0))
        mod = str(rng.choice(list(ranges.modulations)))
        bursts.append(SignalBurst(
            modulation=mod,
            center_freq=cf,
            bandwidth=bw,
            start_sample=start,
            duration_samples=duration,
            amplitude_db=float(rng.uniform(*ranges.amplitude_db)),
            rolloff=float(rng.uniform(*ranges.rolloff)),
        ))
    layout = BandLayout(record_length_samples=record_length, bursts=bursts,
                        rng_seed=rng_seed)
    layout.validate()
    return layout
