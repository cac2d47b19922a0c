"""Record synthesis, AWGN injection, and SNR accounting.

SNR here is always total-band: mean signal power over mean noise power across
the full sample bandwidth, NOT a power-spectral-density ratio. An oversampled
signal therefore reports a lower SNR than its in-band SNR by 10*log10(1/bw);
keep that in mind when comparing against narrowband detection literature.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError, UndefinedSnrError
from .layout import BandLayout
from .modems import modulate_burst
from .sigmf import SigmfAnnotation, SigmfRecord


@dataclass
class NoiseSpec:
    """Circular AWGN: std_dev is per real dimension, so complex noise power
    is 2 * std_dev**2."""

    std_dev: float
    rng_seed: int = 0

    def validate(self):
        if self.std_dev < 0:
            raise InvalidArgumentError(f"std_dev must be >= 0, got {self.std_dev}")


def synthesize_record(layout: BandLayout) -> SigmfRecord:
    """Sum all burst waveforms into one noiseless wideband record.

    Per-burst symbol seeds derive from (layout.rng_seed, burst index), so the
    same layout always synthesizes bit-identical samples. Annotations mirror
    the bursts exactly.
    """
    layout.validate()
    data = np.zeros(layout.record_length_samples, dtype=np.complex128)
    annotations = []
    for i, burst in enumerate(layout.bursts):
        seed = np.random.SeedSequence([int(layout.rng_seed) & (2**63 - 1), i])
        wave = modulate_burst(burst, seed)
        data[burst.start_sample:burst.start_sample + burst.duration_samples] += wave
        annotations.append(SigmfAnnotation(
            sample_start=burst.start_sample,
            sample_count=burst.duration_samples,
            freq_lower_edge=burst.freq_lo,
            freq_upper_edge=burst.freq_hi,
            label=burst.modulation,
        ))
    return SigmfRecord(samples=data, annotations=annotations)


def add_awgn(samples: np.ndarray, noise: NoiseSpec) -> np.ndarray:
    """Return samples + zero-mean circular Gaussian noise, reproducible from
    the spec's seed. std_dev == 0 returns the input unchanged (same object)."""
    noise.validate()
    if noise.std_dev == 0.0:
        return samples
    rng = np.random.default_rng(noise.rng_seed)
    n = rng.standard_normal(2 * len(samples)).view(np.complex128)
    return samples + noise.std_dev * n


def measure_snr(signal: np.ndarray, noise: np.ndarray) -> float:
    """Total signal power over total noise power, in dB."""
    if len(signal) == 0 or len(noise) == 0:
        raise InvalidArgumentError("signal and noise must be non-empty")
    p_sig = float(np.mean(np.abs(signal) ** 2))
    p_noise = float(np.mean(np.abs(noise) ** 2))
    if p_noise <= 0.0:
        raise UndefinedSnrError("noise power is zero")
    return 10.0 * np.log10(p_sig / p_noise)


def snr_to_noise_std(signal_power: float, snr_db: float) -> float:
    """Per-real-dimension noise std that hits the requested total-band SNR
    for a signal of the given mean power."""
    if signal_power <= 0.0:
        raise InvalidArgumentError(
            f"signal_power must be > 0, got {signal_power}"
        )
    return float(np.sqrt(signal_power * 10.0 ** (-snr_db / 10.0) / 2.0))
