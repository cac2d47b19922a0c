"""Wideband multi-signal record synthesis with ground-truth band layouts."""

from .audio import synth_audio
from .layout import BandLayout, BurstRanges, SignalBurst, random_layout
from .modems import CONSTELLATIONS, Modulation, modulate_burst
from .rrc import design_rrc
from .sigmf import (
    SigmfAnnotation,
    SigmfRecord,
    read_sigmf,
    write_sigmf,
)
from .synth import (
    NoiseSpec,
    add_awgn,
    measure_snr,
    snr_to_noise_std,
    synthesize_record,
)

__all__ = [
    "BandLayout",
    "BurstRanges",
    "CONSTELLATIONS",
    "Modulation",
    "NoiseSpec",
    "SigmfAnnotation",
    "SigmfRecord",
    "SignalBurst",
    "add_awgn",
    "design_rrc",
    "measure_snr",
    "modulate_burst",
    "random_layout",
    "read_sigmf",
    "snr_to_noise_std",
    "synth_audio",
    "synthesize_record",
    "write_sigmf",
]
