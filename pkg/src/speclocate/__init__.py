"""speclocate: wideband RF signal localization toolkit.

Synthesizes multi-signal baseband recordings with ground-truth band layouts,
localizes signals with a channelized radiometer plus density-based
spectrogram clustering, and scores any localizer with IoU-gated
precision/recall over SNR sweeps.
"""

from . import clustering, metrics, pipeline, radiometer, waveforms
from .clustering import ClusterParams, DetectionFilters, GridBox
from .metrics import (
    EvalReport,
    EvalRow,
    GridGeometry,
    MatchResult,
    TimeFreqBox,
    boxes_from_annotations,
    iou,
    match_and_score,
    read_mask,
    sweep_snr,
    write_mask,
)
from .pipeline import RadiometerPipeline
from .radiometer import DetectionGrid, NoiseModel, RadiometerConfig
from .waveforms import (
    BandLayout,
    Modulation,
    NoiseSpec,
    SigmfRecord,
    SignalBurst,
    add_awgn,
    design_rrc,
    measure_snr,
    modulate_burst,
    read_sigmf,
    snr_to_noise_std,
    synthesize_record,
    write_sigmf,
)

__version__ = "0.1.0"
