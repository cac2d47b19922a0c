"""End-to-end radiometer detection pipeline.

Composes channelize -> noise fit -> threshold -> cluster -> filters -> boxes.
Two calibration modes:

  - noise-only: the threshold comes from a synthetic AWGN grid at a known
    noise level (used by SNR sweeps, where the noise family of each step is
    known; refit once per step, amortized over its trials).
  - self: the threshold is bootstrapped from the record's own statistic grid
    (blind operation). Strong wideband signals can crush the histogram's
    noise bulk into the lowest bins, which surfaces as
    DegenerateHistogramError.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .clustering import (
    ClusterParams,
    DetectionFilters,
    cluster_spectrogram,
    connected_components,
    filter_detections,
    find_core_points,
)
from .errors import InvalidArgumentError
from .metrics import GridGeometry, TimeFreqBox, write_mask
from .radiometer import (
    DetectionGrid,
    NoiseModel,
    RadiometerConfig,
    apply_threshold,
    channelize_integrate,
    fit_noise_model,
)

DEFAULT_CALIBRATION_BINS = 1 << 19


@dataclass
class RadiometerPipeline:
    """Reusable detector: calibrate once, detect many records/trials."""

    radiometer: RadiometerConfig = field(default_factory=RadiometerConfig)
    cluster: ClusterParams = field(default_factory=ClusterParams)
    filters: DetectionFilters = field(default_factory=DetectionFilters)
    threshold_policy: str = "matched"
    calibration_bins: int = DEFAULT_CALIBRATION_BINS
    noise_model: NoiseModel | None = None

    def __post_init__(self):
        self.radiometer.validate()
        self.cluster.validate()
        self.filters.validate()
        if self.threshold_policy not in ("matched", "gaussian"):
            raise InvalidArgumentError(
                f"threshold_policy must be 'matched' or 'gaussian', "
                f"got {self.threshold_policy!r}"
            )

    @property
    def geometry(self) -> GridGeometry:
        return GridGeometry(
            step_stride_samples=self.radiometer.step_stride_samples,
            channels=self.radiometer.channels_c,
        )

    # -- calibration ------------------------------------------------------

    def calibrate_noise_only(self, noise_std: float,
                             seed: np.random.SeedSequence | int) -> NoiseModel:
        """Fit the noise model on a synthetic AWGN grid of calibration_bins
        statistics at the given per-real-dimension noise level."""
        rng = np.random.default_rng(seed)
        n_samples = self.calibration_bins * self.radiometer.integration_n
        noise = rng.standard_normal(2 * n_samples, dtype=np.float32) \
                   .view(np.complex64)
        noise *= np.float32(noise_std)
        grid = channelize_integrate(noise, self.radiometer)
        self.noise_model = fit_noise_model(grid.stats, self.radiometer,
                                           self.threshold_policy)
        return self.noise_model

    def calibrate_from_grid(self, grid: DetectionGrid) -> NoiseModel:
        """Blind bootstrap: fit the noise model on the grid itself."""
        self.noise_model = fit_noise_model(grid.stats, self.radiometer,
                                           self.threshold_policy)
        return self.noise_model

    # -- sweep detector protocol -------------------------------------------

    def prepare(self, noise_std: float, seed: np.random.SeedSequence | int):
        self.calibrate_noise_only(noise_std, seed)

    def detect(self, samples: np.ndarray) -> list[TimeFreqBox]:
        boxes, _ = self.detect_grid(samples)
        geom = self.geometry
        return [geom.grid_box_to_timefreq(b) for b in boxes]

    # -- full pipeline -----------------------------------------------------

    def detect_grid(self, samples: np.ndarray, calibrate_self: bool = False):
        """Run the pipeline and return (grid boxes, thresholded grid)."""
        grid = channelize_integrate(samples, self.radiometer)
        if calibrate_self or self.noise_model is None:
            self.calibrate_from_grid(grid)
        grid = apply_threshold(grid, self.noise_model.threshold)
        cores = find_core_points(grid.mask, self.cluster)
        boxes = cluster_spectrogram(grid.mask, cores, self.cluster)
        boxes = filter_detections(boxes, self.filters)
        return boxes, grid


def mask_boxes_to_timefreq(mask: np.ndarray, record_length: int) -> list[TimeFreqBox]:
    """Connected-components boxes of a binary mask in absolute units.

    The grid geometry is inferred from the mask: channels span the full band
    and the step stride is record_length // time_steps (non-overlapping
    frames, trailing partial frame discarded).
    """
    steps, channels = mask.shape
    stride = record_length // steps
    if stride < 1 or stride * steps > record_length:
        raise InvalidArgumentError(
            f"mask of {steps} steps cannot tile a record of {record_length} samples"
        )
    geom = GridGeometry(step_stride_samples=stride, channels=channels)
    return [geom.grid_box_to_timefreq(b) for b in connected_components(mask)]


def detections_to_json(boxes_grid, geometry: GridGeometry,
                       noise_model: NoiseModel | None = None,
                       record: str | None = None) -> dict:
    """Detections document: grid boxes, absolute boxes, geometry, noise fit."""
    doc = {
        "record": record,
        "grid": {
            "step_stride_samples": geometry.step_stride_samples,
            "channels": geometry.channels,
            "channel_width": geometry.channel_width,
        },
        "boxes_grid": [b.to_dict() for b in boxes_grid],
        "boxes": [geometry.grid_box_to_timefreq(b).to_dict() for b in boxes_grid],
    }
    if noise_model is not None:
        doc["noise_model"] = noise_model.to_dict()
    return doc


def dump_debug_mask(grid: DetectionGrid, noise_model: NoiseModel, stem):
    """Write the decision mask as SGM1 plus a noise-model JSON sidecar."""
    stem = Path(stem)
    if grid.mask is None:
        raise InvalidArgumentError("grid has no mask; apply a threshold first")
    write_mask(stem.with_suffix(".sgm1"), grid.mask)
    stem.with_suffix(".noise.json").write_text(
        json.dumps(noise_model.to_dict(), indent=2) + "\n"
    )
