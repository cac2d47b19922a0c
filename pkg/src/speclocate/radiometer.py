"""Channelized radiometer: statistic grid, noise bootstrap, CFAR threshold.

A step of the radiometer takes integration_n consecutive non-overlapping
frames of channels_c samples, applies a unitary DFT per frame and sums the
squared magnitudes per frequency channel, so adjacent steps share no input
samples. Channel 0 is the lowest frequency (DC-centered ordering).

The noise bootstrap histograms the statistics (Rice rule bin count), pins a
bell curve's center and height to the histogram mode, and fits its width by
gradient descent on the mean-squared error over the first 2k bins. Two CFAR
quantile policies turn a fitted noise model into a threshold:

  - "gaussian": mode + sigma * z(FAR), the normal upper quantile on the
    fitted curve. On an integration-2 radiometer the noise statistic is far
    from normal (it is a gamma variate), so the realized false-alarm rate
    lands well above the configured one (~0.3 at FAR 0.05).
  - "matched": same histogram and mode-pinned bulk fit, but against the
    gamma family the integrate-square statistic actually follows; its inverse
    survival function hits the configured false-alarm rate empirically.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.fft
from scipy import optimize
from scipy import stats as spstats

from .errors import (
    DegenerateHistogramError,
    InsufficientInputError,
    InvalidArgumentError,
)

MIN_HISTOGRAM_STATS = 64


@dataclass
class RadiometerConfig:
    channels_c: int = 256
    integration_n: int = 2
    false_alarm_rate: float = 0.05

    def validate(self):
        c = self.channels_c
        if c < 2 or (c & (c - 1)) != 0:
            raise InvalidArgumentError(f"channels_c must be a power of two, got {c}")
        if self.integration_n < 1:
            raise InvalidArgumentError(
                f"integration_n must be >= 1, got {self.integration_n}"
            )
        if not 0.0 < self.false_alarm_rate < 0.5:
            raise InvalidArgumentError(
                f"false_alarm_rate must be in (0, 0.5), got {self.false_alarm_rate}"
            )

    @property
    def step_stride_samples(self) -> int:
        return self.channels_c * self.integration_n


@dataclass
class DetectionGrid:
    """2-D statistic grid [steps x channels] plus an optional decision mask."""

    stats: np.ndarray
    step_stride_samples: int
    mask: np.ndarray | None = None
    threshold: float | None = None

    @property
    def steps(self) -> int:
        return self.stats.shape[0]

    @property
    def channels(self) -> int:
        return self.stats.shape[1]


@dataclass
class NoiseModel:
    """Mode-pinned bulk fit of the statistic histogram plus its threshold."""

    mode_mu: float
    sigma: float
    histogram_bins: int
    fit_mse: float
    threshold: float | None = None
    gamma_scale: float | None = field(default=None)

    def validate(self):
        if self.sigma <= 0:
            raise InvalidArgumentError(f"sigma must be > 0, got {self.sigma}")

    def to_dict(self) -> dict:
        return {
            "mode_mu": self.mode_mu,
            "sigma": self.sigma,
            "histogram_bins": self.histogram_bins,
            "fit_mse": self.fit_mse,
            "threshold": self.threshold,
            "gamma_scale": self.gamma_scale,
        }


def channelize_integrate(samples: np.ndarray, cfg: RadiometerConfig) -> DetectionGrid:
    """Compute the statistic grid for a sample stream. Trailing samples that
    do not fill a whole step are discarded. The unitary transform makes the
    grid's total equal the consumed input energy."""
    cfg.validate()
    stride = cfg.step_stride_samples
    if len(samples) < stride:
        raise InsufficientInputError(
            f"need at least {stride} samples, got {len(samples)}"
        )
    steps = len(samples) // stride
    frames = np.asarray(samples)[: steps * stride].reshape(
        steps * cfg.integration_n, cfg.channels_c
    )
    spec = scipy.fft.fft(frames, axis=-1)
    power = spec.real ** 2 + spec.imag ** 2
    raw = power.reshape(steps, cfg.integration_n, cfg.channels_c) \
               .sum(axis=1, dtype=np.float64)
    raw /= cfg.channels_c  # unitary DFT normalization
    # rotate so channel 0 is the lowest frequency (DC-centered ordering)
    half = cfg.channels_c // 2
    stats = np.empty_like(raw)
    stats[:, :half] = raw[:, half:]
    stats[:, half:] = raw[:, :half]
    return DetectionGrid(stats=stats, step_stride_samples=stride)


def rice_bin_count(n: int) -> int:
    """Rice rule: ceil(2 * n**(1/3)) histogram bins for n data points."""
    if n < 1:
        raise InvalidArgumentError("need at least one statistic")
    return int(math.ceil(2.0 * float(n) ** (1.0 / 3.0) - 1e-9))


def build_statistic_histogram(stats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Equal-width histogram of the statistics over [0, max], Rice-rule bins.

    Returns (bin_edges, counts). Requires at least MIN_HISTOGRAM_STATS values.
    """
    flat = np.asarray(stats, dtype=np.float64).ravel()
    if flat.size < MIN_HISTOGRAM_STATS:
        raise InsufficientInputError(
            f"need >= {MIN_HISTOGRAM_STATS} statistics, got {flat.size}"
        )
    top = float(flat.max())
    if top <= 0.0:
        raise DegenerateHistogramError("all statistics are zero")
    counts, edges = np.histogram(flat, bins=rice_bin_count(flat.size),
                                 range=(0.0, top))
    return edges, counts


def _mode_window(bin_edges: np.ndarray, counts: np.ndarray):
    centers = 0.5 * (bin_edges[:-1] + bin_edges[1:])
    k = int(np.argmax(counts))
    if k < 2:
        raise DegenerateHistogramError(
            f"histogram mode at bin {k}; input is signal-dominated or empty"
        )
    return centers, k


def fit_noise_gaussian(bin_edges: np.ndarray, counts: np.ndarray) -> NoiseModel:
    """Fit a mode-pinned bell curve to the first 2k histogram bins.

    The center is the mode bin's center and the height the mode bin's count;
    only the width is free. Gradient descent on the MSE, initialized from the
    half-width at half maximum of the retained bins.
    """
    centers, k = _mode_window(bin_edges, counts)
    mode_mu = float(centers[k])
    amp = float(counts[k])
    xs = centers[:2 * k]
    ys = counts[:2 * k].astype(np.float64)
    width = float(bin_edges[1] - bin_edges[0])

    half_idx = np.nonzero(ys >= amp / 2.0)[0]
    hwhm = max(float(xs[half_idx[-1]] - mode_mu), width) if half_idx.size else width
    sigma = hwhm / math.sqrt(2.0 * math.log(2.0))

    d2 = (xs - mode_mu) ** 2

    def mse(s: float) -> float:
        model = amp * np.exp(-d2 / (2.0 * s * s))
        return float(np.mean((model - ys) ** 2))

    def grad(s: float) -> float:
        e = np.exp(-d2 / (2.0 * s * s))
        return float(np.mean(2.0 * (amp * e - ys) * amp * e * d2) / s ** 3)

    cur = mse(sigma)
    g = grad(sigma)
    lr = 0.1 * width / (abs(g) + 1e-300)
    for _ in range(500):
        step = lr * g
        cand = sigma - step
        if cand <= 0.0 or mse(cand) >= cur:
            lr *= 0.5
            if lr * abs(g) < 1e-15 * sigma:
                break
            continue
        converged = abs(cand - sigma) < 1e-9 * sigma
        sigma = cand
        cur = mse(sigma)
        g = grad(sigma)
        lr *= 1.2
        if converged:
            break

    return NoiseModel(mode_mu=mode_mu, sigma=float(sigma),
                      histogram_bins=len(counts), fit_mse=cur)


def fit_noise_gamma(bin_edges: np.ndarray, counts: np.ndarray,
                    integration_n: int) -> float:
    """Fit the gamma bulk the integrate-square noise statistic follows.

    Same mode-pinned, height-matched construction as the bell-curve fit, but
    the model is the gamma pdf with shape == integration_n and a free scale.
    Returns the fitted scale. Requires integration_n >= 2 (shape-1 gamma has
    its mode at zero, which the histogram bootstrap cannot anchor).
    """
    if integration_n < 2:
        raise DegenerateHistogramError(
            "matched fit needs integration_n >= 2 (statistic mode at zero)"
        )
    centers, k = _mode_window(bin_edges, counts)
    mode_mu = float(centers[k])
    amp = float(counts[k])
    xs = centers[:2 * k]
    ys = counts[:2 * k].astype(np.float64)

    def mse(scale: float) -> float:
        peak = spstats.gamma.pdf(mode_mu, a=integration_n, scale=scale)
        if peak <= 0.0:
            return float("inf")
        model = amp * spstats.gamma.pdf(xs, a=integration_n, scale=scale) / peak
        return float(np.mean((model - ys) ** 2))

    mode_scale = mode_mu / (integration_n - 1)
    res = optimize.minimize_scalar(
        mse, bounds=(mode_scale / 5.0, mode_scale * 5.0), method="bounded",
        options={"xatol": 1e-10 * mode_scale},
    )
    return float(res.x)


def cfar_threshold(mode_mu: float, sigma: float, false_alarm_rate: float) -> float:
    """Normal upper-quantile threshold on the fitted curve:
    P(X > threshold) == false_alarm_rate for X ~ N(mode_mu, sigma)."""
    if sigma <= 0:
        raise InvalidArgumentError(f"sigma must be > 0, got {sigma}")
    if not 0.0 < false_alarm_rate <= 0.5:
        raise InvalidArgumentError(
            f"false_alarm_rate must be in (0, 0.5], got {false_alarm_rate}"
        )
    return float(mode_mu + sigma * spstats.norm.isf(false_alarm_rate))


def gamma_cfar_threshold(scale: float, integration_n: int,
                         false_alarm_rate: float) -> float:
    """Matched-statistic threshold: inverse survival of the fitted gamma."""
    if scale <= 0:
        raise InvalidArgumentError(f"scale must be > 0, got {scale}")
    if not 0.0 < false_alarm_rate <= 0.5:
        raise InvalidArgumentError(
            f"false_alarm_rate must be in (0, 0.5], got {false_alarm_rate}"
        )
    return float(spstats.gamma.isf(false_alarm_rate, a=integration_n, scale=scale))


def fit_noise_model(grid_stats: np.ndarray, cfg: RadiometerConfig,
                    policy: str = "matched") -> NoiseModel:
    """Histogram + bulk fit + threshold in one step, per the chosen policy."""
    edges, counts = build_statistic_histogram(grid_stats)
    model = fit_noise_gaussian(edges, counts)
    if policy == "matched":
        scale = fit_noise_gamma(edges, counts, cfg.integration_n)
        model.gamma_scale = scale
        model.threshold = gamma_cfar_threshold(scale, cfg.integration_n,
                                               cfg.false_alarm_rate)
    elif policy == "gaussian":
        model.threshold = cfar_threshold(model.mode_mu, model.sigma,
                                         cfg.false_alarm_rate)
    else:
        raise InvalidArgumentError(f"unknown threshold policy {policy!r}")
    return model


def apply_threshold(grid: DetectionGrid, threshold: float) -> DetectionGrid:
    """Return a grid whose mask marks statistics strictly above threshold."""
    mask = grid.stats > threshold
    return replace(grid, mask=mask, threshold=float(threshold))
