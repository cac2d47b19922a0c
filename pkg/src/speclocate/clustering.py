"""Binary decision masks to signal bounding boxes.

Two paths produce boxes from a mask:

  - cluster_spectrogram: density-seeded rectangle growth. Core bins (enough
    passing neighbors) seed axis-aligned rectangles that expand one strip at
    a time, cycling forward-in-time, lower-in-frequency, backward-in-time,
    upper-in-frequency. A strip is kept when its fill fraction meets the
    threshold; a rejected direction is retried on later cycles, and growth
    stops when a full cycle rejects all four directions. Unlike plain density
    clustering, a one-bin bridge cannot weld two dense masses into one box.
  - connected_components: plain 8-connected labeling, one bounding box per
    component (the segmentation-mask path).

filter_detections optionally merges fully-contained boxes and drops tiny
ones; both filters are off by default so baseline curves stay uncorrected.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidArgumentError

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None


@dataclass
class ClusterParams:
    min_neighbors: int = 5
    metric: str = "l2"          # "l1" or "l2" neighborhood on the grid
    radius: float = math.sqrt(2.0)
    fill_ratio: float = 0.5

    def validate(self):
        if self.min_neighbors < 1:
            raise InvalidArgumentError("min_neighbors must be >= 1")
        if self.metric not in ("l1", "l2"):
            raise InvalidArgumentError(f"metric must be 'l1' or 'l2', got {self.metric}")
        if self.radius <= 0:
            raise InvalidArgumentError("radius must be > 0")
        if not 0.0 < self.fill_ratio <= 1.0:
            raise InvalidArgumentError("fill_ratio must be in (0, 1]")

    def neighborhood_offsets(self) -> list[tuple[int, int]]:
        r = int(math.floor(self.radius + 1e-9))
        offsets = []
        for di in range(-r, r + 1):
            for dj in range(-r, r + 1):
                if di == 0 and dj == 0:
                    continue
                if self.metric == "l1":
                    if abs(di) + abs(dj) <= self.radius + 1e-9:
                        offsets.append((di, dj))
                else:
                    if di * di + dj * dj <= self.radius ** 2 + 1e-9:
                        offsets.append((di, dj))
        return offsets


@dataclass(frozen=True)
class GridBox:
    """Inclusive index rectangle [t_lo..t_hi] x [f_lo..f_hi] on the grid."""

    t_lo: int
    t_hi: int
    f_lo: int
    f_hi: int

    def __post_init__(self):
        if self.t_lo > self.t_hi or self.f_lo > self.f_hi:
            raise InvalidArgumentError(f"degenerate GridBox {self}")

    @property
    def area_bins(self) -> int:
        return (self.t_hi - self.t_lo + 1) * (self.f_hi - self.f_lo + 1)

    def contains(self, other: "GridBox") -> bool:
        return (self.t_lo <= other.t_lo and self.t_hi >= other.t_hi
                and self.f_lo <= other.f_lo and self.f_hi >= other.f_hi)

    def contains_point(self, t: int, f: int) -> bool:
        return self.t_lo <= t <= self.t_hi and self.f_lo <= f <= self.f_hi

    def to_dict(self) -> dict:
        return {"t_lo": self.t_lo, "t_hi": self.t_hi,
                "f_lo": self.f_lo, "f_hi": self.f_hi}


def find_core_points(mask: np.ndarray, params: ClusterParams | None = None) -> np.ndarray:
    """Boolean grid of core bins: passing bins with at least min_neighbors
    passing bins in their neighborhood."""
    params = params or ClusterParams()
    params.validate()
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise InvalidArgumentError("mask must be 2-D")
    m = mask.view(np.uint8)
    counts = np.zeros_like(m)
    n_t, n_f = m.shape
    for di, dj in params.neighborhood_offsets():
        src_t = slice(max(0, di), n_t + min(0, di))
        src_f = slice(max(0, dj), n_f + min(0, dj))
        dst_t = slice(max(0, -di), n_t + min(0, -di))
        dst_f = slice(max(0, -dj), n_f + min(0, -dj))
        counts[dst_t, dst_f] += m[src_t, src_f]
    return mask & (counts >= params.min_neighbors)


def _integral_image(mask: np.ndarray) -> np.ndarray:
    ii = np.zeros((mask.shape[0] + 1, mask.shape[1] + 1), dtype=np.int32)
    mask.view(np.uint8).cumsum(axis=0, dtype=np.int32).cumsum(
        axis=1, dtype=np.int32, out=ii[1:, 1:]
    )
    return ii


def _grow_rectangle_py(ii, n_t, n_f, t, f, fill_ratio):
    t_lo = t_hi = t
    f_lo = f_hi = f
    while True:
        rejections = 0
        # forward in time
        accept = False
        if t_hi + 1 < n_t:
            strip = ii[t_hi + 2, f_hi + 1] - ii[t_hi + 1, f_hi + 1] \
                - ii[t_hi + 2, f_lo] + ii[t_hi + 1, f_lo]
            accept = strip >= fill_ratio * (f_hi - f_lo + 1)
        if accept:
            t_hi += 1
        else:
            rejections += 1
        # lower in frequency
        accept = False
        if f_lo >= 1:
            strip = ii[t_hi + 1, f_lo] - ii[t_lo, f_lo] \
                - ii[t_hi + 1, f_lo - 1] + ii[t_lo, f_lo - 1]
            accept = strip >= fill_ratio * (t_hi - t_lo + 1)
        if accept:
            f_lo -= 1
        else:
            rejections += 1
        # backward in time
        accept = False
        if t_lo >= 1:
            strip = ii[t_lo, f_hi + 1] - ii[t_lo - 1, f_hi + 1] \
                - ii[t_lo, f_lo] + ii[t_lo - 1, f_lo]
            accept = strip >= fill_ratio * (f_hi - f_lo + 1)
        if accept:
            t_lo -= 1
        else:
            rejections += 1
        # upper in frequency
        accept = False
        if f_hi + 1 < n_f:
            strip = ii[t_hi + 1, f_hi + 2] - ii[t_lo, f_hi + 2] \
                - ii[t_hi + 1, f_hi + 1] + ii[t_lo, f_hi + 1]
            accept = strip >= fill_ratio * (t_hi - t_lo + 1)
        if accept:
            f_hi += 1
        else:
            rejections += 1
        if rejections == 4:
            return t_lo, t_hi, f_lo, f_hi


if numba is not None:
    _grow_rectangle = numba.njit(cache=True)(_grow_rectangle_py)
else:  # pragma: no cover
    _grow_rectangle = _grow_rectangle_py


def cluster_spectrogram(mask: np.ndarray, core_points: np.ndarray,
                        params: ClusterParams | None = None) -> list[GridBox]:
    """Grow one rectangle per unconsumed core point, row-major order.

    Core points falling inside a finished rectangle are consumed and never
    seed their own. Output boxes may overlap; contained-merge is the remedy.
    """
    params = params or ClusterParams()
    params.validate()
    mask = np.asarray(mask, dtype=bool)
    cores = np.asarray(core_points, dtype=bool)
    if cores.shape != mask.shape:
        raise InvalidArgumentError("core grid shape differs from mask shape")
    if np.any(cores & ~mask):
        raise InvalidArgumentError("core points must be passing bins")

    if not np.any(cores):
        return []
    ii = _integral_image(mask)
    n_t, n_f = mask.shape
    # work copy: cores inside a finished box are cleared so they never seed.
    # row-major scan via argmax over the flat remainder; the next unconsumed
    # core always lies at or after the previous one, so total scan cost is
    # linear in the grid size.
    remaining = cores.copy()
    flat = remaining.reshape(-1)
    boxes: list[GridBox] = []
    pos = 0
    while pos < flat.size:
        step = int(np.argmax(flat[pos:]))
        idx = pos + step
        if not flat[idx]:
            break
        t, f = divmod(idx, n_f)
        t_lo, t_hi, f_lo, f_hi = _grow_rectangle(
            ii, n_t, n_f, t, f, params.fill_ratio
        )
        boxes.append(GridBox(int(t_lo), int(t_hi), int(f_lo), int(f_hi)))
        remaining[t_lo:t_hi + 1, f_lo:f_hi + 1] = False
        pos = idx + 1
    return boxes


def connected_components(mask: np.ndarray) -> list[GridBox]:
    """Bounding boxes of the 8-connected components of the passing bins."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise InvalidArgumentError("mask must be 2-D")
    labels, n = ndimage.label(mask, structure=np.ones((3, 3), dtype=np.int32))
    boxes = []
    for sl_t, sl_f in ndimage.find_objects(labels):
        boxes.append(GridBox(sl_t.start, sl_t.stop - 1, sl_f.start, sl_f.stop - 1))
    return boxes


@dataclass
class DetectionFilters:
    """Optional precision repair; both stages default off so baseline scores
    reproduce the uncorrected curves."""

    contained_merge: bool = False
    min_area: int = 0

    def validate(self):
        if self.min_area < 0:
            raise InvalidArgumentError("min_area must be >= 0")


def filter_detections(boxes: list[GridBox],
                      filters: DetectionFilters | None = None) -> list[GridBox]:
    """Apply contained-merge then the minimum-area drop, preserving order."""
    filters = filters or DetectionFilters()
    filters.validate()
    out = list(boxes)

    if filters.contained_merge and len(out) > 1:
        t_lo = np.array([b.t_lo for b in out])
        t_hi = np.array([b.t_hi for b in out])
        f_lo = np.array([b.f_lo for b in out])
        f_hi = np.array([b.f_hi for b in out])
        area = (t_hi - t_lo + 1) * (f_hi - f_lo + 1)
        order = np.arange(len(out))
        keep = np.ones(len(out), dtype=bool)
        for i in range(len(out)):
            covers = ((t_lo <= t_lo[i]) & (t_hi >= t_hi[i])
                      & (f_lo <= f_lo[i]) & (f_hi >= f_hi[i]))
            covers[i] = False
            # absorbed by any strictly larger cover, or an earlier identical box
            if np.any(covers & ((area > area[i]) | (order < i) & (area == area[i]))):
                keep[i] = False
        out = [b for b, k in zip(out, keep) if k]

    if filters.min_area > 0:
        out = [b for b in out if b.area_bins >= filters.min_area]
    return out
