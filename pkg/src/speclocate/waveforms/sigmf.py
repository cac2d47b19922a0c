"""SigMF-style record I/O: detached JSON metadata beside int16 IQ data.

A record is stored as two files: `<stem>.sigmf-meta` (JSON) and
`<stem>.sigmf-data` (interleaved I,Q signed 16-bit little-endian). Records are
scaled on write so the peak magnitude maps to 0.8 * 32767 and the scale factor
is kept in the metadata, making float-domain power recoverable after the
round trip.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ClippingError, ConsistencyError, ParseError

DATATYPE = "ci16_le"
PEAK_FRACTION = 0.8
INT16_MAX = 32767
META_SUFFIX = ".sigmf-meta"
DATA_SUFFIX = ".sigmf-data"
_SCALE_KEY = "speclocate:scale_factor"


@dataclass
class SigmfAnnotation:
    """Time-frequency extent and label of one burst."""

    sample_start: int
    sample_count: int
    freq_lower_edge: float
    freq_upper_edge: float
    label: str

    def to_dict(self) -> dict:
        return {
            "core:sample_start": self.sample_start,
            "core:sample_count": self.sample_count,
            "core:freq_lower_edge": self.freq_lower_edge,
            "core:freq_upper_edge": self.freq_upper_edge,
            "core:label": self.label,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SigmfAnnotation":
        try:
            return cls(
                sample_start=int(d["core:sample_start"]),
                sample_count=int(d["core:sample_count"]),
                freq_lower_edge=float(d["core:freq_lower_edge"]),
                freq_upper_edge=float(d["core:freq_upper_edge"]),
                label=str(d.get("core:label", "")),
            )
        except KeyError as exc:
            raise ParseError(f"annotation missing required key {exc}") from exc


@dataclass
class SigmfRecord:
    """Complex samples plus their annotations and global metadata."""

    samples: np.ndarray
    annotations: list[SigmfAnnotation] = field(default_factory=list)
    sample_rate: float = 1.0
    scale_factor: float | None = None

    def __len__(self) -> int:
        return len(self.samples)


def write_sigmf(record: SigmfRecord, path_stem, scale_factor: float | None = None):
    """Write `<stem>.sigmf-meta` and `<stem>.sigmf-data`.

    With scale_factor=None the record's stored scale factor is reused when
    present (bit-exact round trips); otherwise the peak is mapped to
    0.8 * 32767. An explicit scale factor that pushes samples past int16 full
    scale raises ClippingError.
    """
    stem = Path(path_stem)
    samples = np.asarray(record.samples, dtype=np.complex128)

    if scale_factor is None:
        scale_factor = record.scale_factor
    if scale_factor is None:
        peak = float(np.max(np.abs(samples))) if len(samples) else 0.0
        scale_factor = PEAK_FRACTION * INT16_MAX / peak if peak > 0 else 1.0

    i = np.round(samples.real * scale_factor)
    q = np.round(samples.imag * scale_factor)
    top = max(np.max(np.abs(i)), np.max(np.abs(q))) if len(samples) else 0.0
    if top > INT16_MAX:
        raise ClippingError(
            f"scaled samples reach {int(top)}, beyond int16 full scale {INT16_MAX}"
        )

    interleaved = np.empty(2 * len(samples), dtype="<i2")
    interleaved[0::2] = i.astype("<i2")
    interleaved[1::2] = q.astype("<i2")

    meta = {
        "global": {
            "core:datatype": DATATYPE,
            "core:sample_rate": record.sample_rate,
            "core:version": "1.0.0",
            _SCALE_KEY: scale_factor,
        },
        "captures": [{"core:sample_start": 0}],
        "annotations": [a.to_dict() for a in record.annotations],
    }
    stem.with_suffix(stem.suffix + META_SUFFIX).write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n"
    )
    stem.with_suffix(stem.suffix + DATA_SUFFIX).write_bytes(interleaved.tobytes())
    record.scale_factor = scale_factor


def read_sigmf(path_stem) -> SigmfRecord:
    """Read a record pair written by write_sigmf. Unknown metadata keys are
    ignored; truncated or mis-sized data raises ConsistencyError."""
    stem = Path(path_stem)
    meta_path = stem.with_suffix(stem.suffix + META_SUFFIX)
    data_path = stem.with_suffix(stem.suffix + DATA_SUFFIX)

    try:
        meta = json.loads(meta_path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{meta_path}: {exc}") from exc

    glob = meta.get("global")
    if not isinstance(glob, dict):
        raise ParseError(f"{meta_path}: missing 'global' object")
    datatype = glob.get("core:datatype")
    if datatype != DATATYPE:
        raise ParseError(f"{meta_path}: unsupported datatype {datatype!r}")
    scale = float(glob.get(_SCALE_KEY, 1.0))
    if scale <= 0:
        raise ParseError(f"{meta_path}: non-positive scale factor {scale}")

    raw = data_path.read_bytes()
    if len(raw) % 4 != 0:
        raise ConsistencyError(
            f"{data_path}: {len(raw)} bytes is not a whole number of IQ pairs"
        )
    interleaved = np.frombuffer(raw, dtype="<i2")
    samples = (interleaved[0::2].astype(np.float64)
               + 1j * interleaved[1::2].astype(np.float64)) / scale

    annotations = [SigmfAnnotation.from_dict(a)
                   for a in meta.get("annotations", [])]
    for a in annotations:
        if a.sample_start < 0 or a.sample_start + a.sample_count > len(samples):
            raise ConsistencyError(
                f"annotation [{a.sample_start}, "
                f"{a.sample_start + a.sample_count}) outside record of "
                f"{len(samples)} samples"
            )

    return SigmfRecord(
        samples=samples,
        annotations=annotations,
        sample_rate=float(glob.get("core:sample_rate", 1.0)),
        scale_factor=scale,
    )
