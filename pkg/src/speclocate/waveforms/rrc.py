"""Root-raised-cosine pulse shaping filter design."""

import numpy as np

from ..errors import InvalidArgumentError


def design_rrc(beta: float, sps: int, span_symbols: int) -> np.ndarray:
    """Design a unit-energy root-raised-cosine FIR filter.

    beta is the roll-off in [0, 1], sps the samples per symbol (>= 2) and
    span_symbols the filter length in symbols (>= 4). Returns an odd-length
    symmetric tap vector with sum(taps**2) == 1 so that a matched-filter
    cascade has unit gain at the ideal sampling instant.
    """
    if not 0.0 <= beta <= 1.0:
        raise InvalidArgumentError(f"beta must be in [0, 1], got {beta}")
    if int(sps) != sps or sps < 2:
        raise InvalidArgumentError(f"sps must be an integer >= 2, got {sps}")
    if int(span_symbols) != span_symbols or span_symbols < 4:
        raise InvalidArgumentError(
            f"span_symbols must be an integer >= 4, got {span_symbols}"
        )
    sps = int(sps)
    span_symbols = int(span_symbols)

    n_taps = span_symbols * sps + 1
    # symbol-unit time axis, symmetric about 0
    t = (np.arange(n_taps) - (n_taps - 1) / 2) / sps
    taps = np.empty(n_taps, dtype=np.float64)

    for i, ti in enumerate(t):
        if abs(ti) < 1e-12:
            taps[i] = 1.0 - beta + 4.0 * beta / np.pi
        elif beta > 0.0 and abs(abs(ti) - 1.0 / (4.0 * beta)) < 1e-9:
            # removable singularity of the generic branch
            taps[i] = (beta / np.sqrt(2.0)) * (
                (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * beta))
                + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * beta))
            )
        else:
            num = np.sin(np.pi * ti * (1.0 - beta)) + 4.0 * beta * ti * np.cos(
                np.pi * ti * (1.0 + beta)
            )
            den = np.pi * ti * (1.0 - (4.0 * beta * ti) ** 2)
            taps[i] = num / den

    # enforce exact symmetry against accumulated rounding
    taps = 0.5 * (taps + taps[::-1])
    return taps / np.sqrt(np.sum(taps * taps))
