"""Pulse-frame calculators driven by the radar scenario.

All functions take the speed of light as a keyword so that tabulated values
computed with c = 3e8 can be reproduced exactly.
"""
from __future__ import annotations

import math

SPEED_OF_LIGHT = 299_792_458.0


def bandwidth_from_extent(range_extent: float, margin: float, c: float = SPEED_OF_LIGHT) -> float:
    """Bandwidth whose range cell c/2B spans the target extent plus margin."""
    span = range_extent + margin
    if not span > 0:
        raise ValueError("range_extent + margin must be > 0")
    return c / (2.0 * span)


def max_pulse_length(r_min: float, c: float = SPEED_OF_LIGHT) -> float:
    """Longest pulse that keeps the eclipsed zone inside r_min."""
    if not r_min > 0:
        raise ValueError("r_min must be > 0")
    return 2.0 * r_min / c


def max_subcarriers(bandwidth: float, r_min: float, c: float = SPEED_OF_LIGHT) -> int:
    """Single-symbol subcarrier limit floor(2 B r_min / c)."""
    if not bandwidth > 0 or not r_min > 0:
        raise ValueError("bandwidth and r_min must be > 0")
    # tolerance absorbs float error on exact integer results, e.g. 2*50e6*1500/3e8
    return int(math.floor(2.0 * bandwidth * r_min / c + 1e-9))


def range_cell(bandwidth: float, c: float = SPEED_OF_LIGHT) -> float:
    return c / (2.0 * bandwidth)
