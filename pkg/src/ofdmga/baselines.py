"""Deterministic and random reference phase codes."""
from __future__ import annotations

import numpy as np

from .waveform import TWO_PI, PhaseCodeMatrix


def newman_phases(n: int) -> PhaseCodeMatrix:
    """Newman phasing theta_n = pi (n-1)^2 / N for n = 1..N, single symbol."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = np.arange(n, dtype=float)
    return PhaseCodeMatrix((np.pi * idx**2 / n)[:, None])


def uncoded(n: int, k: int = 1) -> PhaseCodeMatrix:
    return PhaseCodeMatrix(np.zeros((n, k)))


def random_phases(n: int, k: int = 1, q: int | None = None, seed=None) -> PhaseCodeMatrix:
    """Uniform random phases on the 2**q grid, or continuous on [0, 2*pi) if q is None."""
    rng = np.random.default_rng(seed)
    if q is None:
        return PhaseCodeMatrix(rng.uniform(0.0, TWO_PI, size=(n, k)))
    levels = 1 << q
    return PhaseCodeMatrix(rng.integers(0, levels, size=(n, k)) * (TWO_PI / levels))
