"""Objective functions on sampled pulses: PMEPR, PSLR and ISLR.

PSLR and ISLR are computed on the aperiodic autocorrelation with the
mainlobe (|tau| < 1/B) excluded. ISLR sums sidelobe *magnitudes*, not powers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .waveform import DegenerateInputError, SampledPulse


def to_db(ratio):
    """Power ratio to dB."""
    return 10.0 * np.log10(ratio)


def amplitude_to_db(ratio):
    """Amplitude ratio (PSLR, ISLR) to dB."""
    return 20.0 * np.log10(ratio)


@dataclass(frozen=True)
class ObjectiveVector:
    pmepr_db: float
    pslr_db: float = float("nan")
    islr_db: float = float("nan")

    def as_tuple(self, n_objectives: int = 3) -> tuple[float, ...]:
        return (self.pmepr_db, self.pslr_db, self.islr_db)[:n_objectives]


@dataclass(frozen=True)
class AutocorrOutput:
    """R[m] for m = -(M-1)..(M-1); ``values[M-1]`` is the zero lag."""

    values: np.ndarray
    lag_period: float

    @property
    def lags(self) -> np.ndarray:
        m = (len(self.values) + 1) // 2
        return np.arange(-(m - 1), m)

    @property
    def peak(self) -> complex:
        return self.values[(len(self.values) - 1) // 2]


def autocorrelation_batch(x: np.ndarray) -> np.ndarray:
    """Aperiodic autocorrelation along the last axis via zero-padded FFT."""
    x = np.asarray(x, dtype=complex)
    m = x.shape[-1]
    nfft = 1 << (2 * m - 1).bit_length()
    spec = np.fft.fft(x, n=nfft, axis=-1)
    r = np.fft.ifft(spec * spec.conj(), axis=-1)
    return np.concatenate([r[..., nfft - (m - 1):], r[..., :m]], axis=-1)


def autocorrelation(pulse: SampledPulse) -> AutocorrOutput:
    if len(pulse) == 0:
        raise DegenerateInputError("empty pulse")
    return AutocorrOutput(autocorrelation_batch(pulse.samples), pulse.sample_period)


def pmepr_batch(x: np.ndarray) -> np.ndarray:
    p = np.abs(np.asarray(x)) ** 2
    mean = p.mean(axis=-1)
    if np.any(mean <= 0):
        raise DegenerateInputError("zero-energy pulse")
    return p.max(axis=-1) / mean


def pmepr(pulse: SampledPulse) -> float:
    """Peak-to-mean envelope power ratio (linear), mean over every sample."""
    if len(pulse) == 0:
        raise DegenerateInputError("empty pulse")
    return float(pmepr_batch(pulse.samples))


def mainlobe_halfwidth(lag_period: float, bandwidth: float) -> int:
    """Smallest lag index m with |m| * lag_period >= 1/B."""
    if not bandwidth > 0:
        raise ValueError("bandwidth must be > 0")
    # tolerance keeps an exact boundary lag (rho samples at rho*B) on the included side
    return max(1, math.ceil(1.0 / (bandwidth * lag_period) - 1e-9))


def _sidelobe_mags(r: np.ndarray, halfwidth: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (|R[0]|, one-sided sidelobe magnitudes for m >= halfwidth)."""
    m = (r.shape[-1] + 1) // 2
    if halfwidth > m - 1:
        raise DegenerateInputError("no autocorrelation lags outside the mainlobe")
    mags = np.abs(r)
    return mags[..., m - 1], mags[..., m - 1 + halfwidth:]


def sidelobe_ratios_batch(r: np.ndarray, halfwidth: int) -> tuple[np.ndarray, np.ndarray]:
    """(PSLR, ISLR) as linear ratios for autocorrelations along the last axis.

    |R[-m]| = |R[m]|, so both sides are folded into one: the ISLR sum counts
    each positive lag twice.
    """
    peak, side = _sidelobe_mags(r, halfwidth)
    return side.max(axis=-1) / peak, 2.0 * side.sum(axis=-1) / peak


def pslr(acf: AutocorrOutput, bandwidth: float) -> float:
    h = mainlobe_halfwidth(acf.lag_period, bandwidth)
    return float(sidelobe_ratios_batch(acf.values, h)[0])


def islr(acf: AutocorrOutput, bandwidth: float) -> float:
    h = mainlobe_halfwidth(acf.lag_period, bandwidth)
    return float(sidelobe_ratios_batch(acf.values, h)[1])


def objectives(pulse: SampledPulse, bandwidth: float, with_sidelobes: bool = True) -> ObjectiveVector:
    """All three objectives in dB for one pulse."""
    pm = to_db(pmepr(pulse))
    if not with_sidelobes:
        return ObjectiveVector(float(pm))
    acf = autocorrelation(pulse)
    return ObjectiveVector(float(pm), float(amplitude_to_db(pslr(acf, bandwidth))),
                           float(amplitude_to_db(islr(acf, bandwidth))))
