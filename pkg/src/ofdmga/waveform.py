"""Baseband OFDM pulse synthesis.

A pulse is K rectangular symbols stacked back to back, each symbol being the
inverse DFT of its weighted phase-code vector. Subcarrier n sits at frequency
n * delta_f (n = 0..N-1), so the spectrum occupies [0, B).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

TWO_PI = 2.0 * np.pi


class DegenerateInputError(ValueError):
    """Raised when an input leaves nothing to compute on (zero energy, empty pulse)."""


@dataclass(frozen=True)
class OfdmParams:
    n_subcarriers: int
    n_symbols: int = 1
    bandwidth: float = 1.0
    oversampling: int = 20
    mask: np.ndarray | None = field(default=None, repr=False)
    weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.n_subcarriers < 1 or self.n_symbols < 1:
            raise ValueError("n_subcarriers and n_symbols must be >= 1")
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be > 0")
        if int(self.oversampling) != self.oversampling or self.oversampling < 1:
            raise ValueError("oversampling must be an integer >= 1")
        n = self.n_subcarriers
        mask = np.ones(n, dtype=bool) if self.mask is None else np.asarray(self.mask, dtype=bool)
        weights = np.ones(n) if self.weights is None else np.asarray(self.weights, dtype=float)
        if mask.shape != (n,):
            raise ValueError(f"mask must have length {n}, got shape {mask.shape}")
        if weights.shape != (n,):
            raise ValueError(f"weights must have length {n}, got shape {weights.shape}")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite and non-negative")
        mask.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "oversampling", int(self.oversampling))

    @property
    def subcarrier_spacing(self) -> float:
        return self.bandwidth / self.n_subcarriers

    @property
    def bit_duration(self) -> float:
        return 1.0 / self.subcarrier_spacing

    @property
    def pulse_duration(self) -> float:
        return self.n_symbols * self.bit_duration

    @property
    def sample_period(self) -> float:
        return 1.0 / (self.oversampling * self.bandwidth)

    @property
    def n_samples(self) -> int:
        return self.oversampling * self.n_subcarriers * self.n_symbols

    @property
    def n_active(self) -> int:
        return int(self.mask.sum())

    @property
    def spectrum_amplitudes(self) -> np.ndarray:
        """Per-subcarrier amplitude mask[n] * w[n]."""
        return np.where(self.mask, self.weights, 0.0)

    def with_(self, **changes) -> "OfdmParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class PhaseCodeMatrix:
    """N x K grid of phases in radians; the codes are exp(j * phase)."""

    phases: np.ndarray

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=float)
        if ph.ndim == 1:
            ph = ph[:, None]
        if ph.ndim != 2:
            raise ValueError("phases must be an N x K array")
        ph = np.mod(ph, TWO_PI)
        # mod can round up to exactly 2*pi for tiny negative inputs
        ph[ph >= TWO_PI] = 0.0
        ph.setflags(write=False)
        object.__setattr__(self, "phases", ph)

    @property
    def shape(self) -> tuple[int, int]:
        return self.phases.shape

    @property
    def codes(self) -> np.ndarray:
        return np.exp(1j * self.phases)


@dataclass(frozen=True)
class SampledPulse:
    samples: np.ndarray
    sample_period: float

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=complex))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.sample_period)


def synthesize_batch(params: OfdmParams, phases: np.ndarray) -> np.ndarray:
    """Synthesize many pulses at once.

    ``phases`` has shape (..., N, K); returns complex samples of shape
    (..., rho * N * K). Zero-padding each symbol spectrum to rho*N bins before
    the inverse DFT gives the band-limited interpolation of the continuous pulse.
    """
    n, k, rho = params.n_subcarriers, params.n_symbols, params.oversampling
    phases = np.asarray(phases, dtype=float)
    if phases.shape[-2:] != (n, k):
        raise ValueError(f"phase codes must have shape (..., {n}, {k}), got {phases.shape}")
    amp = params.spectrum_amplitudes
    if not np.any(amp > 0):
        raise DegenerateInputError("all subcarriers are masked off or zero-weighted")
    spectrum = amp[:, None] * np.exp(1j * phases)
    # numpy's ifft carries 1/M; undo it and apply the 1/sqrt(N) pulse scaling
    m = rho * n
    sym = np.fft.ifft(spectrum, n=m, axis=-2) * (m / math.sqrt(n))
    # (..., rho*N, K) -> (..., K, rho*N) -> symbols concatenated in order
    return np.swapaxes(sym, -1, -2).reshape(phases.shape[:-2] + (m * k,))


def synthesize_pulse(params: OfdmParams, codes: PhaseCodeMatrix) -> SampledPulse:
    if codes.shape != (params.n_subcarriers, params.n_symbols):
        raise ValueError(
            f"code matrix is {codes.shape}, expected {(params.n_subcarriers, params.n_symbols)}"
        )
    return SampledPulse(synthesize_batch(params, codes.phases), params.sample_period)


def pulse_spectrum(pulse: SampledPulse, params: OfdmParams, symbol: int = 0) -> np.ndarray:
    """Recover the discrete OFDM spectrum X[n] = w_n a_n / sqrt(N) of one symbol."""
    n, rho = params.n_subcarriers, params.oversampling
    seg = pulse.samples[symbol * rho * n:(symbol + 1) * rho * n]
    return np.fft.fft(seg)[:n] / (rho * n)


def apply_mask(params: OfdmParams, fraction_active: float = 1.0, rng_seed=None,
               active: list[int] | np.ndarray | None = None) -> OfdmParams:
    """Return ``params`` with a sparse set of active subcarriers.

    Either ``ceil(fraction_active * N)`` subcarriers are drawn uniformly at
    random (seeded), or an explicit list of ``active`` indices is used.
    """
    n = params.n_subcarriers
    if active is not None:
        idx = np.asarray(active, dtype=int)
        if idx.size == 0 or idx.min() < 0 or idx.max() >= n:
            raise ValueError("active indices must be a non-empty subset of 0..N-1")
        mask = np.zeros(n, dtype=bool)
        mask[idx] = True
        return params.with_(mask=mask)
    if not fraction_active > 0 or fraction_active > 1:
        raise ValueError("fraction_active must be in (0, 1]")
    n_on = math.ceil(round(fraction_active * n, 9))
    if n_on >= n:
        return params.with_(mask=np.ones(n, dtype=bool))
    rng = np.random.default_rng(rng_seed)
    mask = np.zeros(n, dtype=bool)
    mask[rng.choice(n, size=n_on, replace=False)] = True
    return params.with_(mask=mask)
