"""Binary chromosome <-> phase matrix mapping and population sizing.

A chromosome holds Q = N*K*q bits. Each q-bit block is a big-endian unsigned
integer v decoding to the phase 2*pi*v / 2**q. Blocks run subcarrier-fastest:
block b belongs to subcarrier b % N of symbol b // N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .waveform import TWO_PI, PhaseCodeMatrix


@dataclass
class Chromosome:
    genes: np.ndarray
    fitness: float | None = None

    def __post_init__(self):
        self.genes = np.asarray(self.genes, dtype=np.uint8)

    def __len__(self) -> int:
        return len(self.genes)


def _place_values(q: int) -> np.ndarray:
    return (1 << np.arange(q - 1, -1, -1)).astype(np.int64)


def decode_batch(genes: np.ndarray, n: int, k: int, q: int) -> np.ndarray:
    """Decode bit arrays of shape (..., N*K*q) into phases of shape (..., N, K)."""
    genes = np.asarray(genes)
    if genes.shape[-1] != n * k * q:
        raise ValueError(f"expected {n * k * q} genes, got {genes.shape[-1]}")
    blocks = genes.reshape(genes.shape[:-1] + (k, n, q)).astype(np.int64)
    values = blocks @ _place_values(q)
    return np.swapaxes(values, -1, -2) * (TWO_PI / (1 << q))


def decode(chrom: Chromosome, n: int, k: int, q: int) -> PhaseCodeMatrix:
    return PhaseCodeMatrix(decode_batch(chrom.genes, n, k, q))


def encode(codes: PhaseCodeMatrix, q: int) -> Chromosome:
    """Quantize each phase to the nearest point of the 2**q grid and pack bits."""
    levels = 1 << q
    values = np.rint(codes.phases * (levels / TWO_PI)).astype(np.int64) % levels
    # symbol-major blocks, subcarrier fastest
    flat = values.T.reshape(-1)
    bits = (flat[:, None] >> np.arange(q - 1, -1, -1)) & 1
    return Chromosome(bits.reshape(-1).astype(np.uint8))


def coverage_probability(Q: int, L: int) -> float:
    """Probability that every locus carries both alleles in L random chromosomes."""
    return (1.0 - 0.5 ** L) ** Q


def population_size_for_coverage(Q: int, P: float, rounding: str = "ceil") -> int:
    """Population size L for which (1 - 2**-L)**Q reaches P.

    ``rounding="ceil"`` returns the smallest L that actually meets P.
    ``rounding="nearest"`` rounds the real-valued solution to the nearest
    integer instead, which is how approximate sizing rules are usually quoted
    (Q=9000, P=0.999 gives 23 rather than 24).
    """
    if not 0 < P < 1:
        raise ValueError("P must lie in (0, 1)")
    if Q < 1:
        raise ValueError("Q must be >= 1")
    # expm1 keeps precision when P**(1/Q) is within 1e-8 of 1
    exact = -math.log2(-math.expm1(math.log(P) / Q))
    if rounding == "nearest":
        return max(1, round(exact))
    if rounding != "ceil":
        raise ValueError(f"unknown rounding {rounding!r}")
    L = max(1, math.ceil(exact))
    # guard the float boundary on both sides
    while L > 1 and coverage_probability(Q, L - 1) >= P:
        L -= 1
    while coverage_probability(Q, L) < P:
        L += 1
    return L
