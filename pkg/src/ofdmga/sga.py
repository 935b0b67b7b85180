"""Canonical single-objective genetic algorithm over binary chromosomes.

One generation: evaluate, replace the weakest chromosome by a copy of the
strongest, pair everyone up at random, one-point crossover each pair, and on
odd generations flip one random gene in ``mutation_count`` offspring.
Fitness is minimized (PMEPR in dB by default).
"""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .encoding import decode_batch
from .metrics import pmepr_batch, to_db
from .waveform import OfdmParams, PhaseCodeMatrix, synthesize_batch

FitnessFn = Callable[[OfdmParams, np.ndarray], np.ndarray]


def pmepr_fitness(params: OfdmParams, phases: np.ndarray) -> np.ndarray:
    """PMEPR in dB of every phase matrix in a (L, N, K) batch."""
    return to_db(pmepr_batch(synthesize_batch(params, phases)))


@dataclass
class SgaConfig:
    population_size: int = 22
    mutation_count: int = 5
    q: int = 18
    # None: converged once the mean is within mean_margin_db of the current best
    mean_fitness_threshold: float | None = None
    mean_margin_db: float = 0.1
    std_threshold: float = 0.05
    max_generations: int = 5000
    rng_seed: int | None = None
    threads: int = 1

    def validate(self):
        L = self.population_size
        if L < 2 or L % 2:
            raise ValueError("population_size must be even and >= 2")
        if not 0 <= self.mutation_count <= L:
            raise ValueError("mutation_count must lie in 0..population_size")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        if self.std_threshold < 0:
            raise ValueError("std_threshold must be >= 0")


@dataclass
class SgaTrace:
    generation: list[int] = field(default_factory=list)
    best_db: list[float] = field(default_factory=list)
    mean_db: list[float] = field(default_factory=list)
    std_db: list[float] = field(default_factory=list)
    best_ever_db: list[float] = field(default_factory=list)
    converged: bool = False

    def append(self, g: int, fitness: np.ndarray, best_ever: float):
        self.generation.append(g)
        self.best_db.append(float(fitness.min()))
        self.mean_db.append(float(fitness.mean()))
        self.std_db.append(float(fitness.std()))
        self.best_ever_db.append(best_ever)

    def __len__(self) -> int:
        return len(self.generation)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["generation", "best_db", "mean_db", "std_db"])
            for row in zip(self.generation, self.best_db, self.mean_db, self.std_db):
                w.writerow([row[0]] + [f"{v:.4f}" for v in row[1:]])


@dataclass
class SgaResult:
    best: PhaseCodeMatrix
    best_genes: np.ndarray
    best_fitness_db: float
    trace: SgaTrace

    @property
    def converged(self) -> bool:
        return self.trace.converged

    def __iter__(self):
        # allows ``best, trace = run_sga(...)``
        return iter((self.best, self.trace))


def _evaluate(fitness: FitnessFn, params: OfdmParams, phases: np.ndarray, threads: int) -> np.ndarray:
    if threads <= 1 or len(phases) < 2 * threads:
        return np.asarray(fitness(params, phases), dtype=float)
    chunks = np.array_split(phases, threads)
    with ThreadPoolExecutor(threads) as pool:
        parts = list(pool.map(lambda c: fitness(params, c), chunks))
    return np.concatenate(parts).astype(float)


def one_point_crossover(a: np.ndarray, b: np.ndarray, cut: int) -> tuple[np.ndarray, np.ndarray]:
    return (np.concatenate([a[:cut], b[cut:]]), np.concatenate([b[:cut], a[cut:]]))


def breed(population: np.ndarray, fitness: np.ndarray, generation: int,
          mutation_count: int, rng: np.random.Generator) -> np.ndarray:
    """Steps 5-9 of one generation: returns the next population of bit strings."""
    L, Q = population.shape
    inter = population.copy()
    # argmin/argmax break ties on the lowest index
    inter[np.argmax(fitness)] = population[np.argmin(fitness)]

    order = rng.permutation(L)
    cuts = rng.integers(1, max(Q - 1, 1) + 1, size=L // 2)
    offspring = np.empty_like(inter)
    for i, cut in enumerate(cuts):
        a, b = inter[order[2 * i]], inter[order[2 * i + 1]]
        offspring[2 * i], offspring[2 * i + 1] = one_point_crossover(a, b, cut)

    if generation % 2 == 1 and mutation_count:
        who = rng.choice(L, size=mutation_count, replace=False)
        loci = rng.integers(0, Q, size=mutation_count)
        offspring[who, loci] ^= 1
    return offspring


def run_sga(params: OfdmParams, cfg: SgaConfig | None = None,
            fitness: FitnessFn = pmepr_fitness) -> SgaResult:
    """Minimize ``fitness`` over phase codes for the pulse frame ``params``.

    The population itself follows the canonical loop; the best chromosome
    ever evaluated is archived on the side and returned.
    """
    cfg = cfg or SgaConfig()
    cfg.validate()
    n, k, q = params.n_subcarriers, params.n_symbols, cfg.q
    L, Q = cfg.population_size, n * k * q
    rng = np.random.default_rng(cfg.rng_seed)

    population = rng.integers(0, 2, size=(L, Q), dtype=np.uint8)
    trace = SgaTrace()
    best_genes, best_fit = None, np.inf

    for g in range(1, cfg.max_generations + 1):
        fit = _evaluate(fitness, params, decode_batch(population, n, k, q), cfg.threads)
        i = int(np.argmin(fit))
        if fit[i] < best_fit:
            best_fit, best_genes = float(fit[i]), population[i].copy()
        trace.append(g, fit, best_fit)

        mean_limit = (fit.min() + cfg.mean_margin_db if cfg.mean_fitness_threshold is None
                      else cfg.mean_fitness_threshold)
        if fit.mean() <= mean_limit and fit.std() <= cfg.std_threshold:
            trace.converged = True
            break
        if g == cfg.max_generations:
            break
        population = breed(population, fit, g, cfg.mutation_count, rng)

    best = PhaseCodeMatrix(decode_batch(best_genes, n, k, q))
    return SgaResult(best, best_genes, best_fit, trace)
