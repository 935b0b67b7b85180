"""Real-coded NSGA-II over phase codes.

Objectives (all minimized, in dB): PMEPR, PSLR and optionally ISLR.
Phases are circular variables, so SBX works on the shortest arc between the
two parents and every offspring is wrapped back into [0, 2*pi).
"""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .metrics import (ObjectiveVector, amplitude_to_db, autocorrelation_batch, mainlobe_halfwidth,
                      pmepr_batch, sidelobe_ratios_batch, to_db)
from .waveform import TWO_PI, OfdmParams, PhaseCodeMatrix, synthesize_batch

OBJECTIVE_NAMES = ("pmepr_db", "pslr_db", "islr_db")


def evaluate_objectives(params: OfdmParams, phases: np.ndarray, with_sidelobes: bool = True) -> np.ndarray:
    """Objective matrix (L, 3) in dB for a batch of (L, N, K) phase matrices.

    Without sidelobes the autocorrelation is skipped and the PSLR/ISLR
    columns are NaN.
    """
    x = synthesize_batch(params, phases)
    out = np.full(x.shape[:-1] + (3,), np.nan)
    out[..., 0] = to_db(pmepr_batch(x))
    if with_sidelobes:
        h = mainlobe_halfwidth(params.sample_period, params.bandwidth)
        ps, isl = sidelobe_ratios_batch(autocorrelation_batch(x), h)
        out[..., 1] = amplitude_to_db(ps)
        out[..., 2] = amplitude_to_db(isl)
    return out


def dominates(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    return bool(np.all(a <= b) and np.any(a < b))


def dominance_matrix(objs: np.ndarray) -> np.ndarray:
    """D[i, j] is True when i dominates j."""
    a = objs[:, None, :]
    b = objs[None, :, :]
    return np.all(a <= b, axis=-1) & np.any(a < b, axis=-1)


def non_dominated_sort(objs) -> list[list[int]]:
    """Partition indices into successive non-dominated fronts (minimization)."""
    objs = np.asarray(objs, dtype=float)
    if objs.size == 0:
        return []
    if objs.ndim == 1:
        objs = objs[:, None]
    dom = dominance_matrix(objs)
    count = dom.sum(axis=0)
    fronts = []
    current = np.flatnonzero(count == 0)
    while current.size:
        fronts.append(current.tolist())
        count = count - dom[current].sum(axis=0)
        count[current] = -1
        current = np.flatnonzero(count == 0)
    return fronts


def crowding_distance(front_objs) -> np.ndarray:
    objs = np.asarray(front_objs, dtype=float)
    if objs.ndim == 1:
        objs = objs[:, None]
    n, d = objs.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for j in range(d):
        order = np.argsort(objs[:, j], kind="stable")
        col = objs[order, j]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = col[-1] - col[0]
        if span > 0:
            dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def rank_and_crowd(objs: np.ndarray) -> tuple[np.ndarray, np.ndarray, list[list[int]]]:
    """Front rank (1-based) and crowding distance for every row of ``objs``."""
    fronts = non_dominated_sort(objs)
    rank = np.empty(len(objs), dtype=int)
    crowd = np.empty(len(objs))
    for r, idx in enumerate(fronts, start=1):
        rank[idx] = r
        crowd[idx] = crowding_distance(objs[idx])
    return rank, crowd, fronts


def hypervolume(points, reference) -> float:
    """Dominated hypervolume of ``points`` w.r.t. ``reference`` (minimization).

    Exact slicing over the last objective; points not strictly better than
    the reference in every coordinate contribute nothing.
    """
    pts = np.asarray(points, dtype=float)
    ref = np.asarray(reference, dtype=float)
    if pts.size == 0:
        return 0.0
    pts = pts.reshape(-1, ref.size)
    pts = pts[np.all(pts < ref, axis=1)]
    if len(pts) == 0:
        return 0.0
    if ref.size == 1:
        return float(ref[0] - pts[:, 0].min())
    if ref.size == 2:
        pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
        vol, best_y = 0.0, ref[1]
        for x, y in pts:
            if y < best_y:
                vol += (ref[0] - x) * (best_y - y)
                best_y = y
        return float(vol)
    order = np.argsort(pts[:, -1], kind="stable")
    pts = pts[order]
    vol = 0.0
    for i in range(len(pts)):
        upper = pts[i + 1, -1] if i + 1 < len(pts) else ref[-1]
        depth = upper - pts[i, -1]
        if depth > 0:
            vol += depth * hypervolume(pts[:i + 1, :-1], ref[:-1])
    return float(vol)


def scalarized_objective(alpha: float, beta: float, gamma: float, objs: ObjectiveVector) -> float:
    """Weighted sum alpha*PMEPR + beta*PSLR + gamma*ISLR in dB; zero weights skip their term."""
    total = 0.0
    for wgt, val in zip((alpha, beta, gamma), (objs.pmepr_db, objs.pslr_db, objs.islr_db)):
        if wgt:
            total += wgt * val
    return float(total)


def scalarized_fitness(alpha: float, beta: float = 0.0, gamma: float = 0.0):
    """Batch fitness for :func:`ofdmga.sga.run_sga` built on the weighted sum."""
    weights = np.array([alpha, beta, gamma], dtype=float)

    def fitness(params: OfdmParams, phases: np.ndarray) -> np.ndarray:
        objs = evaluate_objectives(params, phases, with_sidelobes=bool(beta or gamma))
        used = weights != 0
        return objs[..., used] @ weights[used]

    return fitness


@dataclass
class Individual:
    phases: np.ndarray
    objectives: ObjectiveVector
    rank: int
    crowding: float

    @property
    def codes(self) -> PhaseCodeMatrix:
        return PhaseCodeMatrix(self.phases)


@dataclass
class MooConfig:
    population_size: int = 40
    generations: int = 500
    n_objectives: int = 2
    eta_c: float = 15.0
    eta_m: float = 20.0
    # None: 1 / (N K)
    mutation_prob: float | None = None
    crossover_prob: float = 0.9
    rng_seed: int | None = None
    threads: int = 1
    checkpoints: tuple[int, ...] = ()

    def validate(self):
        L = self.population_size
        if L < 4 or L % 2:
            raise ValueError("population_size must be even and >= 4")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.n_objectives not in (2, 3):
            raise ValueError("n_objectives must be 2 or 3")
        if self.eta_c < 0 or self.eta_m < 0:
            raise ValueError("distribution indices must be >= 0")
        if self.mutation_prob is not None and not 0 <= self.mutation_prob <= 1:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if not 0 <= self.crossover_prob <= 1:
            raise ValueError("crossover_prob must lie in [0, 1]")


@dataclass
class MooTrace:
    reference: np.ndarray
    hypervolume: list[float] = field(default_factory=list)
    front_size: list[int] = field(default_factory=list)
    snapshots: dict[int, list[Individual]] = field(default_factory=dict)


@dataclass
class MooResult:
    front: list[Individual]
    population: list[Individual]
    trace: MooTrace

    def __iter__(self):
        return iter((self.front, self.trace))

    def front_objectives(self, n_objectives: int | None = None) -> np.ndarray:
        cols = n_objectives or 3
        return np.array([ind.objectives.as_tuple(cols) for ind in self.front])


def wrap_phase(x: np.ndarray) -> np.ndarray:
    x = np.mod(x, TWO_PI)
    x[x >= TWO_PI] = 0.0
    return x


def sbx_crossover(p1: np.ndarray, p2: np.ndarray, eta: float, prob: float,
                  rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover on circular variables.

    Each variable of a crossed pair is recombined with probability 1/2 along
    the shortest arc from p1 to p2.
    """
    c1, c2 = p1.copy(), p2.copy()
    if rng.random() >= prob:
        return c1, c2
    x1 = p1
    x2 = p1 + (np.mod(p2 - p1 + np.pi, TWO_PI) - np.pi)
    u = rng.random(p1.shape)
    beta = np.where(u <= 0.5, (2 * u) ** (1 / (eta + 1)), (1 / (2 * (1 - u))) ** (1 / (eta + 1)))
    swap = rng.random(p1.shape) < 0.5
    y1 = 0.5 * ((1 + beta) * x1 + (1 - beta) * x2)
    y2 = 0.5 * ((1 - beta) * x1 + (1 + beta) * x2)
    c1 = np.where(swap, y1, x1)
    c2 = np.where(swap, y2, x2)
    return wrap_phase(c1), wrap_phase(c2)


def polynomial_mutation(x: np.ndarray, eta: float, prob: float, rng: np.random.Generator) -> np.ndarray:
    """Polynomial mutation with the full 2*pi period as the variable span."""
    hit = rng.random(x.shape) < prob
    u = rng.random(x.shape)
    delta = np.where(u < 0.5, (2 * u) ** (1 / (eta + 1)) - 1, 1 - (2 * (1 - u)) ** (1 / (eta + 1)))
    return wrap_phase(np.where(hit, x + delta * TWO_PI, x))


def tournament(rank: np.ndarray, crowd: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Binary tournaments: lower rank wins, then larger crowding, then a coin flip."""
    a = rng.integers(0, len(rank), size)
    b = rng.integers(0, len(rank), size)
    coin = rng.random(size) < 0.5
    a_wins = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (
        (crowd[a] > crowd[b]) | ((crowd[a] == crowd[b]) & coin)))
    return np.where(a_wins, a, b)


def environmental_selection(objs: np.ndarray, size: int) -> np.ndarray:
    """Indices of the best ``size`` rows by (rank, descending crowding)."""
    keep: list[int] = []
    for idx in non_dominated_sort(objs):
        if len(keep) + len(idx) <= size:
            keep.extend(idx)
            continue
        cd = crowding_distance(objs[idx])
        order = np.argsort(-cd, kind="stable")
        keep.extend(np.asarray(idx)[order[:size - len(keep)]].tolist())
        break
    return np.asarray(keep, dtype=int)


def make_offspring(phases: np.ndarray, rank: np.ndarray, crowd: np.ndarray, cfg: MooConfig,
                   mut_prob: float, rng: np.random.Generator) -> np.ndarray:
    """L offspring from mating rounds, each on a fresh L/2 tournament pool."""
    L = cfg.population_size
    pool_size = L // 2
    children = []
    while len(children) < L:
        pool = tournament(rank, crowd, pool_size, rng)
        for i in range(0, pool_size, 2):
            j = i + 1 if i + 1 < pool_size else int(rng.integers(0, pool_size - 1))
            c1, c2 = sbx_crossover(phases[pool[i]], phases[pool[j]], cfg.eta_c, cfg.crossover_prob, rng)
            children.append(polynomial_mutation(c1, cfg.eta_m, mut_prob, rng))
            children.append(polynomial_mutation(c2, cfg.eta_m, mut_prob, rng))
    return np.stack(children[:L])


def _evaluate(params: OfdmParams, phases: np.ndarray, threads: int) -> np.ndarray:
    if threads <= 1 or len(phases) < 2 * threads:
        return evaluate_objectives(params, phases)
    with ThreadPoolExecutor(threads) as pool:
        parts = list(pool.map(lambda c: evaluate_objectives(params, c), np.array_split(phases, threads)))
    return np.concatenate(parts)


def _individuals(phases, objs, rank, crowd) -> list[Individual]:
    return [Individual(phases[i].copy(), ObjectiveVector(*map(float, objs[i])), int(rank[i]), float(crowd[i]))
            for i in range(len(phases))]


def run_nsga2(params: OfdmParams, cfg: MooConfig | None = None, reference=None) -> MooResult:
    """Evolve phase codes for ``cfg.generations`` generations and return the rank-1 front.

    ``reference`` fixes the hypervolume reference point; by default it is the
    worst initial value of each objective plus 1 dB.
    """
    cfg = cfg or MooConfig()
    cfg.validate()
    n, k = params.n_subcarriers, params.n_symbols
    L, d = cfg.population_size, cfg.n_objectives
    mut_prob = cfg.mutation_prob if cfg.mutation_prob is not None else 1.0 / (n * k)
    rng = np.random.default_rng(cfg.rng_seed)

    phases = rng.uniform(0.0, TWO_PI, size=(L, n, k))
    objs = _evaluate(params, phases, cfg.threads)
    rank, crowd, fronts = rank_and_crowd(objs[:, :d])

    ref = np.asarray(reference, dtype=float) if reference is not None else objs[:, :d].max(axis=0) + 1.0
    trace = MooTrace(ref)

    def record(g):
        first = objs[rank == 1, :d]
        trace.hypervolume.append(hypervolume(first, ref))
        trace.front_size.append(len(first))
        if g in cfg.checkpoints:
            trace.snapshots[g] = _individuals(phases, objs, rank, crowd)

    record(0)
    for g in range(1, cfg.generations + 1):
        kids = make_offspring(phases, rank, crowd, cfg, mut_prob, rng)
        kid_objs = _evaluate(params, kids, cfg.threads)
        all_phases = np.concatenate([phases, kids])
        all_objs = np.concatenate([objs, kid_objs])
        keep = environmental_selection(all_objs[:, :d], L)
        phases, objs = all_phases[keep], all_objs[keep]
        rank, crowd, fronts = rank_and_crowd(objs[:, :d])
        record(g)

    population = _individuals(phases, objs, rank, crowd)
    front = [ind for ind in population if ind.rank == 1]
    return MooResult(front, population, trace)


def write_front_csv(path, individuals: list[Individual]):
    """One row per individual: id, phase_0.., pmepr_db, pslr_db, islr_db, rank, crowding."""
    if not individuals:
        n_ph = 0
    else:
        n_ph = individuals[0].phases.size
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id"] + [f"phase_{i}" for i in range(n_ph)] + list(OBJECTIVE_NAMES) + ["rank", "crowding"])
        for i, ind in enumerate(individuals):
            # phases flattened subcarrier-fastest within each symbol
            ph = ind.phases.T.reshape(-1)
            w.writerow([i] + [f"{v:.10f}" for v in ph]
                       + [f"{v:.4f}" for v in ind.objectives.as_tuple()]
                       + [ind.rank, "inf" if np.isinf(ind.crowding) else f"{ind.crowding:.6f}"])
