"""CSV readers/writers for phase codes and subcarrier weights."""
from __future__ import annotations

import csv

import numpy as np

from .waveform import PhaseCodeMatrix


def write_codes_csv(path, codes: PhaseCodeMatrix):
    n, k = codes.shape
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["subcarrier", "symbol", "phase_rad"])
        for kk in range(k):
            for nn in range(n):
                w.writerow([nn, kk, f"{codes.phases[nn, kk]:.12f}"])


def read_codes_csv(path, n: int | None = None, k: int | None = None) -> PhaseCodeMatrix:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no phase codes")
    try:
        sub = np.array([int(r["subcarrier"]) for r in rows])
        sym = np.array([int(r["symbol"]) for r in rows])
        ph = np.array([float(r["phase_rad"]) for r in rows])
    except KeyError as exc:
        raise ValueError(f"{path}: missing column {exc}") from None
    n = n or int(sub.max()) + 1
    k = k or int(sym.max()) + 1
    if len(rows) != n * k or sub.max() >= n or sym.max() >= k:
        raise ValueError(f"{path}: expected a complete {n} x {k} code grid")
    phases = np.zeros((n, k))
    phases[sub, sym] = ph
    return PhaseCodeMatrix(phases)


def write_weights_csv(path, weights, mask=None):
    weights = np.asarray(weights, dtype=float)
    mask = np.ones(weights.size, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["subcarrier", "weight", "active"])
        for i, (wt, on) in enumerate(zip(weights, mask)):
            w.writerow([i, f"{wt:.12f}", int(on)])


def read_weights_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Returns (weights, mask); a missing ``active`` column means all active."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no weights")
    order = np.argsort([int(r["subcarrier"]) for r in rows])
    weights = np.array([float(r["weight"]) for r in rows])[order]
    if "active" in rows[0]:
        mask = np.array([int(r["active"]) != 0 for r in rows])[order]
    else:
        mask = np.ones(len(rows), dtype=bool)
    return weights, mask
