"""Slow, independent reference computations used only by the tests.

Nothing here touches the FFT paths of the library.
"""
import itertools

import numpy as np


def direct_pulse(phases, weights=None, mask=None, oversampling=1):
    """Evaluate the multicarrier sum directly at t = p * t_b / (rho * N).

    x(t) = N^-1/2 sum_n w_n a_{n,k} exp(j 2 pi n t / t_b) inside symbol k.
    """
    phases = np.asarray(phases, dtype=float)
    if phases.ndim == 1:
        phases = phases[:, None]
    n, k = phases.shape
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if mask is not None:
        w = np.where(mask, w, 0.0)
    per_symbol = oversampling * n
    out = []
    for kk in range(k):
        for p in range(per_symbol):
            t = p / per_symbol  # in units of t_b
            acc = 0j
            for nn in range(n):
                acc += w[nn] * np.exp(1j * phases[nn, kk]) * np.exp(2j * np.pi * nn * t)
            out.append(acc / np.sqrt(n))
    return np.array(out)


def direct_autocorrelation(x):
    """R[m] = sum_p x[p] conj(x[p-m]) for m = -(M-1)..M-1 by double loop."""
    x = list(x)
    M = len(x)
    out = []
    for m in range(-(M - 1), M):
        acc = 0j
        for p in range(M):
            if 0 <= p - m < M:
                acc += x[p] * np.conj(x[p - m])
        out.append(acc)
    return np.array(out)


def brute_pslr_islr(r, halfwidth):
    """Scan every lag, keep those with |m| >= halfwidth."""
    M = (len(r) + 1) // 2
    peak = abs(r[M - 1])
    side = [abs(r[i]) for i in range(len(r)) if abs(i - (M - 1)) >= halfwidth]
    return max(side) / peak, sum(side) / peak


def brute_fronts(objs):
    """Fronts by repeatedly removing the set of points nobody remaining dominates."""
    objs = [tuple(o) for o in objs]
    remaining = list(range(len(objs)))

    def dom(a, b):
        return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))

    fronts = []
    while remaining:
        front = [i for i in remaining if not any(dom(objs[j], objs[i]) for j in remaining if j != i)]
        fronts.append(sorted(front))
        remaining = [i for i in remaining if i not in front]
    return fronts


def exhaustive_best_pmepr_db(n, k, q, oversampling):
    """Minimum PMEPR (dB) over every code on the 2**q grid, via direct summation."""
    levels = 1 << q
    best = np.inf
    for combo in itertools.product(range(levels), repeat=n * k):
        # block b -> subcarrier b % n, symbol b // n
        ph = np.array(combo, dtype=float).reshape(k, n).T * (2 * np.pi / levels)
        x = direct_pulse(ph, oversampling=oversampling)
        p = np.abs(x) ** 2
        best = min(best, 10 * np.log10(p.max() / p.mean()))
    return best
