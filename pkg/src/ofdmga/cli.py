"""Command-line experiment driver.

Every subcommand writes header-first CSV files with a fixed column order.
All randomness flows from --seed, so a repeated command reproduces its
outputs byte for byte. A JSON file passed with --config may supply any flag
(keys are flag names, dashes or underscores); flags given on the command line
take precedence.

Exit codes: 0 success, 1 numerical/data failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import baselines, design_rules
from .detection import TargetModel, reflectivity_spectrum, two_step_design
from .io import read_codes_csv, read_weights_csv, write_codes_csv, write_weights_csv
from .metrics import objectives
from .moo import MooConfig, evaluate_objectives, run_nsga2, write_front_csv
from .sga import SgaConfig, run_sga
from .waveform import DegenerateInputError, OfdmParams, apply_mask, synthesize_pulse


class UsageError(Exception):
    pass


def _fmt_db(v: float) -> str:
    return f"{v:.4f}"


def _threads(n: int) -> int:
    return (os.cpu_count() or 1) if n == 0 else max(1, n)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _print_rows(header, rows):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _frame(args, n, k) -> OfdmParams:
    params = OfdmParams(n, k, args.bandwidth, args.oversampling)
    if args.sparsity is not None and args.sparsity < 1:
        params = apply_mask(params, args.sparsity, args.seed)
    return params


# -- subcommands -------------------------------------------------------------

def cmd_design(args):
    _require(args, "range_extent", "margin", "rmin")
    c = args.c
    B = design_rules.bandwidth_from_extent(args.range_extent, args.margin, c)
    nmax = design_rules.max_subcarriers(B, args.rmin, c)
    tp = design_rules.max_pulse_length(args.rmin, c)
    print(f"B={B / 1e6:g} MHz, Nmax={nmax}, tp={tp * 1e6:g}us")
    if args.out:
        _write_rows(_outdir(args) / "design.csv", ["bandwidth_hz", "n_max", "pulse_length_s"],
                    [[f"{B:.6f}", nmax, f"{tp:.12g}"]])


def cmd_optimize_pmepr(args):
    _require(args, "n")
    params = _frame(args, args.n, args.k)
    cfg = SgaConfig(population_size=args.population, mutation_count=args.mutations, q=args.q,
                    mean_fitness_threshold=args.mean_threshold, std_threshold=args.std_threshold,
                    max_generations=args.max_generations, rng_seed=args.seed,
                    threads=_threads(args.threads))
    result = run_sga(params, cfg)
    out = _outdir(args)
    result.trace.write_csv(out / "trace.csv")
    write_codes_csv(out / "best_codes.csv", result.best)
    write_weights_csv(out / "mask.csv", params.weights, params.mask)
    rows = [[args.n, args.k, args.q, params.n_active, _fmt_db(result.best_fitness_db),
             len(result.trace), int(result.converged)]]
    header = ["n", "k", "q", "n_active", "pmepr_db", "generations", "converged"]
    _write_rows(out / "summary.csv", header, rows)
    _print_rows(header, rows)


def cmd_optimize_moo(args):
    _require(args, "n")
    params = _frame(args, args.n, args.k)
    checkpoints = tuple(int(g) for g in args.checkpoints.split(",") if g.strip()) if args.checkpoints else ()
    cfg = MooConfig(population_size=args.population, generations=args.generations,
                    n_objectives=args.objectives, eta_c=args.eta_c, eta_m=args.eta_m,
                    mutation_prob=args.mutation_prob, rng_seed=args.seed,
                    threads=_threads(args.threads), checkpoints=checkpoints)
    result = run_nsga2(params, cfg)
    out = _outdir(args)
    write_front_csv(out / "front.csv", result.front)
    for g, snap in sorted(result.trace.snapshots.items()):
        write_front_csv(out / f"checkpoint_gen{g:06d}.csv", snap)
    _write_rows(out / "hypervolume.csv", ["generation", "hypervolume", "front_size"],
                [[g, f"{hv:.9f}", s] for g, (hv, s) in
                 enumerate(zip(result.trace.hypervolume, result.trace.front_size))])
    if args.cloud:
        # `cloud` random populations of the GA population size
        rng = np.random.default_rng([args.seed, 1])
        ph = rng.uniform(0, 2 * np.pi, (args.cloud * args.population, args.n, args.k))
        objs = evaluate_objectives(params, ph)
        _write_rows(out / "random_cloud.csv", ["id", "pmepr_db", "pslr_db", "islr_db"],
                    [[i] + [_fmt_db(v) for v in row] for i, row in enumerate(objs)])
    _print_rows(["front_size", "generations", "hypervolume"],
                [[len(result.front), args.generations, f"{result.trace.hypervolume[-1]:.6f}"]])


def cmd_baseline(args):
    _require(args, "kind", "n")
    k = args.k
    if args.kind == "newman":
        if k != 1:
            raise UsageError("newman phasing is defined for a single symbol (--k 1)")
        codes = baselines.newman_phases(args.n)
    elif args.kind == "uncoded":
        codes = baselines.uncoded(args.n, k)
    else:
        codes = baselines.random_phases(args.n, k, args.q, seed=args.seed)
    params = _frame(args, args.n, k)
    obj = objectives(synthesize_pulse(params, codes), params.bandwidth)
    if args.out:
        out = _outdir(args)
        write_codes_csv(out / "codes.csv", codes)
        write_weights_csv(out / "mask.csv", params.weights, params.mask)
    _print_rows(["kind", "n", "k", "n_active", "pmepr_db", "pslr_db", "islr_db"],
                [[args.kind, args.n, k, params.n_active] + [_fmt_db(v) for v in obj.as_tuple()]])


def cmd_detect(args):
    _require(args, "n")
    if args.target_file:
        target = TargetModel.read_csv(args.target_file)
    else:
        target = TargetModel.synthetic(args.scatterers, seed=args.seed)
    cfg = SgaConfig(q=args.q, max_generations=args.max_generations, rng_seed=args.seed,
                    threads=_threads(args.threads))
    design = two_step_design(target, args.fc, args.bandwidth, args.n, cfg, oversampling=args.oversampling,
                             floor=args.floor)
    out = _outdir(args)
    target.write_csv(out / "target.csv")
    reflectivity_spectrum(target, args.fc, args.bandwidth, args.n).write_csv(out / "spectrum.csv")
    write_weights_csv(out / "weights.csv", design.weights)
    write_codes_csv(out / "codes.csv", design.codes)
    design.trace.write_csv(out / "trace.csv")
    r = design.report
    header = ["n_subcarriers", "snr_gain_db", "pmepr_before_db", "pmepr_random_median_db",
              "pmepr_after_db", "generations", "converged"]
    rows = [[r["n_subcarriers"], _fmt_db(r["snr_gain_db"]), _fmt_db(r["pmepr_before_db"]),
             _fmt_db(r["pmepr_random_median_db"]), _fmt_db(r["pmepr_after_db"]),
             r["generations"], int(r["converged"])]]
    _write_rows(out / "report.csv", header, rows)
    _print_rows(header, rows)


def cmd_eval(args):
    _require(args, "codes_file")
    codes = read_codes_csv(args.codes_file, args.n, args.k)
    n, k = codes.shape
    if args.weights_file:
        weights, mask = read_weights_csv(args.weights_file)
        params = OfdmParams(n, k, args.bandwidth, args.oversampling, mask=mask, weights=weights)
    else:
        params = OfdmParams(n, k, args.bandwidth, args.oversampling)
    obj = objectives(synthesize_pulse(params, codes), params.bandwidth)
    _print_rows(["pmepr_db", "pslr_db", "islr_db"], [[_fmt_db(v) for v in obj.as_tuple()]])


# -- parser ------------------------------------------------------------------

def _common(p, out_default=".", bandwidth=10e6):
    p.add_argument("--config", help="JSON file whose keys mirror the command-line flags")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1, help="worker threads for fitness evaluation (0 = auto)")
    p.add_argument("--out", default=out_default, help="output directory")
    p.add_argument("--bandwidth", type=float, default=bandwidth, help="Hz")
    p.add_argument("--oversampling", type=int, default=20)


def _frame_args(p, k=1):
    p.add_argument("--n", type=int, help="number of subcarriers")
    p.add_argument("--k", type=int, default=k, help="number of symbols")
    p.add_argument("--sparsity", type=float, default=None, help="fraction of active subcarriers in (0, 1]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ofdmga", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="bandwidth, subcarrier count and pulse length for a scenario")
    _common(p, out_default=None)
    p.add_argument("--range-extent", type=float, help="target range extent (m)")
    p.add_argument("--margin", type=float, help="range margin (m)")
    p.add_argument("--rmin", type=float, help="minimum detection range (m)")
    p.add_argument("--c", type=float, default=design_rules.SPEED_OF_LIGHT, help="speed of light (m/s)")
    p.set_defaults(func=cmd_design, _parser=p)

    p = sub.add_parser("optimize", help="run an optimizer")
    osub = p.add_subparsers(dest="optimizer", required=True)

    p = osub.add_parser("pmepr", help="single-objective binary GA on PMEPR")
    _common(p)
    _frame_args(p)
    p.add_argument("--q", type=int, default=18, help="bits per phase")
    p.add_argument("--population", type=int, default=22)
    p.add_argument("--mutations", type=int, default=5)
    p.add_argument("--max-generations", type=int, default=5000)
    p.add_argument("--std-threshold", type=float, default=0.05, help="dB")
    p.add_argument("--mean-threshold", type=float, default=None, help="dB; default: best + 0.1 dB")
    p.set_defaults(func=cmd_optimize_pmepr, _parser=p)

    p = osub.add_parser("moo", help="NSGA-II on (PMEPR, PSLR[, ISLR])")
    _common(p)
    _frame_args(p)
    p.add_argument("--objectives", type=int, choices=(2, 3), default=2)
    p.add_argument("--generations", type=int, default=500)
    p.add_argument("--population", type=int, default=40)
    p.add_argument("--eta-c", type=float, default=15.0)
    p.add_argument("--eta-m", type=float, default=20.0)
    p.add_argument("--mutation-prob", type=float, default=None)
    p.add_argument("--checkpoints", default="", help="comma-separated generations to snapshot")
    p.add_argument("--cloud", type=int, default=0, help="also evaluate this many random populations")
    p.set_defaults(func=cmd_optimize_moo, _parser=p)

    p = sub.add_parser("baseline", help="metrics of a reference code")
    _common(p, out_default=None)
    _frame_args(p)
    p.add_argument("--kind", choices=("newman", "uncoded", "random"))
    p.add_argument("--q", type=int, default=None, help="alphabet bits for --kind random (default continuous)")
    p.set_defaults(func=cmd_baseline, _parser=p)

    p = sub.add_parser("detect", help="two-step SNR-weighted design for an extended target")
    _common(p, bandwidth=2e9)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--target-file", help="CSV with columns x, y, sqrt_sigma")
    src.add_argument("--synthesize-target", action="store_true", help="random 50-scatterer target (default)")
    p.add_argument("--scatterers", type=int, default=50)
    p.add_argument("--fc", type=float, default=9e9, help="lower band edge / carrier (Hz)")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--q", type=int, default=18)
    p.add_argument("--max-generations", type=int, default=5000)
    p.add_argument("--floor", type=float, default=1e-3, help="minimum subcarrier weight")
    p.set_defaults(func=cmd_detect, _parser=p)

    p = sub.add_parser("eval", help="objectives of externally supplied codes")
    _common(p, out_default=None)
    p.add_argument("--codes-file")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--weights-file")
    p.set_defaults(func=cmd_eval, _parser=p)
    return parser


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        leaf = args._parser
        try:
            with open(args.config) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            leaf.error(f"cannot read config {args.config}: {exc}")
        if not isinstance(values, dict):
            leaf.error("config file must hold a JSON object")
        known = {a.dest for a in leaf._actions}
        values = {key.replace("-", "_"): v for key, v in values.items()}
        unknown = sorted(set(values) - known)
        if unknown:
            leaf.error("unknown config key(s): " + ", ".join(unknown))
        leaf.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        args._parser.print_usage(sys.stderr)
        print(f"{args._parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateInputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
