"""Command-line entry point: ``klr-hopfield {train,retrieve,experiment,stability}``.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .dynamics import NetworkState, UpdateScheme, run_retrieval
from .experiments import (
    DEFAULT_LOADS,
    ExperimentConfig,
    default_threads,
    inject_noise,
    run_capacity_experiment,
    run_dynamics_experiment,
    run_efficiency_experiment,
)
from .io import emit_csv, emit_plotscript, load_model, save_model, write_margin_report
from .kernel import KernelParams, PatternSet, as_bipolar
from .stability import stability_report
from .training import TrainConfig, train_network


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    if ":" not in text:
        return _float_list(text)
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}, expected start:stop:step") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    count = int(round((stop - start) / step)) + 1
    return [round(start + k * step, 10) for k in range(count)]


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--lambda", dest="lam", type=float, default=0.01, help="weight decay")
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--iters", type=int, default=500)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="klr-hopfield", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a network and save it")
    p.add_argument("--n", type=int, default=50)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--load", type=float, help="P/N; patterns drawn at random")
    src.add_argument("--patterns", type=Path, help="text file, one row of ±1 per pattern")
    _add_train_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("retrieve", help="corrupt a stored pattern and retrieve it")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--target-index", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.2)
    p.add_argument("--scheme", choices=[s.value for s in UpdateScheme], default="async")
    p.add_argument("--max-epochs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("experiment", help="run a trial-averaged experiment")
    kinds = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind in ("dynamics", "capacity", "efficiency"):
        k = kinds.add_parser(kind)
        if kind == "capacity":
            k.add_argument("--sizes", type=lambda t: [int(v) for v in t.split(",")], default=[50])
            k.add_argument("--loads", type=_grid, default=list(DEFAULT_LOADS))
            k.add_argument("--noise", type=float, default=0.1)
        else:
            k.add_argument("--n", type=int, default=50)
            k.add_argument("--load", type=float, default=3.0)
        if kind == "dynamics":
            k.add_argument("--noise", type=float, default=0.2)
        if kind == "efficiency":
            k.add_argument("--noise-grid", type=_grid, default=_grid("0.05:0.40:0.05"))
        _add_train_flags(k)
        k.add_argument("--trials", type=int, default=50)
        k.add_argument("--max-epochs", type=int, default=100)
        k.add_argument("--seed", type=int, default=0)
        k.add_argument("--threads", type=int, default=None)
        k.add_argument("--out", type=Path, required=True)
        k.add_argument("--emit-plotscript", action="store_true", help="also write a gnuplot script next to the CSV")

    p = sub.add_parser("stability", help="margin / interference report for one state")
    p.add_argument("--model", type=Path, required=True)
    at = p.add_mutually_exclusive_group(required=True)
    at.add_argument("--at-pattern", type=int)
    at.add_argument("--state-file", type=Path, help="one row of ±1")
    p.add_argument("--out", type=Path, help=".csv or .json; JSON summary to stdout if omitted")
    return parser


def _train(args) -> int:
    if args.patterns is not None:
        ps = PatternSet(np.loadtxt(args.patterns, dtype=np.int64, ndmin=2))
    else:
        load = 3.0 if args.load is None else args.load
        p = int(round(load * args.n))
        ps = PatternSet.random(args.n, p, np.random.default_rng(args.seed))
    w = train_network(ps, KernelParams(args.gamma), TrainConfig(args.lr, args.lam, args.iters))
    save_model(w, args.out, seed=args.seed)
    print(f"trained N={w.n} P={w.p} gamma={args.gamma} -> {args.out}")
    return 0


def _retrieve(args) -> int:
    w = load_model(args.model).weights
    if not 0 <= args.target_index < w.p:
        raise ValueError(f"target index {args.target_index} out of range for P={w.p}")
    rng = np.random.default_rng(args.seed)
    target = w.patterns.patterns[args.target_index]
    s0, d = inject_noise(target, args.noise, rng)
    trace = run_retrieval(w, s0, target, args.scheme, args.max_epochs, rng=rng)
    success = bool(np.array_equal(trace.final_state, target))
    print(f"scheme={args.scheme} initial_hamming={d} epochs={trace.epochs_run} "
          f"outcome={trace.outcome.value} events={trace.total_events} success={success}")
    print("overlap: " + " ".join(f"{m:.4f}" for m in trace.overlaps))
    print(f"final_overlap={trace.overlaps[-1]:.6f}")
    return 0


def _experiment(args) -> int:
    train = TrainConfig(args.lr, args.lam, args.iters)
    threads = args.threads or default_threads()
    common = dict(gamma=args.gamma, train=train, trials=args.trials, max_epochs=args.max_epochs, master_seed=args.seed)
    if args.kind == "dynamics":
        cfg = ExperimentConfig(n=args.n, load=args.load, noise_fraction=args.noise, **common)
        results = run_dynamics_experiment(cfg, threads=threads)
        meta = cfg.to_dict()
    elif args.kind == "capacity":
        cfg = ExperimentConfig(n=args.sizes[0], load=args.loads[0], noise_fraction=args.noise, **common)
        results = run_capacity_experiment(cfg, args.loads, args.sizes, threads=threads)
        meta = {**cfg.to_dict(), "sizes": args.sizes, "loads": args.loads}
        del meta["n"], meta["load"], meta["p"]
    else:
        cfg = ExperimentConfig(n=args.n, load=args.load, schemes=(UpdateScheme.ASYNC,), **common)
        results = run_efficiency_experiment(cfg, args.noise_grid, threads=threads)
        meta = {**cfg.to_dict(), "noise_grid": args.noise_grid}
        del meta["noise_fraction"]
    emit_csv(results, args.kind, args.out, meta)
    if args.emit_plotscript:
        emit_plotscript(args.kind, args.out, args.out.with_suffix(".gp"))
    print(f"wrote {args.out}")
    return 0


def _stability(args) -> int:
    mf = load_model(args.model)
    w = mf.weights
    if args.at_pattern is not None:
        if not 0 <= args.at_pattern < w.p:
            raise ValueError(f"pattern index {args.at_pattern} out of range for P={w.p}")
        s = w.patterns.patterns[args.at_pattern]
        where = {"at_pattern": args.at_pattern}
    else:
        s = as_bipolar(np.loadtxt(args.state_file, dtype=np.int64), w.n)
        where = {"state_file": str(args.state_file)}
    report = stability_report(w, NetworkState(w, s))
    if args.out is None:
        print(json.dumps({**where, **report.summary()}, indent=2))
    else:
        write_margin_report(report, args.out, where)
        print(f"wrote {args.out}")
    return 0


COMMANDS = {"train": _train, "retrieve": _retrieve, "experiment": _experiment, "stability": _stability}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        return COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - surface any runtime failure as exit 2
        print(f"error: {exc}", file=sys.stderr)
        return 2
