"""Command-line pipeline: synth -> place -> train -> evaluate -> render.

Exit codes: 0 success, 2 usage or bad argument, 3 data or parse failure,
4 numerical failure (singular or degenerate systems, divergence), 5 internal.
"""
from __future__ import annotations

import argparse
import csv
import sys
import traceback

import numpy as np

from .data_io import load_series, save_series, split_series, synth_series
from .errors import ArgumentError, NumericalError, ParseError
from .experiment import STRATEGIES, ExperimentConfig, make_placement, run_experiment
from .metrics import EvalReport, reports_to_csv
from .neural_recon import (
    NeuralReconstructor,
    TrainConfig,
    load_checkpoint,
    reconstruct_series,
    save_checkpoint,
    train,
)
from .placement import Placement, analyze_connectivity, insert_bridges
from .render import heatmap_pixels, write_pgm

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERICAL, EXIT_INTERNAL = 0, 2, 3, 4, 5


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _add_train_flags(p):
    d = TrainConfig()
    p.add_argument("--epochs", type=int, default=d.epochs)
    p.add_argument("--batch-size", type=_positive_int, default=d.batch_size)
    p.add_argument("--lr", type=float, default=d.learning_rate)
    p.add_argument("--beta1", type=float, default=d.beta1)
    p.add_argument("--beta2", type=float, default=d.beta2)
    p.add_argument("--eps", type=float, default=d.epsilon)
    p.add_argument("--no-cosine", action="store_true", help="constant learning rate")
    p.add_argument("--hidden", type=int, default=2, help="hidden layer count (even)")
    p.add_argument("--seed", type=int, default=0, help="initialization seed")


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        beta1=args.beta1,
        beta2=args.beta2,
        epsilon=args.eps,
        cosine_decay=not args.no_cosine,
        seed=args.seed,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsefield", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic series")
    p.add_argument("--kind", default="traveling_gaussians",
                   choices=["traveling_gaussians", "standing_waves", "mixed"])
    p.add_argument("--h", type=int, required=True, help="grid height")
    p.add_argument("--w", type=int, required=True, help="grid width")
    p.add_argument("--m", type=int, required=True, help="number of snapshots")
    p.add_argument("--components", type=int, default=None)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("place", help="choose sensor locations")
    p.add_argument("--series", required=True)
    p.add_argument("--r", type=_positive_int, required=True, help="number of sensors")
    p.add_argument("--strategy", choices=["qr", "rand"], default="qr")
    p.add_argument("--seed", type=int, default=0, help="seed for the rand strategy")
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--tau", type=int, default=None, help="L1 communication radius")
    p.add_argument("--bridge", action="store_true", help="add relay nodes until connected")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_place)

    p = sub.add_parser("train", help="train the neural reconstructor")
    p.add_argument("--series", required=True)
    p.add_argument("--placement", required=True)
    p.add_argument("--train-fraction", type=float, default=0.7)
    _add_train_flags(p)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--loss-csv", default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="compare placement and reconstruction strategies")
    p.add_argument("--series", required=True)
    p.add_argument("--r", type=_positive_int, required=True)
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--rand-seed", type=int, default=0)
    p.add_argument("--strategies", default=",".join(STRATEGIES),
                   help="comma-separated subset of " + ",".join(STRATEGIES))
    _add_train_flags(p)
    p.add_argument("--debug-identity", action="store_true",
                   help="score the truth against itself (pipeline self-test)")
    p.add_argument("--out", required=True, help="metrics CSV path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("render", help="write a snapshot or reconstruction as a PGM heatmap")
    p.add_argument("--series", required=True)
    p.add_argument("--index", type=int, default=0, help="snapshot index")
    p.add_argument("--checkpoint", default=None, help="render this model's reconstruction instead")
    p.add_argument("--placement", default=None)
    p.add_argument("--mark-sensors", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def cmd_synth(args) -> int:
    if args.m < 1 or args.h < 1 or args.w < 1:
        raise ArgumentError(f"--h, --w and --m must be >= 1 (got {args.h}, {args.w}, {args.m})")
    series = synth_series(args.kind, args.h, args.w, args.m, seed=args.seed,
                          noise_level=args.noise, n_components=args.components)
    save_series(series, args.out)
    print(f"wrote {args.out}: H={series.height} W={series.width} M={series.n_snapshots}")
    return EXIT_OK


def cmd_place(args) -> int:
    series = load_series(args.series)
    train_part, _ = split_series(series, args.train_fraction)
    placement = make_placement(args.strategy, train_part, args.r, args.seed)
    if args.tau is not None:
        report = analyze_connectivity(placement, args.tau)
        omega = report.omega if report.omega_defined else "undefined"
        print(f"connected={str(report.connected).lower()} omega={omega}")
        if args.bridge:
            placement, report = insert_bridges(placement, args.tau)
            print(f"bridges_added={len(report.bridges_added)} "
                  f"connected={str(report.connected).lower()} omega={report.omega}")
    elif args.bridge:
        raise ArgumentError("--bridge requires --tau")
    placement.save(args.out)
    return EXIT_OK


def cmd_train(args) -> int:
    series = load_series(args.series)
    placement = Placement.load(args.placement)
    if placement.n_cells != series.n_cells:
        raise ArgumentError(f"placement grid has {placement.n_cells} cells, series has {series.n_cells}")
    train_part, _ = split_series(series, args.train_fraction)
    config = _train_config(args)
    model = NeuralReconstructor.initialize(placement, seed=config.seed, hidden_layer_count=args.hidden)
    result = train(model, train_part, config)
    save_checkpoint(result.model, args.out)
    if args.loss_csv:
        with open(args.loss_csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["step", "loss"])
            for k, loss in enumerate(result.loss_history, start=1):
                writer.writerow([k, repr(loss)])
    print(f"trained {len(result.loss_history)} steps, final loss {result.loss_history[-1]:.6g}"
          if result.loss_history else "trained 0 steps")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    series = load_series(args.series)
    strategies = tuple(s.strip() for s in args.strategies.split(",") if s.strip())
    unknown = [s for s in strategies if s not in STRATEGIES]
    if unknown or not strategies:
        raise ArgumentError(f"unknown strategies {unknown}; choose from {', '.join(STRATEGIES)}")
    # keep the fixed row order whatever order the flag lists them in
    strategies = tuple(s for s in STRATEGIES if s in strategies)
    if args.debug_identity:
        _, test = split_series(series, args.train_fraction)
        reports = [EvalReport.compute(s, args.r, test.matrix, test.matrix, test.valid) for s in strategies]
    else:
        config = ExperimentConfig(
            n_sensors=args.r,
            train_fraction=args.train_fraction,
            rand_seed=args.rand_seed,
            train=_train_config(args),
            hidden_layer_count=args.hidden,
            strategies=strategies,
            on_error="nan",
        )
        reports = run_experiment(series, config)
    text = reports_to_csv(reports)
    with open(args.out, "w", newline="") as fh:
        fh.write(text)
    sys.stdout.write(text)
    failed = [rep for rep in reports if rep.error]
    for rep in failed:
        print(f"numerical error in {rep.strategy}: {rep.error}", file=sys.stderr)
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_render(args) -> int:
    series = load_series(args.series)
    if not 0 <= args.index < series.n_snapshots:
        raise ArgumentError(f"--index {args.index} outside [0, {series.n_snapshots})")
    sensors = None
    model = None
    if args.checkpoint:
        model = load_checkpoint(args.checkpoint)
        if model.m != series.n_cells:
            raise ArgumentError(f"checkpoint covers {model.m} cells, series has {series.n_cells}")
    if args.mark_sensors:
        if args.placement:
            sensors = Placement.load(args.placement).indices
        elif model is not None:
            sensors = model.placement.indices
        else:
            raise ArgumentError("--mark-sensors needs --placement or --checkpoint")
    if model is not None:
        recon, _ = reconstruct_series(model, series[: args.index + 1])
        values = recon[:, -1]
    else:
        values = series.values[args.index]
    pixels = heatmap_pixels(values, series.height, series.width, mask=series.valid, sensors=sensors)
    write_pgm(args.out, pixels)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


def run() -> None:
    sys.exit(main())
