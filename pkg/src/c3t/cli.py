"""Command-line interface.

Subcommands mirror the library surface: optimize, metrics, encode, decode,
sweep, train-mlp, bounds, compare-digital, export-tube, reproduce-tables.
Numeric I/O is newline-delimited text; richer outputs are JSON and CSV.
"""

from __future__ import annotations

import argparse
import math
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import harness, mlp, reference
from .codec import (
    ChannelSpec,
    FeatureMode,
    angles_features,
    angles_map_decode,
    map_decode,
    stretch,
    torus_projection,
)
from .curves import evaluate_curve
from .profiles import CodeProfile
from .spsa import SpsaConfig, optimize_radii_multistart
from .tube import circumradius_profile, tube_metrics


def _read_numbers(stream):
    values = []
    for line in stream:
        line = line.strip()
        if line:
            values.append([float(tok) for tok in line.replace(",", " ").split()])
    return values


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w")


def cmd_optimize(args):
    cfg = SpsaConfig(seed=args.seed, max_iters=args.max_iters, tolerance=args.tolerance)
    profile, trace, all_j = optimize_radii_multistart(
        args.n, cfg, seeds=args.seeds, workers=args.workers
    )
    profile.save(args.out)
    trace_path = args.trace_out or str(Path(args.out).with_suffix("")) + "_trace.csv"
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        dim = trace.params.shape[1]
        writer.writerow(["iter", "J"] + [f"p{i+1}" for i in range(dim)])
        for k, j, row in zip(trace.iterations, trace.objective, trace.params):
            writer.writerow([int(k), repr(float(j))] + [repr(float(v)) for v in row])
    print(
        f"n={args.n}: best J={trace.best_objective:.6f} over {args.seeds} seeds "
        f"-> {args.out} (trace: {trace_path})"
    )
    return 0


def cmd_metrics(args):
    profile = CodeProfile.load(args.profile)
    metrics = tube_metrics(profile, args.grid_step)
    doc = metrics.to_dict()
    out = _open_out(args.out)
    json.dump(doc, out, indent=2)
    out.write("\n")
    if out is not sys.stdout:
        out.close()
    if args.curve_csv:
        prof = circumradius_profile(profile, max(args.grid_step, 1e-4))
        with open(args.curve_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["delta", "rho"])
            for d, r in zip(prof.deltas, prof.rho_values):
                writer.writerow([repr(float(d)), repr(float(r))])
    return 0


def cmd_encode(args):
    profile = CodeProfile.load(args.profile)
    rows = _read_numbers(open(args.infile) if args.infile != "-" else sys.stdin)
    out = _open_out(args.out)
    for row in rows:
        for s in row:
            x = evaluate_curve(profile, stretch(s, profile.stretch, profile.n))
            out.write(" ".join(repr(float(v)) for v in x) + "\n")
    if out is not sys.stdout:
        out.close()
    return 0


def cmd_decode(args):
    profile = CodeProfile.load(args.profile)
    rows = _read_numbers(open(args.infile) if args.infile != "-" else sys.stdin)
    y = np.array(rows, dtype=float)
    if args.decoder == "mlp":
        if not args.weights:
            print("--weights is required for the mlp decoder", file=sys.stderr)
            return 2
        _, weights, mode = mlp.load_weights(args.weights)
        if mode == FeatureMode.RAW:
            feats = y
        elif mode == FeatureMode.TORUS_PROJECTION:
            feats = torus_projection(profile, y).data
        else:
            feats = angles_features(y).data
        s_hat = mlp.mlp_forward(weights, feats)
    elif args.decoder == "raw":
        s_hat = map_decode(profile, y, args.grid)
    elif args.decoder == "tp":
        s_hat = map_decode(profile, torus_projection(profile, y).data, args.grid)
    else:  # ao
        if args.snr_db is None:
            print("--snr-db is required for the ao decoder", file=sys.stderr)
            return 2
        spec = ChannelSpec.for_profile(profile, args.snr_db)
        eta = angles_features(y).data
        s_hat = angles_map_decode(profile, eta, spec.noise_var, args.grid)
    out = _open_out(args.out)
    for v in np.atleast_1d(s_hat):
        out.write(repr(float(v)) + "\n")
    if out is not sys.stdout:
        out.close()
    return 0


def cmd_sweep(args):
    if args.config:
        doc = json.loads(Path(args.config).read_text())
    else:
        doc = {}
    if args.profiles:
        doc["profiles"] = args.profiles
    if args.trials is not None:
        doc["trials"] = args.trials
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.decoders:
        doc["decoders"] = args.decoders.split(",")
    if args.snrs:
        doc["snr_grid_db"] = [float(v) for v in args.snrs.split(",")]
    if args.grid is not None:
        doc["grid_points"] = args.grid
    config = harness.ExperimentConfig(
        profiles=tuple(doc["profiles"]),
        snr_grid_db=tuple(doc.get("snr_grid_db", tuple(range(-10, 11)))),
        decoders=tuple(doc.get("decoders", ("raw_map", "repetition"))),
        trials=doc.get("trials", 100000),
        seed=doc.get("seed", 0),
        grid_points=doc.get("grid_points", 10000),
        mlp_weights=doc.get("mlp_weights", {}),
    )
    records = harness.run_sweep(config, workers=args.workers, out_csv=args.out)
    errors = [r for r in records if r.error]
    print(f"{len(records)} cells -> {args.out} ({len(errors)} error rows)")
    return 0


def cmd_train_mlp(args):
    profile = CodeProfile.load(args.profile)
    mode = FeatureMode(args.features)
    config = mlp.TrainingConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        examples_per_snr=args.examples_per_snr,
        train_snrs_db=tuple(float(v) for v in args.snrs.split(",")),
        batch_size=args.batch_size,
        seed=args.seed,
    )
    arch = mlp.default_architecture(profile.n, mode)
    rng = np.random.default_rng(config.seed)
    dataset = mlp.generate_training_set(profile, config, mode, rng)
    weights, losses = mlp.mlp_train(arch, dataset, config)
    mlp.save_weights(args.out, arch, weights, mode, config, losses)
    print(
        f"trained {mode.value} decoder for n={profile.n}: "
        f"final epoch loss {losses[-1]:.6f} -> {args.out}"
    )
    return 0


def cmd_bounds(args):
    out = _open_out(args.out)
    writer = csv.writer(out)
    writer.writerow(["n", "snr_db", "opta_sdr_db"])
    snrs = np.arange(args.snr_min, args.snr_max + 0.5 * args.step, args.step)
    for snr_db in snrs:
        sdr = bounds_mod.opta_sdr_bound(10.0 ** (snr_db / 10.0), args.n)
        writer.writerow(
            [args.n, repr(float(snr_db)), repr(float(10.0 * math.log10(sdr)))]
        )
    if out is not sys.stdout:
        out.close()
    return 0


def cmd_compare_digital(args):
    rows = []
    if args.n is not None:
        for eps in args.eps:
            rows.append((args.n, args.snr_db, args.sdr_db, eps))
    else:
        for n, snr_db, sdr_db, _, _ in reference.TABLE2:
            for eps in (1e-3, 1e-6):
                rows.append((n, snr_db, sdr_db, eps))
    out = _open_out(args.out)
    writer = csv.writer(out)
    writer.writerow(["n", "snr_db", "sdr_db", "R", "eps", "N_c", "N_s", "R_gt_C"])
    for n, snr_db, sdr_db, eps in rows:
        comp = bounds_mod.required_source_samples(n, snr_db, sdr_db, eps)
        writer.writerow(
            [
                n,
                repr(float(snr_db)),
                repr(float(sdr_db)),
                repr(comp.code_rate),
                repr(float(eps)),
                repr(comp.block_length),
                comp.source_samples,
                int(comp.rate_exceeds_capacity),
            ]
        )
    if out is not sys.stdout:
        out.close()
    return 0


def cmd_export_tube(args):
    profile = CodeProfile.load(args.profile)
    data = harness.export_tube_geometry(profile, samples=args.samples)
    prefix = Path(args.out)
    for name in ("centerline", "surface", "slice"):
        if name not in data:
            continue
        path = prefix.parent / f"{prefix.name}_{name}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i+1}" for i in range(data[name].shape[1])])
            for row in data[name]:
                writer.writerow([repr(float(v)) for v in row])
        print(f"{name}: {data[name].shape[0]} points -> {path}")
    return 0


def cmd_reproduce_tables(args):
    max_iters = None
    if args.max_iters is not None:
        max_iters = {n: args.max_iters for n in (4, 6, 8)}
    report = harness.reproduce_tables(
        seeds=args.seeds,
        seed=args.seed,
        grid_step=args.grid_step,
        workers=args.workers,
        dimensions=tuple(args.dimensions),
        max_iters=max_iters,
    )
    print(harness.format_report(report))
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2) + "\n")
    return 0 if report["overall_pass"] else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="c3t",
        description="Constant curvature curve tube analog codes: design, "
        "simulation, and published-table reproduction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="SPSA search for tube-packing radii")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=20000)
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--trace-out")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("metrics", help="tube radius, path length, density")
    p.add_argument("--profile", required=True)
    p.add_argument("--grid-step", type=float, default=1e-4)
    p.add_argument("--out", default="-")
    p.add_argument("--curve-csv", help="also dump rho(delta) as CSV")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("encode", help="source symbols -> channel vectors")
    p.add_argument("--profile", required=True)
    p.add_argument("--in", dest="infile", default="-")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="channel vectors -> source estimates")
    p.add_argument("--profile", required=True)
    p.add_argument("--decoder", choices=("raw", "tp", "ao", "mlp"), default="raw")
    p.add_argument("--weights", help="weights JSON for --decoder mlp")
    p.add_argument("--snr-db", type=float, help="channel SNR (ao decoder)")
    p.add_argument("--grid", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0, help="reserved for stochastic decoders")
    p.add_argument("--in", dest="infile", default="-")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="Monte Carlo SDR over profiles x decoders x SNRs")
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--profiles", nargs="*", help="profile JSON paths")
    p.add_argument("--decoders", help="comma-separated decoder names")
    p.add_argument("--snrs", help="comma-separated SNR dB values")
    p.add_argument("--trials", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("train-mlp", help="train a perceptron decoder")
    p.add_argument("--profile", required=True)
    p.add_argument("--features", choices=("raw", "tp", "ao"), default="raw")
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--epochs", type=int, default=60)
    p.add_argument("--examples-per-snr", type=int, default=15000)
    p.add_argument("--snrs", default="-5,0,5,10")
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_mlp)

    p = sub.add_parser("bounds", help="OPTA SDR bound over an SNR range")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--snr-min", type=float, default=-10.0)
    p.add_argument("--snr-max", type=float, default=10.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser(
        "compare-digital",
        help="finite-blocklength source-sample requirements (published rows "
        "by default)",
    )
    p.add_argument("--n", type=int)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--sdr-db", type=float)
    p.add_argument("--eps", type=float, nargs="*", default=(1e-3, 1e-6))
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_compare_digital)

    p = sub.add_parser("export-tube", help="centerline/surface point clouds")
    p.add_argument("--profile", required=True)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_export_tube)

    p = sub.add_parser(
        "reproduce-tables",
        help="re-derive the published tables; nonzero exit on any failure",
    )
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-step", type=float, default=1e-4)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-iters", type=int, help="override the per-n budgets")
    p.add_argument("--dimensions", type=int, nargs="*", default=(4, 6, 8))
    p.add_argument("--out", help="also write the report JSON here")
    p.set_defaults(func=cmd_reproduce_tables)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
