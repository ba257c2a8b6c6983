"""Command-line entry point (``ngauss``).

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""
import argparse
import csv
import json
import os
import sys

import numpy as np

from . import evaluate, harness, io, ng_core, sampling
from .errors import InputError, NgaussError, NumericalError

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def _str_list(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _write_rows(path, columns, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v
                        for v in (row[c] for c in columns)])


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _echo(args, out_dir):
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    _write_json(os.path.join(out_dir, "command.json"), cfg)


def cmd_simulate(args):
    config = harness.ExperimentConfig(
        cases=args.cases, n_list=args.n_list, p=args.p, reps=args.reps,
        methods=args.methods, master_seed=args.master_seed, n_eval=args.n_eval,
        box=args.box, bcg_iters=args.bcg_iters, rbig_iters=args.rbig_iters,
        t_copula_nu=args.nu, ng_deltas=args.ng_deltas,
        normality_test=args.normality_test)
    os.makedirs(args.out, exist_ok=True)
    summary, reps, timing = harness.run_simulation(config, jobs=args.jobs)
    _write_rows(os.path.join(args.out, "summary.csv"), harness.SUMMARY_COLUMNS, summary)
    _write_rows(os.path.join(args.out, "replications.csv"),
                harness.REPLICATION_COLUMNS, reps)
    _write_rows(os.path.join(args.out, "timing.csv"),
                ("case", "n", "p", "method", "seconds"), timing)
    _write_json(os.path.join(args.out, "config.json"), config.to_dict())
    for row in summary:
        print("case {case} n={n} p={p} {method:5s} p-value(median)={pvalue_median:.4f} "
              "KLD={kld_mean:.4f} ({kld_sd:.4f}) ok={reps_ok}".format(**row))
    return 0


def cmd_fig1(args):
    res = harness.run_fig1(args.n, args.seed, args.grid)
    os.makedirs(args.out, exist_ok=True)
    io.write_csv(os.path.join(args.out, "fig1_sample.csv"), res["data"])
    io.write_csv(os.path.join(args.out, "fig1_diagonal.csv"),
                 np.column_stack([res["t"], res["empirical"], res["true"]]),
                 header=["u", "empirical", "true"])
    _echo(args, args.out)
    print(f"sup gap = {res['sup_gap']:.4f}")
    return 0


def cmd_fig2(args):
    res = harness.run_fig2(args.n, args.seed)
    os.makedirs(args.out, exist_ok=True)
    for key in ("data", "forward", "recovered", "fresh", "synthesized"):
        io.write_csv(os.path.join(args.out, f"fig2_{key}.csv"), res[key])
    _echo(args, args.out)
    print(f"Royston H = {res['statistic']:.4f}, p-value = {res['pvalue']:.4f}")
    print(f"round-trip max abs error = {res['roundtrip_max_error']!r}")
    print(f"forward columns equal Gaussian quantile grid: {res['quantile_grid_match']}")
    return 0


def cmd_transform(args):
    data, header = io.read_csv(args.input)
    model = ng_core.fit_ng(data, deltas=args.deltas)
    io.write_csv(args.output, ng_core.ng_forward(model, data), header)
    ng_core.save_model(model, args.model)
    print(f"deltas = {list(model.plan.deltas)}, shifts = {list(model.plan.shifts)}")
    return 0


def cmd_inverse(args):
    model = ng_core.load_model(args.model)
    if args.mode == "training":
        pseudo, header = io.read_csv(args.input)
        io.write_csv(args.output, ng_core.ng_inverse_training(model, pseudo), header)
        return 0
    if args.input:
        z, header = io.read_csv(args.input)
    else:
        z = sampling.sample_std_normal(args.count, model.p, args.seed)
        header = None
    io.write_csv(args.output, ng_core.ng_synthesize(model, z), header)
    return 0


def cmd_synth(args):
    if args.images:
        names = sorted(f for f in os.listdir(args.images) if f.lower().endswith(".pgm"))
        if not names:
            raise InputError(f"no .pgm files in {args.images}")
        frames = [io.read_pgm(os.path.join(args.images, f)) for f in names]
        if len({f.shape for f in frames}) != 1:
            raise InputError("all images must share the same size")
        images = np.stack(frames)
    else:
        images = harness.make_blob_corpus(args.blobs, args.size, args.size, args.seed)
    out = harness.run_synth(images, args.count, args.seed)
    os.makedirs(args.out, exist_ok=True)
    for k, frame in enumerate(out):
        io.write_pgm(os.path.join(args.out, f"synth_{k:04d}.pgm"), frame)
    _echo(args, args.out)
    print(f"wrote {len(out)} frames of {out.shape[1]}x{out.shape[2]} to {args.out}")
    return 0


def cmd_test(args):
    data, _ = io.read_csv(args.input)
    if args.test == "shapiro":
        if data.shape[1] != 1:
            raise InputError("shapiro test needs a single column")
        stat, pval = evaluate.shapiro_wilk(data[:, 0])
    else:
        stat, pval = harness.normality_test(data, args.test)
    print(f"statistic = {stat!r}")
    print(f"p-value = {pval!r}")
    return 0


def cmd_kld(args):
    data, _ = io.read_csv(args.input)
    print(repr(evaluate.kld_vs_standard_normal(data, args.n_eval, args.box, args.seed)))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ngauss", description="Copula-based non-iterative Gaussianization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="benchmark NG, RBIG, BCG and RG")
    p.add_argument("--cases", type=_int_list, default=(1, 2, 3, 4))
    p.add_argument("--n-list", type=_int_list, default=(1000, 1500, 2000))
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--methods", type=_str_list, default=("ng", "rbig", "bcg", "rg"))
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--n-eval", type=int, default=1000)
    p.add_argument("--box", type=float, default=5.0)
    p.add_argument("--bcg-iters", type=int, default=30)
    p.add_argument("--rbig-iters", type=int, default=50)
    p.add_argument("--nu", type=float, default=6.0, help="t-copula degrees of freedom")
    p.add_argument("--ng-deltas", type=_int_list, default=None,
                   help="fixed offsets; default selects them by Royston p-value")
    p.add_argument("--normality-test", choices=harness.NORMALITY_TESTS,
                   default="royston")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fig1", help="empirical vs true Gaussian copula diagonal")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", help="toy round trip and synthesis")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("transform", help="fit NG on a CSV and write pseudo-observations")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--model", required=True, help="where to save the fitted model")
    p.add_argument("--deltas", type=_int_list, default=None)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("inverse", help="invert pseudo-observations or synthesize")
    p.add_argument("--model", required=True)
    p.add_argument("--mode", choices=("training", "synthesize"), default="training")
    p.add_argument("--input", help="pseudo-observations or Gaussian draws (CSV)")
    p.add_argument("--count", type=int, default=1000,
                   help="fresh draws when synthesizing without --input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("synth", help="synthesize images from a PGM corpus")
    p.add_argument("--images", help="directory of P5 PGM files")
    p.add_argument("--blobs", type=int, default=200,
                   help="size of the generated blob corpus when --images is absent")
    p.add_argument("--size", type=int, default=8)
    p.add_argument("--count", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("test", help="normality test on a CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--test", choices=("royston", "projection", "shapiro"),
                   default="royston")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("kld", help="KLD of a CSV sample's KDE to N(0, I)")
    p.add_argument("--input", required=True)
    p.add_argument("--n-eval", type=int, default=1000)
    p.add_argument("--box", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_kld)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "inverse" and args.mode == "training" and not args.input:
        parser.error("--input is required with --mode training")
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NgaussError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
