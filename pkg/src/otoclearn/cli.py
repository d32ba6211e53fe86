"""Command-line orchestration of the dataset/learning pipeline.

Every subcommand writes its primary output plus a `<out>.manifest.json`
recording the fully resolved configuration; timestamps live under their own
manifest key so re-runs produce byte-identical primary outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dense import Target
from .datasets import Dataset, SplitSpec, generate, load_dataset, save_dataset, split
from .errors import OtoclearnError
from .hamiltonians import Family
from .kernels import KERNEL_KINDS, KernelSpec
from .mpo import chi_sweep, sweep_diffs
from .regression import (
    HyperGrid,
    cross_validate,
    evaluate,
    fit_model,
    learning_curve,
    load_model,
    save_model,
)

WORKERS_ENV = "OTOCLEARN_WORKERS"


def _default_workers() -> int:
    return int(os.environ.get(WORKERS_ENV, "1"))


def _write_manifest(out_path: str, command: str, args: argparse.Namespace) -> None:
    config = {
        key: value
        for key, value in sorted(vars(args).items())
        if key != "func" and not key.startswith("_")
    }
    manifest = {
        "command": command,
        "config": config,
        "package_version": __version__,
        "timestamps": {"written_at": datetime.now(timezone.utc).isoformat()},
    }
    Path(str(out_path) + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n"
    )


def _parse_floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _parse_ints(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _parse_sizes(text: str) -> list[int]:
    """Either a comma list "50,100,200" or a range "start:stop:step"."""
    if ":" in text:
        start, stop, step = (int(part) for part in text.split(":"))
        return list(range(start, stop + 1, step))
    return _parse_ints(text)


def _spec_from_args(args) -> KernelSpec:
    return KernelSpec(
        kind=args.kernel, gamma=args.gamma, c0=args.c0, degree=args.degree
    )


def _cmd_gen(args) -> None:
    ds = generate(
        family=Family(args.family),
        target=Target(args.target),
        n=args.n,
        count=args.count,
        engine=args.engine,
        seed=args.seed,
        chi=args.chi,
        dt=args.dt,
        workers=args.workers,
    )
    save_dataset(ds, args.out)
    _write_manifest(args.out, "gen", args)
    print(f"wrote {len(ds)} rows to {args.out}")


def _cmd_split(args) -> None:
    ds = load_dataset(args.data)
    train, test = split(ds, SplitSpec(train_fraction=args.fraction, seed=args.seed))
    save_dataset(train, args.train_out)
    save_dataset(test, args.test_out)
    _write_manifest(args.train_out, "split", args)
    print(f"split {len(ds)} rows into {len(train)} train / {len(test)} test")


def _cmd_cv(args) -> None:
    ds = load_dataset(args.data)
    result = cross_validate(
        ds.inputs,
        ds.labels,
        kind=args.kernel,
        folds=args.folds,
        seed=args.seed,
        workers=args.workers,
    )
    report = {
        "kernel": args.kernel,
        "best": {
            "lambda": result.best_lambda,
            "gamma": result.best_spec.gamma,
            "c0": result.best_spec.c0,
            "degree": result.best_spec.degree,
        },
        "skipped_folds": result.skipped_folds,
        "table": [
            {
                "lambda": entry.lam,
                "gamma": entry.spec.gamma,
                "c0": entry.spec.c0,
                "degree": entry.spec.degree,
                "mean_r2": entry.mean_r2,
            }
            for entry in result.table
        ],
    }
    Path(args.out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write_manifest(args.out, "cv", args)
    best = report["best"]
    print(
        f"best {args.kernel}: lambda={best['lambda']:g} gamma={best['gamma']:g} "
        f"c0={best['c0']:g} degree={best['degree']}"
    )


def _cmd_train(args) -> None:
    ds = load_dataset(args.data)
    spec = _spec_from_args(args)
    provenance = {
        "data": str(args.data),
        "data_meta": ds.meta,
        "kernel": spec.to_dict(),
        "lambda": args.lam,
    }
    model = fit_model(ds.inputs, ds.labels, spec, args.lam, provenance=provenance)
    save_model(model, args.out)
    _write_manifest(args.out, "train", args)
    print(f"trained {args.kernel} model on {len(ds)} rows -> {args.out}")


def _cmd_eval(args) -> None:
    model = load_model(args.model)
    ds = load_dataset(args.data)
    metrics = evaluate(model, ds.inputs, ds.labels)
    r2_text = "undefined" if metrics.r2 is None else f"{metrics.r2:.6f}"
    print(f"r2={r2_text} rmse={metrics.rmse:.6f} mae={metrics.mae:.6f}")
    if args.out:
        payload = {"r2": metrics.r2, "rmse": metrics.rmse, "mae": metrics.mae}
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        _write_manifest(args.out, "eval", args)


def _cmd_predict(args) -> None:
    model = load_model(args.model)
    if args.x is not None:
        point = _parse_floats(args.x)
        if len(point) != 3:
            raise ValueError("--x expects three comma-separated components")
        value = float(model.predict(np.asarray(point)[None, :])[0])
        print(repr(value))
        return
    ds = load_dataset(args.data)
    preds = model.predict(ds.inputs)
    lines = ["x1,x2,x3,prediction"]
    for row, pred in zip(ds.inputs, preds):
        cells = [float(row[0]), float(row[1]), float(row[2]), float(pred)]
        lines.append(",".join(repr(cell) for cell in cells))
    Path(args.out).write_text("\n".join(lines) + "\n")
    _write_manifest(args.out, "predict", args)
    print(f"wrote {len(preds)} predictions to {args.out}")


def _cmd_learning_curve(args) -> None:
    train = load_dataset(args.train)
    test = load_dataset(args.test)
    rows = learning_curve(
        train.inputs,
        train.labels,
        test.inputs,
        test.labels,
        spec=_spec_from_args(args),
        lam=args.lam,
        sizes=_parse_sizes(args.sizes) if args.sizes else None,
        repeats=args.repeats,
        seed=args.seed,
    )
    lines = ["m,mean_r2,std_r2"]
    for row in rows:
        lines.append(f"{row.size},{row.mean_r2!r},{row.std_r2!r}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    _write_manifest(args.out, "learning-curve", args)
    print(f"wrote {len(rows)} learning-curve rows to {args.out}")


def _cmd_chi_sweep(args) -> None:
    x = _parse_floats(args.x)
    if len(x) != 3:
        raise ValueError("--x expects three comma-separated components")
    rows = chi_sweep(
        family=Family(args.family),
        x=x,
        n=args.n,
        target=Target(args.target),
        chi_list=_parse_ints(args.chis),
        dt=args.dt,
        svd_cutoff=args.cutoff,
    )
    lines = ["chi,value,discarded_weight"]
    for row in rows:
        lines.append(f"{row.chi},{row.value!r},{row.discarded_weight!r}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    _write_manifest(args.out, "chi-sweep", args)
    diffs = ", ".join(f"{d:.3e}" for d in sweep_diffs(rows))
    print(f"wrote {len(rows)} rows to {args.out}; successive diffs: {diffs or 'n/a'}")


def _add_kernel_args(parser, with_lambda=True):
    parser.add_argument("--kernel", required=True, choices=KERNEL_KINDS)
    if with_lambda:
        parser.add_argument(
            "--lambda", dest="lam", type=float, required=True,
            help="regularisation strength",
        )
    parser.add_argument("--gamma", type=float, default=1.0)
    parser.add_argument("--c0", type=float, default=0.0)
    parser.add_argument("--degree", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otoclearn",
        description="Generate spin-chain OTOC datasets and train kernel models on them.",
    )
    parser.add_argument("--version", action="version", version=f"otoclearn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a labelled dataset")
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    p.add_argument("--target", required=True, choices=[t.value for t in Target])
    p.add_argument("--n", type=int, required=True, help="number of sites")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--engine", choices=("dense", "mpo"), default="dense")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chi", type=int, default=None, help="bond dimension (mpo engine)")
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("split", help="split a dataset into train/test files")
    p.add_argument("--data", required=True)
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("cv", help="cross-validated hyperparameter grid search")
    p.add_argument("--data", required=True)
    p.add_argument("--kernel", required=True, choices=KERNEL_KINDS)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_cv)

    p = sub.add_parser("train", help="train a model at fixed hyperparameters")
    p.add_argument("--data", required=True)
    _add_kernel_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("predict", help="predict for one point or a dataset")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--x", help="single point as x1,x2,x3")
    group.add_argument("--data", help="dataset whose inputs are predicted")
    p.add_argument("--out", help="CSV output (required with --data)")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("learning-curve", help="mean test R^2 vs training-set size")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    _add_kernel_args(p)
    p.add_argument("--sizes", default=None, help='"50,100,..." or "50:1000:50"')
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_learning_curve)

    p = sub.add_parser("chi-sweep", help="target value vs bond dimension")
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--target", required=True, choices=[t.value for t in Target])
    p.add_argument("--x", required=True, help="coupling vector as x1,x2,x3")
    p.add_argument("--chis", required=True, help="ascending bond dimensions, comma-separated")
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--cutoff", type=float, default=1e-12)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_chi_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "predict" and args.data is not None and args.out is None:
        parser.error("--out is required when predicting a dataset")
    try:
        args.func(args)
    except (OtoclearnError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
