"""Command-line interface: fit, tune, evaluate, simulate, plot.

Exit codes: 0 on success, 2 on input/schema errors, 3 on numeric failures.
All commands are deterministic for a fixed --seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import io
from .classify import FisherConfig, TuneConfig, fit, predict_frame, tune
from .diagnostics import (
    ClassMapRecord,
    ConfusionMatrix,
    FarnessTable,
    class_map_records,
    confusion,
    dac_ldac,
    farness,
    fit_farness,
    metrics,
    silhouette,
)
from .errors import ClassTooSmallError, DataError, NumericError, SchemaError
from .fisher import OrthogonalityMode
from .plots import class_map_svg, farness_svg, mosaic_svg, silhouette_svg
from .simulate import MEASURES, ScenarioSpec, run_study

METRICS_FILE = "metrics.json"
CONFUSION_FILE = "confusion.csv"
DIAGNOSTICS_FILE = "diagnostics.csv"
REPLICATES_FILE = "replicates.csv"
SUMMARY_FILE = "summary.json"

P1_SIZES = {"0.2": (50, 200), "0.5": (125, 125)}


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _fisher_config(args, delta: float, n_directions: int) -> FisherConfig:
    return FisherConfig(
        delta=delta,
        n_directions=n_directions,
        mode=OrthogonalityMode(args.mode),
        ridge=args.ridge,
        n_restarts=args.restarts,
        restart_seed=args.seed,
    )


def cmd_fit(args) -> int:
    frame = io.read_interval_csv(args.data, require_labels=True)
    cfg = _fisher_config(args, args.delta, args.s)
    model = fit(frame, cfg)
    try:
        params = fit_farness(model, frame)
    except ClassTooSmallError as exc:
        print(f"warning: farness parameters unavailable ({exc})", file=sys.stderr)
        params = None
    metadata = {
        "seed": args.seed,
        "ridge": args.ridge,
        "restarts": args.restarts,
        "constraint_tol": cfg.constraint_tol,
        "stationarity_tol": cfg.stationarity_tol,
        "variable_names": list(frame.variable_names),
    }
    io.save_model(args.out, model, params, metadata)
    print(f"s_effective={model.basis.s_effective}")
    for k, ratio in enumerate(model.basis.ratios):
        print(f"ratio[{k}]={float(ratio)!r}")
    print(f"wrote {args.out}")
    return 0


def cmd_tune(args) -> int:
    frame = io.read_interval_csv(args.data, require_labels=True)
    tune_cfg = TuneConfig(
        delta_grid=None if args.delta_grid is None else tuple(args.delta_grid),
        s_grid=None if args.s_grid is None else tuple(args.s_grid),
        n_splits=args.splits,
        seed=args.seed,
    )
    base = _fisher_config(args, delta=0.0, n_directions=1)
    result = tune(frame, tune_cfg, base)
    print("delta,s,mean_accuracy")
    for delta, s_val, accuracy in result.table:
        print(f"{float(delta)!r},{int(s_val)},{float(accuracy)!r}")
    print(f"selected delta={result.best_delta!r} s={result.best_s}")
    return 0


def _write_confusion_csv(path, cm: ConfusionMatrix) -> None:
    lines = ["true_label," + ",".join(str(v) for v in cm.labels) + ",outlier"]
    for j, label in enumerate(cm.labels):
        lines.append(str(label) + "," + ",".join(str(int(v)) for v in cm.counts[j]))
    io.atomic_write_text(path, "\n".join(lines) + "\n")


def _read_confusion_csv(path) -> ConfusionMatrix:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows or rows[0][:1] != ["true_label"] or rows[0][-1] != "outlier":
        raise SchemaError(f"{path}: not a confusion table produced by evaluate")
    labels = rows[0][1:-1]
    counts = [[int(v) for v in row[1:]] for row in rows[1:]]
    return ConfusionMatrix(np.asarray(counts), tuple(labels), has_outlier_column=True)


def cmd_evaluate(args) -> int:
    model, params, metadata = io.load_model(args.model)
    if params is None:
        raise DataError(
            "model file has no farness parameters; refit with >= 3 observations per class"
        )
    test = io.read_interval_csv(args.test, require_labels=True)
    predicted, _ = predict_frame(model, test)
    table = farness(params, model, test)
    flags = table.outlier_flags(args.tau)
    _, _, ldac = dac_ldac(model, test)
    records = class_map_records(table, ldac, args.tau)
    report = silhouette(ldac, test.labels)
    cm = confusion(test.labels, predicted, outlier_flags=flags, labels=model.class_labels)
    stats = metrics(cm)

    os.makedirs(args.out_dir, exist_ok=True)
    labels = [str(v) for v in model.class_labels]
    payload = {
        "schema_version": 1,
        "tau": args.tau,
        "labels": labels,
        "priors": model.priors.tolist(),
        "accuracy": stats.accuracy,
        "recall": {labels[k]: float(stats.recall[k]) for k in range(len(labels))},
        "precision": {labels[k]: float(stats.precision[k]) for k in range(len(labels))},
        "f1": {labels[k]: float(stats.f1[k]) for k in range(len(labels))},
        "macro_f1": stats.macro_f1,
        "g_mean": stats.g_mean,
        "n_global_outliers": int(flags.sum()),
        "model": {
            "delta": model.delta,
            "mode": model.basis.mode.value,
            "s_effective": model.basis.s_effective,
            "ratios": model.basis.ratios.tolist(),
        },
    }
    io.atomic_write_text(
        os.path.join(args.out_dir, METRICS_FILE),
        json.dumps(payload, sort_keys=True, indent=2) + "\n",
    )
    _write_confusion_csv(os.path.join(args.out_dir, CONFUSION_FILE), cm)

    header = (
        ["index", "true_label", "predicted_label", "farness", "min_farness", "ldac",
         "silhouette", "global_outlier"]
        + [f"farness_{label}" for label in labels]
    )
    lines = [",".join(header)]
    farness_true = table.true_class_farness()
    min_farness = table.min_farness
    for h in range(test.n):
        fields = [
            str(h),
            str(test.labels[h]),
            str(predicted[h]),
            repr(float(farness_true[h])),
            repr(float(min_farness[h])),
            repr(float(ldac[h])),
            repr(float(report.values[h])),
            "1" if flags[h] else "0",
        ] + [repr(float(v)) for v in table.values[h]]
        lines.append(",".join(fields))
    io.atomic_write_text(
        os.path.join(args.out_dir, DIAGNOSTICS_FILE), "\n".join(lines) + "\n"
    )
    print(f"accuracy={stats.accuracy!r}")
    print(f"global_outliers={int(flags.sum())}")
    print(f"wrote {METRICS_FILE}, {CONFUSION_FILE}, {DIAGNOSTICS_FILE} to {args.out_dir}")
    return 0


def cmd_simulate(args) -> int:
    n1, n2 = P1_SIZES[args.p1]
    spec = ScenarioSpec(case=args.case, n1=n1, n2=n2, seed=args.seed)
    result = run_study(spec, args.m)
    os.makedirs(args.out_dir, exist_ok=True)
    header = (
        ["replicate"]
        + list(MEASURES)
        + [f"benchmark_{name}" for name in MEASURES]
        + ["abs_cosine"]
    )
    lines = [",".join(header)]
    for i in range(result.m):
        fields = (
            [str(i)]
            + [repr(float(v)) for v in result.method_scores[i]]
            + [repr(float(v)) for v in result.benchmark_scores[i]]
            + [repr(float(result.abs_cosines[i]))]
        )
        lines.append(",".join(fields))
    io.atomic_write_text(os.path.join(args.out_dir, REPLICATES_FILE), "\n".join(lines) + "\n")
    summary = {
        "case": args.case,
        "p1": float(args.p1),
        "m": result.m,
        "seed": args.seed,
        "one_minus_acv": result.one_minus_acv,
    }
    for name in MEASURES:
        summary[f"mse_{name}"] = result.mse[name]
    io.atomic_write_text(
        os.path.join(args.out_dir, SUMMARY_FILE),
        json.dumps(summary, sort_keys=True, indent=2) + "\n",
    )
    print(f"wrote {REPLICATES_FILE}, {SUMMARY_FILE} to {args.out_dir}")
    return 0


def _read_diagnostics_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        rows = list(reader)
        fieldnames = reader.fieldnames or []
    needed = {"index", "true_label", "predicted_label", "farness", "min_farness", "ldac"}
    if not needed.issubset(set(fieldnames)):
        raise SchemaError(f"{path}: not a diagnostics table produced by evaluate")
    labels = [name[len("farness_"):] for name in fieldnames if name.startswith("farness_")]
    return rows, labels


def cmd_plot(args) -> int:
    metrics_path = os.path.join(args.eval_dir, METRICS_FILE)
    try:
        with open(metrics_path, "r", encoding="utf-8") as handle:
            info = json.load(handle)
    except FileNotFoundError:
        raise DataError(f"{metrics_path} not found; run evaluate first") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{metrics_path}: invalid JSON ({exc})") from None
    tau = info["tau"] if args.tau is None else args.tau

    if args.kind == "mosaic":
        cm = _read_confusion_csv(os.path.join(args.eval_dir, CONFUSION_FILE))
        document = mosaic_svg(cm, np.asarray(info["priors"], dtype=float))
    else:
        rows, labels = _read_diagnostics_csv(os.path.join(args.eval_dir, DIAGNOSTICS_FILE))
        true_labels = np.asarray([row["true_label"] for row in rows], dtype=object)
        predicted = np.asarray([row["predicted_label"] for row in rows], dtype=object)
        ldac = np.asarray([float(row["ldac"]) for row in rows])
        if args.kind == "silhouette":
            document = silhouette_svg(silhouette(ldac, true_labels))
        else:
            values = np.asarray(
                [[float(row[f"farness_{label}"]) for label in labels] for row in rows]
            )
            table = FarnessTable(values, tuple(labels), true_labels, predicted)
            if args.kind == "farness":
                document = farness_svg(table, tau)
            else:
                if args.class_label is None:
                    raise DataError("--class is required for --kind classmap")
                records = [
                    record
                    for record in class_map_records(table, ldac, tau)
                    if str(record.true_label) == args.class_label
                ]
                if not records:
                    raise DataError(f"no observations with true class {args.class_label!r}")
                document = class_map_svg(records, tau, labels=list(labels))
    io.atomic_write_text(args.out, document)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifda",
        description="Fisher discriminant analysis for interval-valued data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_flags(p):
        p.add_argument("--mode", choices=[m.value for m in OrthogonalityMode], default="usual")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--ridge", type=float, default=0.0)
        p.add_argument("--restarts", type=int, default=8)

    p_fit = sub.add_parser("fit", help="fit a discriminant model on a labelled CSV")
    p_fit.add_argument("data")
    p_fit.add_argument("--delta", type=float, required=True)
    p_fit.add_argument("--s", type=int, default=1)
    add_solver_flags(p_fit)
    p_fit.add_argument("--out", required=True)
    p_fit.set_defaults(func=cmd_fit)

    p_tune = sub.add_parser("tune", help="grid-search (delta, s) over stratified splits")
    p_tune.add_argument("data")
    p_tune.add_argument("--delta-grid", type=_float_list, default=None)
    p_tune.add_argument("--s-grid", type=_int_list, default=None)
    p_tune.add_argument("--splits", type=int, default=30)
    add_solver_flags(p_tune)
    p_tune.set_defaults(func=cmd_tune)

    p_eval = sub.add_parser("evaluate", help="score a model on a labelled test CSV")
    p_eval.add_argument("model")
    p_eval.add_argument("test")
    p_eval.add_argument("--tau", type=float, default=0.95)
    p_eval.add_argument("--out-dir", default=".")
    p_eval.set_defaults(func=cmd_evaluate)

    p_sim = sub.add_parser("simulate", help="run a replicated benchmark scenario")
    p_sim.add_argument("--case", choices=sorted("ABCD"), required=True)
    p_sim.add_argument("--p1", choices=sorted(P1_SIZES), required=True)
    p_sim.add_argument("--m", type=int, default=100)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out-dir", default=".")
    p_sim.set_defaults(func=cmd_simulate)

    p_plot = sub.add_parser("plot", help="render an SVG from evaluate outputs")
    p_plot.add_argument("--kind", choices=["mosaic", "farness", "classmap", "silhouette"],
                        required=True)
    p_plot.add_argument("--eval-dir", default=".")
    p_plot.add_argument("--class", dest="class_label", default=None)
    p_plot.add_argument("--tau", type=float, default=None)
    p_plot.add_argument("--out", required=True)
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
