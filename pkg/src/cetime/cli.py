"""Command-line entry point: generate the synthetic benchmark, train and
evaluate single models, or run the full three-model comparison.

Commands
--------
generate   write a censored synthetic dataset (CSV + manifest)
train      fit one model kind on a dataset, write checkpoint + history
evaluate   metrics report (JSON + calibration CSV) for a checkpoint
compare    train and evaluate cet/et/bc over repeated seeds; emit a
           consolidated JSON report and a fixed-width text table

Flags mirror the config-file keys one to one; ``--config file.json``
provides defaults and explicit flags win. All outputs are byte-stable
given identical flags and seeds; timestamps appear only in dataset
manifests. The environment variable CETIME_OUT supplies the default
output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import data as data_mod
from . import metrics as metrics_mod
from . import models as models_mod
from .mathstats import Rng

log = logging.getLogger("cetime")

DEFAULT_CONFIG = {
    "hidden": 100,
    "lr": 3e-4,
    "batch_size": 400,
    "dropout": 0.5,
    "epochs": 300,
    "patience": 20,
    "n_samples": 100,
    "temperature": 0.3,
    "log_eps": -2.0,
    "estimator": "concrete",
    "seed": 0,
}

_TASK_LABELS = {0: "T1", 1: "T2"}


class CliError(ValueError):
    pass


def _out_dir(arg: str | None) -> Path:
    root = arg if arg is not None else os.environ.get("CETIME_OUT", ".")
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def resolve_config(args) -> dict:
    """DEFAULT_CONFIG <- config file <- explicit flags; unknown keys rejected."""
    cfg = dict(DEFAULT_CONFIG)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(DEFAULT_CONFIG)
        if unknown:
            raise CliError(f"{args.config}: unknown config keys {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in DEFAULT_CONFIG:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; explicit flags override it")
    p.add_argument("--hidden", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--n-samples", dest="n_samples", type=int, help="Monte Carlo occurrence samples per step")
    p.add_argument("--temperature", type=float, help="binary-concrete temperature")
    p.add_argument("--log-eps", dest="log_eps", type=float, help="natural-log occurrence penalty, in (-4, 0)")
    p.add_argument("--estimator", choices=["concrete", "arm"])
    p.add_argument("--seed", type=int)


# --- evaluation ------------------------------------------------------------


def evaluate_model(model, ds: data_mod.Dataset, bins: int = 10) -> dict:
    """Per-event metrics for a fitted model on one dataset split.

    Returns {"events": {name: {metric: value}}, "average": {...},
    "calibration": {name: [points]}, "occurrence_probs": array|None}.
    AUC needs ground-truth occurrence labels and is omitted without
    them; the binary classifier gets AUC only.
    """
    result = {"events": {name: {} for name in ds.event_names}, "calibration": {}}
    probs = None
    if model.kind in ("cet", "bc"):
        probs = model.predict_occurrence(ds.x)
        scores = probs
    else:
        scores = model.ranking_score(ds.x)
    if ds.c_true is not None:
        for j, name in enumerate(ds.event_names):
            result["events"][name]["auc"] = metrics_mod.auc(scores[:, j], ds.c_true[:, j])
        if probs is not None:
            for j, name in enumerate(ds.event_names):
                result["calibration"][name] = metrics_mod.calibration_curve(
                    probs[:, j], ds.c_true[:, j], bins=bins
                )
    if model.kind in ("cet", "et"):
        t_hat = model.predict_time(ds.x)
        for j, name in enumerate(ds.event_names):
            observed = ds.s[:, j] == 1
            t_max = float(ds.t[:, j].max())
            result["events"][name]["mrae"] = metrics_mod.mrae(ds.t[:, j], ds.s[:, j], t_hat[:, j], t_max)
            result["events"][name]["ci"] = metrics_mod.concordance_index(ds.t[:, j], ds.s[:, j], t_hat[:, j])
    metric_names = sorted({m for ev in result["events"].values() for m in ev})
    result["average"] = {
        m: float(np.mean([ev[m] for ev in result["events"].values() if m in ev])) for m in metric_names
    }
    result["occurrence_probs"] = probs
    return result


# --- commands ---------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.n < 1:
        raise CliError(f"--n must be >= 1, got {args.n}")
    if not 0.0 <= args.noise <= 1.0:
        raise CliError(f"--noise must lie in [0, 1], got {args.noise}")
    if args.scheme not in data_mod.CENSOR_SCHEMES:
        raise CliError(f"--scheme must be one of {data_mod.CENSOR_SCHEMES}")
    out = _out_dir(args.out)
    ds = data_mod.generate_synthetic(args.n, noise=args.noise, seed=args.seed)
    ds = data_mod.apply_censoring(ds, args.scheme, Rng(args.seed).child(3))
    csv_path = out / f"{args.name}.csv"
    data_mod.save_csv(ds, csv_path)
    data_mod.save_manifest(
        ds,
        out / f"{args.name}.manifest.json",
        extra={"rng_algorithm": Rng.algorithm, "created_unix": time.time()},
    )
    log.info("wrote %s (%d rows) and its manifest", csv_path, ds.n)
    return 0


def _write_history_csv(history, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_loss", "val_auc"])
        for row in history:
            writer.writerow(
                [
                    row["epoch"],
                    repr(row["train_loss"]),
                    "" if row["val_loss"] is None else repr(row["val_loss"]),
                    "" if row["val_auc"] is None else repr(row["val_auc"]),
                ]
            )


def cmd_train(args) -> int:
    cfg = resolve_config(args)
    out = _out_dir(args.out)
    ds = data_mod.load_csv(args.data)
    train_ds, val_ds, test_ds = data_mod.split(ds, seed=cfg["seed"])
    log.info("training %s on %d samples (val %d)", args.model, train_ds.n, val_ds.n)
    model, history = models_mod.train(args.model, train_ds, val_ds, cfg)
    ckpt = out / f"{args.model}.checkpoint.json"
    model.save(ckpt)
    _write_history_csv(history, out / f"{args.model}.history.csv")
    resolved = {
        "model": args.model,
        "data": str(args.data),
        "split": [0.6, 0.2, 0.2],
        "config": cfg,
        "rng_algorithm": Rng.algorithm,
        "best_epoch": model.best_epoch_,
    }
    with open(out / f"{args.model}.config.json", "w", encoding="utf-8") as fh:
        json.dump(resolved, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("checkpoint %s (best epoch %d of %d run)", ckpt, model.best_epoch_, len(history))
    return 0


def cmd_evaluate(args) -> int:
    out = _out_dir(args.out)
    model = models_mod.load_model(args.checkpoint)
    ds = data_mod.load_csv(args.data)
    if args.split != "none":
        seed = model.get_params().get("seed", 0)
        parts = dict(zip(("train", "val", "test"), data_mod.split(ds, seed=seed)))
        ds = parts[args.split]
    result = evaluate_model(model, ds, bins=args.bins)
    report = {
        "model": model.kind,
        "checkpoint": str(args.checkpoint),
        "data": str(args.data),
        "split": args.split,
        "n": ds.n,
        "events": result["events"],
        "average": result["average"],
    }
    metrics_mod.report_to_json(report, out / "metrics.json")
    for name, points in result["calibration"].items():
        metrics_mod.calibration_to_csv(points, out / f"calibration_{name}.csv")
    log.info("metrics written to %s", out / "metrics.json")
    return 0


def _compare_cell(payload):
    """One (model kind, repetition) training + evaluation; runs in a worker."""
    kind, cfg, rep, splits = payload
    train_ds, val_ds, test_ds = splits
    cell_cfg = dict(cfg)
    cell_cfg["seed"] = cfg["seed"] + rep
    model, history = models_mod.train(kind, train_ds, val_ds, cell_cfg)
    result = evaluate_model(model, test_ds)
    probs = result.pop("occurrence_probs")
    result.pop("calibration", None)
    return {
        "kind": kind,
        "rep": rep,
        "events": result["events"],
        "average": result["average"],
        "probs": None if probs is None else probs.tolist(),
        "epochs_run": len(history),
        "best_epoch": model.best_epoch_,
    }


def _consolidate(cells, event_names, reps):
    """Mean/sd over repetitions per event, then the cross-event average."""
    by_model = {}
    for kind in ("cet", "et", "bc"):
        ok = [c for c in cells if c is not None and c["kind"] == kind]
        if not ok:
            continue
        per_event = {}
        for name in event_names:
            metric_names = sorted({m for c in ok for m in c["events"][name]})
            per_event[name] = {
                m: metrics_mod.summarize([c["events"][name][m] for c in ok]) for m in metric_names
            }
        avg = {}
        for m in sorted({m for ev in per_event.values() for m in ev}):
            means = [per_event[name][m]["mean"] for name in event_names if m in per_event[name]]
            sds = [per_event[name][m]["sd"] for name in event_names if m in per_event[name]]
            avg[m] = {"mean": float(np.mean(means)), "sd": float(np.mean(sds))}
        by_model[kind] = {"per_event": per_event, "average": avg, "reps_completed": len(ok)}
    return by_model


def _format_cell(entry) -> str:
    if entry is None:
        return " " * 11
    return f"{entry['mean']:.2f} ± {entry['sd']:.2f}"


def _format_table(by_model, event_names) -> str:
    lines = [
        f"{'Model':<6}{'Task':<6}{'AUC':<14}{'MRAE':<14}{'CI':<14}",
        "-" * 54,
    ]
    for kind in ("cet", "et", "bc"):
        if kind not in by_model:
            continue
        rows = [(_TASK_LABELS.get(j, f"T{j + 1}"), by_model[kind]["per_event"][name]) for j, name in enumerate(event_names)]
        rows.append(("Avg", by_model[kind]["average"]))
        for i, (label, entry) in enumerate(rows):
            lines.append(
                f"{kind.upper() if i == 0 else '':<6}{label:<6}"
                f"{_format_cell(entry.get('auc')):<14}"
                f"{_format_cell(entry.get('mrae')):<14}"
                f"{_format_cell(entry.get('ci')):<14}"
            )
        lines.append("-" * 54)
    return "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    if args.reps < 1:
        raise CliError(f"--reps must be >= 1, got {args.reps}")
    cfg = resolve_config(args)
    out = _out_dir(args.out)
    ds = data_mod.load_csv(args.data)
    splits = data_mod.split(ds, seed=cfg["seed"])
    # architecture parity: one config drives all three model kinds, so
    # layer widths and training hyperparameters are identical
    grid = [(kind, cfg, rep, splits) for kind in ("cet", "et", "bc") for rep in range(args.reps)]
    cells = [None] * len(grid)
    failures = {}
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = {pool.submit(_compare_cell, payload): i for i, payload in enumerate(grid)}
            for future, i in futures.items():
                kind, _, rep, _ = grid[i]
                try:
                    cells[i] = future.result()
                    log.info("%s rep %d: done", kind, rep)
                except Exception as exc:  # noqa: BLE001 - per-cell isolation
                    failures[f"{kind}/rep{rep}"] = str(exc)
                    log.error("%s rep %d failed: %s", kind, rep, exc)
    else:
        for i, payload in enumerate(grid):
            kind, _, rep, _ = payload
            try:
                t0 = time.perf_counter()
                cells[i] = _compare_cell(payload)
                log.info("%s rep %d: done in %.1fs", kind, rep, time.perf_counter() - t0)
            except Exception as exc:  # noqa: BLE001
                failures[f"{kind}/rep{rep}"] = str(exc)
                log.error("%s rep %d failed: %s", kind, rep, exc)

    event_names = ds.event_names
    by_model = _consolidate(cells, event_names, args.reps)

    # pooled calibration across repetitions (test split is fixed)
    calibration = {}
    test_ds = splits[2]
    if test_ds.c_true is not None:
        for kind in ("cet", "bc"):
            ok = [c for c in cells if c is not None and c["kind"] == kind and c["probs"] is not None]
            if not ok:
                continue
            pooled = np.concatenate([np.asarray(c["probs"]) for c in ok], axis=0)
            labels = np.tile(test_ds.c_true, (len(ok), 1))
            calibration[kind] = {}
            for j, name in enumerate(event_names):
                points = metrics_mod.calibration_curve(pooled[:, j], labels[:, j], bins=10)
                calibration[kind][name] = [vars(p) for p in points]
                metrics_mod.calibration_to_csv(points, out / f"calibration_{kind}_{name}.csv")

    report = {
        "config": cfg,
        "data": str(args.data),
        "events": event_names,
        "reps": args.reps,
        "rng_algorithm": Rng.algorithm,
        "results": by_model,
        "calibration": calibration,
        "failures": failures,
        "partial": bool(failures),
    }
    metrics_mod.report_to_json(report, out / "compare.json")
    table = _format_table(by_model, event_names)
    with open(out / "compare.txt", "w", encoding="utf-8") as fh:
        fh.write(table)
    sys.stdout.write(table)
    log.info("consolidated report at %s", out / "compare.json")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cetime", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a censored synthetic dataset")
    p.add_argument("--n", type=int, default=40000)
    p.add_argument("--noise", type=float, default=0.1, help="occurrence label flip probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scheme", default="full_range", help="censoring scheme: full_range | twice_median")
    p.add_argument("--name", default="synthetic")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train one model kind")
    p.add_argument("--model", required=True, choices=sorted(models_mod.MODEL_KINDS))
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    _add_config_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="metrics report for a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", default="none", choices=["none", "train", "val", "test"])
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="train and evaluate cet/et/bc over repetitions")
    p.add_argument("--data", required=True)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    _add_config_flags(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except (CliError, data_mod.DataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
