"""Command-line interface: train, predict, evaluate, cv-search, export-rules."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import metrics
from .dataio import apply_minmax, fit_minmax, load_csv, scale_features
from .errors import ConfigError, DataError, ModelFormatError, NumericalError
from .harness import DEFAULT_GRIDS, TrainConfig, default_positive_class, grid_search_cv, train_pipeline
from .inference import predict_class_index, predict_regression
from .rulebase_io import activation_csv, activation_json, export_rules_text, load_model, save_model


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _label_arg(s: str):
    return int(s) if s.lstrip("-").isdigit() else s


def _positive_index(class_labels, labels, positive):
    if positive is None:
        return default_positive_class(labels, len(class_labels))
    if positive not in class_labels:
        raise ConfigError(f"positive class {positive!r} not among {class_labels}")
    return class_labels.index(positive)


def cmd_train(args):
    cfg = TrainConfig.from_dict(_read_json(args.config)) if args.config else TrainConfig()
    if args.refit:
        cfg = TrainConfig.from_dict({**cfg.to_dict(), "refit": True})
    data = load_csv(args.data, _label_arg(args.label), regression=args.regression)
    data = apply_minmax(data, fit_minmax(data))
    model = train_pipeline(data, cfg)
    save_model(model, args.out)
    print(f"trained {model.n_rules}/{model.n_clusters} rules, "
          f"complexity {metrics.model_complexity(model)} -> {args.out}")


def cmd_predict(args):
    model = load_model(args.model)
    if args.label is not None:
        data = load_csv(args.data, _label_arg(args.label), regression=not model.is_classifier,
                        class_labels=model.class_labels if model.is_classifier else None)
        X = data.features
    else:
        X = _load_unlabeled(args.data)
    if model.norm_params is not None:
        X = scale_features(X, model.norm_params)
    out = predict_regression(X, model, include_abandoned=args.zeroed)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if model.is_classifier:
            w.writerow(["prediction"] + [f"score_{c}" for c in model.class_labels])
            for row in out:
                w.writerow([model.class_labels[int(np.argmax(row))]] + [repr(float(v)) for v in row])
        else:
            w.writerow(["prediction"])
            for row in out:
                w.writerow([repr(float(row[0]))])
    print(f"wrote {len(out)} predictions -> {args.out}")


def _load_unlabeled(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: no data rows")

    def numeric(row):
        try:
            [float(c) for c in row]
        except ValueError:
            return False
        return True

    if not numeric(rows[0]):
        rows = rows[1:]
    try:
        X = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if X.ndim != 2:
        raise DataError(f"{path}: ragged rows")
    return X


def cmd_evaluate(args):
    model = load_model(args.model)
    if not model.is_classifier:
        data = load_csv(args.data, _label_arg(args.label), regression=True)
        X = apply_minmax(data, model.norm_params).features if model.norm_params else data.features
        resid = predict_regression(X, model, include_abandoned=args.zeroed)[:, 0] - data.labels
        result = {"rmse": float(np.sqrt(np.mean(resid ** 2)))}
    else:
        data = load_csv(args.data, _label_arg(args.label), class_labels=model.class_labels)
        X = apply_minmax(data, model.norm_params).features if model.norm_params else data.features
        pred = predict_class_index(X, model, include_abandoned=args.zeroed)
        pos = _positive_index(model.class_labels, data.labels, args.positive)
        result = metrics.classification_report(data.labels, pred, len(model.class_labels), pos)
    result["complexity"] = metrics.model_complexity(model)
    result["n_rules"] = model.n_rules
    for k, v in result.items():
        print(f"{k:<12} {v:.4f}" if isinstance(v, float) else f"{k:<12} {v}")
    doc = json.dumps(result, indent=2, sort_keys=True)
    if args.json:
        Path(args.json).write_text(doc + "\n")
    else:
        print(doc)


def cmd_cv_search(args):
    data = load_csv(args.data, _label_arg(args.label), regression=args.regression)
    grids = _read_json(args.grids) if args.grids else DEFAULT_GRIDS
    base = TrainConfig.from_dict(_read_json(args.config)) if args.config else TrainConfig()
    base = TrainConfig.from_dict({**base.to_dict(), "seed": args.seed})
    objective = args.objective if not args.regression else "neg_rmse"
    pos = _positive_index(data.class_labels, data.labels, args.positive) if data.is_classification else None
    best, report, summary = grid_search_cv(data, grids, k=args.folds, seed=args.seed, objective=objective,
                                           base=base, max_configs=args.max_configs, positive_class=pos)
    doc = {
        "objective": objective,
        "seed": args.seed,
        "folds": args.folds,
        "n_configs": len(summary),
        "best_config": best.to_dict(),
        "report": report.to_dict(include_timing=args.timing),
        "grid": summary,
    }
    Path(args.out).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    for m in report.fold_metrics:
        print(f"{m:<12} {report.mean(m):.4f} +- {report.std(m):.4f}")
    print(f"complexity   {report.mean_complexity:.1f}")
    print(f"best config  {json.dumps(best.to_dict(), sort_keys=True)}")


def cmd_export_rules(args):
    model = load_model(args.model)
    text = export_rules_text(model)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.activation_csv:
        Path(args.activation_csv).write_text(activation_csv(model))
    if args.activation_json:
        Path(args.activation_json).write_text(activation_json(model) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="concise-tsk", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a model on a CSV file")
    t.add_argument("--data", required=True)
    t.add_argument("--label", required=True, help="label column name or index")
    t.add_argument("--config", help="JSON with TrainConfig fields")
    t.add_argument("--out", required=True)
    t.add_argument("--regression", action="store_true", help="real-valued target")
    t.add_argument("--refit", action="store_true", help="re-solve consequents on the retained rules")
    t.set_defaults(func=cmd_train)

    pr = sub.add_parser("predict", help="predict with a saved model")
    pr.add_argument("--model", required=True)
    pr.add_argument("--data", required=True)
    pr.add_argument("--label", help="label column to skip, if the file has one")
    pr.add_argument("--out", required=True)
    pr.add_argument("--zeroed", action="store_true", help="keep pruned rules in the normalization")
    pr.set_defaults(func=cmd_predict)

    e = sub.add_parser("evaluate", help="metrics of a saved model on labelled data")
    e.add_argument("--model", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--label", required=True)
    e.add_argument("--positive", help="positive class for Jaccard (default: minority class)")
    e.add_argument("--json", help="also write the metrics here")
    e.add_argument("--zeroed", action="store_true")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("cv-search", help="grid search with k-fold cross-validation")
    c.add_argument("--data", required=True)
    c.add_argument("--label", required=True)
    c.add_argument("--grids", help="JSON mapping parameter -> list of values (default: the built-in DEFAULT_GRIDS)")
    c.add_argument("--config", help="base TrainConfig JSON for non-grid fields")
    c.add_argument("--folds", type=int, default=5)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--objective", default="f_measure", choices=metrics.METRIC_NAMES)
    c.add_argument("--max-configs", type=int, help="evaluate a seeded random subset of this size")
    c.add_argument("--positive")
    c.add_argument("--regression", action="store_true")
    c.add_argument("--timing", action="store_true", help="include wall-clock times (breaks byte-identical reruns)")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_cv_search)

    x = sub.add_parser("export-rules", help="linguistic rule base and activation matrix")
    x.add_argument("--model", required=True)
    x.add_argument("--out")
    x.add_argument("--activation-csv")
    x.add_argument("--activation-json")
    x.set_defaults(func=cmd_export_rules)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, DataError, ModelFormatError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
