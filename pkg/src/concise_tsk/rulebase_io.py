"""Model JSON round-trip and human-readable rule-base export."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .antecedent import RuleAntecedent
from .dataio import NormParams
from .errors import DataError, ModelFormatError
from .inference import Rule, TskModel

SCHEMA_VERSION = 1
LABELS = ("Low", "Lower", "Medium", "Higher", "High")


def linguistic_label(center: float) -> str:
    """Five-bin label of a membership center in [0, 1]; bin edges belong to
    the upper bin."""
    if not 0.0 <= center <= 1.0:
        raise DataError(f"center {center} outside [0, 1]")
    return LABELS[min(int(center * 5), 4)] if center < 1.0 else LABELS[4]


def _bin(center: float) -> str:
    # centers can sit a hair outside [0, 1] only through round-off
    return linguistic_label(min(max(center, 0.0), 1.0))


def _feature_names(model: TskModel, d: int | None = None) -> list[str]:
    if model.feature_names:
        return list(model.feature_names)
    if d is None:
        d = 1 + max(int(r.antecedent.feature_indices.max()) for r in model.rules + model.abandoned)
    return [f"x{i}" for i in range(d)]


def _fmt_values(values) -> str:
    vals = [f"{v:.4f}" for v in values]
    return vals[0] if len(vals) == 1 else "[" + ", ".join(vals) + "]"


def export_rules_text(model: TskModel) -> str:
    names = _feature_names(model)
    lines = []
    if model.outputs > 1 and model.class_labels:
        lines.append("# outputs: " + ", ".join(model.class_labels))
    for r in model.rules:
        a = r.antecedent
        clauses = " and ".join(f"{names[i]} is {_bin(c)}" for i, c in zip(a.feature_indices, a.centers))
        lines.append(f"Rule {r.index + 1}: IF {clauses} THEN output = {_fmt_values(r.consequent)}")
    dropped = sorted(r.index + 1 for r in model.abandoned)
    retained = {r.index for r in model.rules}
    # rules not recorded as abandoned (e.g. hand-built models) are listed too
    dropped = sorted(set(dropped) | {k + 1 for k in range(model.n_clusters) if k not in retained})
    lines.append("")
    lines.append(f"Retained rules: {len(model.rules)} of {model.n_clusters}")
    lines.append("Abandoned rules: " + (", ".join(map(str, dropped)) if dropped else "none"))
    return "\n".join(lines) + "\n"


def export_activation_matrix(model: TskModel, d: int | None = None) -> tuple[list[str], list[int], list[list[str]]]:
    """Rule x feature grid: the linguistic label of each selected feature, "off"
    elsewhere.  Returns (feature names, 1-based rule numbers, grid rows)."""
    names = _feature_names(model, d)
    d = len(names) if d is None else d
    grid, idx = [], []
    for r in model.rules:
        row = ["off"] * d
        for i, c in zip(r.antecedent.feature_indices, r.antecedent.centers):
            row[i] = _bin(c)
        grid.append(row)
        idx.append(r.index + 1)
    return names[:d], idx, grid


def activation_csv(model: TskModel, d: int | None = None) -> str:
    names, idx, grid = export_activation_matrix(model, d)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rule"] + names)
    for k, row in zip(idx, grid):
        w.writerow([k] + row)
    return buf.getvalue()


def activation_json(model: TskModel, d: int | None = None) -> str:
    names, idx, grid = export_activation_matrix(model, d)
    return json.dumps({"features": names, "rules": idx, "grid": grid}, indent=2)


def _rule_to_dict(r: Rule) -> dict:
    a = r.antecedent
    return {
        "index": int(r.index),
        "features": [int(i) for i in a.feature_indices],
        "centers": [float(v) for v in a.centers],
        "widths": [float(v) for v in a.widths],
        "consequents": [float(v) for v in r.consequent],
    }


def _rule_from_dict(d: dict) -> Rule:
    return Rule(int(d["index"]), RuleAntecedent(d["features"], d["centers"], d["widths"]), d["consequents"])


def model_to_dict(model: TskModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "outputs": model.outputs,
        "n_clusters": model.n_clusters,
        "class_labels": model.class_labels,
        "feature_names": model.feature_names,
        "norm_params": model.norm_params.to_list() if model.norm_params is not None else None,
        "rules": [_rule_to_dict(r) for r in model.rules],
        "abandoned": [_rule_to_dict(r) for r in model.abandoned],
        "config": model.config,
    }


def model_from_dict(doc: dict) -> TskModel:
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise ModelFormatError("not a model document (missing schema_version)")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ModelFormatError(f"unsupported version {doc['schema_version']!r} (expected {SCHEMA_VERSION})")
    try:
        norm = doc.get("norm_params")
        return TskModel(
            rules=[_rule_from_dict(r) for r in doc["rules"]],
            outputs=int(doc["outputs"]),
            n_clusters=int(doc.get("n_clusters", len(doc["rules"]))),
            class_labels=doc.get("class_labels"),
            feature_names=doc.get("feature_names"),
            norm_params=NormParams.from_list(norm) if norm is not None else None,
            config=doc.get("config") or {},
            abandoned=[_rule_from_dict(r) for r in doc.get("abandoned", [])],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from exc


def save_model(model: TskModel, path) -> None:
    # json writes floats with repr(), which round-trips exactly
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1, allow_nan=False))


def load_model(path) -> TskModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ModelFormatError(f"{path}: {exc}") from exc
    return model_from_dict(doc)


def rule_activation_counts(model: TskModel) -> np.ndarray:
    """Number of selected features per retained rule."""
    return np.array([r.antecedent.length for r in model.rules], dtype=int)
