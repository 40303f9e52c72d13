import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from concise_tsk.antecedent import RuleAntecedent
from concise_tsk.dataio import Dataset, NormParams
from concise_tsk.errors import DataError, ModelFormatError
from concise_tsk.harness import TrainConfig, train_pipeline
from concise_tsk.inference import Rule, TskModel, predict_regression
from concise_tsk.rulebase_io import (activation_csv, activation_json, export_activation_matrix,
                                     export_rules_text, linguistic_label, load_model, model_to_dict,
                                     save_model)
from conftest import two_blobs


@pytest.mark.parametrize("c, label", [(0.0, "Low"), (0.1999, "Low"), (0.2, "Lower"), (0.4, "Medium"),
                                      (0.6, "Higher"), (0.8, "High"), (1.0, "High")])
def test_bins(c, label):
    assert linguistic_label(c) == label


def test_bin_out_of_range():
    with pytest.raises(DataError):
        linguistic_label(1.01)


@given(st.floats(0, 1), st.floats(0, 1))
def test_bins_monotone(a, b):
    order = ["Low", "Lower", "Medium", "Higher", "High"]
    lo, hi = min(a, b), max(a, b)
    assert order.index(linguistic_label(lo)) <= order.index(linguistic_label(hi))


def test_single_rule_text():
    m = TskModel(rules=[Rule(0, RuleAntecedent([0], [0.9], [0.1]), [3.9374])], outputs=1, n_clusters=1,
                 feature_names=["f1"])
    text = export_rules_text(m)
    assert text.splitlines()[0] == "Rule 1: IF f1 is High THEN output = 3.9374"
    assert "Abandoned rules: none" in text


def _trained(K=8, lam=0.9, beta=0.1, seed=0):
    X, y = two_blobs(n_per=25, d=4, seed=seed)
    ds = Dataset(X, y, ["a", "b", "c", "d"], class_labels=["neg", "pos"],
                 norm_params=NormParams(np.zeros(4), np.ones(4)))
    return train_pipeline(ds, TrainConfig(K=K, lam=lam, beta=beta, seed=seed))


def test_text_partitions_rule_indices():
    m = _trained()
    text = export_rules_text(m)
    listed = [int(line.split(":")[0].split()[1]) for line in text.splitlines() if line.startswith("Rule ")]
    footer = [line for line in text.splitlines() if line.startswith("Abandoned rules:")][0]
    dropped = [] if footer.endswith("none") else [int(v) for v in footer.split(":")[1].split(",")]
    assert len(listed) == m.n_rules
    assert sorted(listed + dropped) == list(range(1, 9))


def test_pruned_footer_lists_abandoned():
    a = RuleAntecedent([0], [0.1], [0.1])
    m = TskModel(rules=[Rule(1, a, [0.5])], outputs=1, n_clusters=4,
                 abandoned=[Rule(k, a, [0.0]) for k in (0, 2, 3)], feature_names=["x"])
    assert "Abandoned rules: 1, 3, 4" in export_rules_text(m)


def test_dense_model_text_lists_all_features():
    m = _trained(beta=0.0, lam=0.0)
    for line in export_rules_text(m).splitlines():
        if line.startswith("Rule "):
            assert line.count(" is ") == 4


def test_activation_matrix():
    a = RuleAntecedent([0, 5], [0.7, 0.05], [0.1, 0.1])
    m = TskModel(rules=[Rule(0, a, [1.0])], outputs=1, n_clusters=1)
    names, idx, grid = export_activation_matrix(m, 7)
    assert idx == [1]
    assert grid[0] == ["Higher", "off", "off", "off", "off", "Low", "off"]
    assert activation_csv(m, 7).splitlines()[0] == "rule,x0,x1,x2,x3,x4,x5,x6"
    assert json.loads(activation_json(m, 7))["grid"] == grid


def test_dense_activation_has_no_off():
    _, _, grid = export_activation_matrix(_trained(beta=0.0, lam=0.0))
    assert all(cell != "off" for row in grid for cell in row)


def test_round_trip_bit_identical(tmp_path):
    m = _trained()
    save_model(m, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    X = np.random.default_rng(1).random((50, 4))
    np.testing.assert_array_equal(predict_regression(X, m), predict_regression(X, back))
    assert model_to_dict(back) == model_to_dict(m)


def test_truncated_file(tmp_path):
    m = _trained()
    p = tmp_path / "m.json"
    save_model(m, p)
    p.write_text(p.read_text()[:100])
    with pytest.raises(ModelFormatError, match="invalid JSON"):
        load_model(p)


def test_unsupported_version(tmp_path):
    doc = model_to_dict(_trained())
    doc["schema_version"] = 2
    p = tmp_path / "m.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(ModelFormatError, match="unsupported version"):
        load_model(p)


def test_missing_fields(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"schema_version": 1, "rules": [{"index": 0}]}))
    with pytest.raises(ModelFormatError):
        load_model(p)
