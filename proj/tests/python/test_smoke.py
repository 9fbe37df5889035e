import math

import pytest

import eusboost


def test_train_predict_roundtrip(tmp_path):
    ds = eusboost.generate_synthetic(n=120, ir=5.0, delta=3.0, seed=2)
    assert ds.n == 120
    assert ds.positive_label == "pos"
    model = eusboost.train("eub", ds, rounds=3, seed=1)
    assert model.method == "EUB"
    rows = [ds.row(i) for i in range(10)]
    preds = model.predict(rows)
    assert len(preds) == 10
    assert all(label in ("pos", "neg") and 0.0 <= score <= 1.0 for label, score in preds)

    path = tmp_path / "model.json"
    model.save(str(path))
    again = eusboost.Model.load(str(path))
    assert again.predict(rows) == preds
    assert again.to_json() == model.to_json()


def test_metrics():
    cm = eusboost.ConfusionMatrix(tp=9, fn=1, fp=2, tn=8)
    assert math.isclose(eusboost.geometric_mean(cm), math.sqrt(0.72), rel_tol=1e-12)
    with pytest.raises(eusboost.UndefinedMetricError):
        eusboost.sensitivity(eusboost.ConfusionMatrix(tp=0, fn=0, fp=1, tn=1))


def test_wilcoxon():
    a = [0.11, 0.52, 0.33, 0.94, 0.25]
    b = [0.1, 0.5, 0.3, 0.9, 0.2]
    assert eusboost.wilcoxon_signed_rank(a, b) == 0.0625
    with pytest.raises(eusboost.DegenerateError):
        eusboost.wilcoxon_signed_rank(a, a)


def test_eus_select_matches_exhaustive_on_small_data():
    ds = eusboost.make_dataset(
        [[0.0], [0.1], [0.2], [5.0], [5.1], [5.2], [5.3]],
        ["a", "a", "a", "b", "b", "b", "b"],
    )
    bits, fit = eusboost.exhaustive_best(ds)
    sel_bits, ids, sel_fit = eusboost.eus_select(ds, seed=3)
    assert math.isclose(sel_fit, fit, abs_tol=1e-12)
    assert sum(sel_bits) == len(ids)


def test_bad_data_raises():
    with pytest.raises(eusboost.DataError):
        eusboost.make_dataset([[1.0], [float("nan")]], ["a", "b"])
    with pytest.raises(ValueError):
        eusboost.train("nope", eusboost.generate_synthetic(n=40, seed=1))


def test_compare_shape():
    ds = eusboost.generate_synthetic(n=80, ir=3.0, delta=2.0, seed=4)
    cfg = eusboost.EusConfig()
    cfg.max_evaluations = 200
    out = eusboost.compare(ds, methods=["RUB", "EUB"], rounds=3, eus=cfg)
    assert set(out["means"]) == {"RUB", "EUB"}
    assert "EUB vs. RUB" in out["text"]
    assert out["csv"].startswith("table,subject,measure,value,direction")
