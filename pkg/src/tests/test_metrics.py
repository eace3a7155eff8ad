import numpy as np
import pandas as pd
import pytest
from sklearn.metrics import f1_score, fbeta_score

from domain.graph import TaskSchema
from domain.metrics import (
    ConfusionCounts,
    MetricReport,
    delta_mtl,
    evaluate_predictions,
    f1_normal,
    f2_ciw,
    fbeta,
    micro_macro_f1,
)
from framework.exceptions import ContractError, DataParseException

METRICS = [("defect", "F2_CIW"), ("defect", "F1_Normal"), ("water", "MF1"), ("water", "mF1"),
           ("shape", "MF1"), ("shape", "mF1"), ("material", "MF1"), ("material", "mF1")]

# single-task and multi-task rows of the published Sewer-ML comparison
STL_VAL = [58.42, 92.42, 69.11, 79.71, 46.55, 98.06, 65.99, 96.71]
STL_TEST = [57.48, 92.16, 69.87, 80.09, 56.15, 97.59, 69.02, 96.67]
MTL_ROWS = [
    ("val", [59.73, 91.87, 70.51, 80.47, 71.64, 99.34, 80.28, 98.09], 0.1036),
    ("val", [61.21, 92.10, 70.06, 80.59, 68.34, 99.40, 83.48, 98.25], 0.1040),
    ("val", [61.35, 91.84, 70.57, 80.47, 76.17, 99.33, 82.63, 98.18], 0.1239),
    ("val", [61.70, 91.94, 70.57, 80.43, 74.53, 99.40, 86.63, 98.24], 0.1281),
    ("test", [58.29, 91.57, 71.17, 81.09, 79.48, 99.19, 76.35, 98.08], 0.0739),
    ("test", [59.91, 91.72, 70.61, 81.16, 78.50, 99.21, 72.73, 98.27], 0.0683),
    ("test", [60.07, 91.60, 70.69, 80.91, 80.32, 99.19, 75.13, 98.15], 0.0764),
    ("test", [60.57, 91.61, 71.30, 80.91, 81.10, 99.22, 73.95, 98.26], 0.0784),
    # equal task weighting and dynamic weight averaging, validation split
    ("val", [32.86, 88.40, 69.42, 79.85, 74.72, 99.21, 84.64, 97.83], 0.0545),
    ("val", [34.22, 86.57, 53.43, 70.83, 37.68, 98.18, 53.50, 90.79], -0.1570),
]


def as_metrics(values):
    return dict(zip(METRICS, values))


def test_fbeta_cases():
    assert fbeta(5, 0, 0, 2.0) == 1.0
    assert fbeta(1, 1, 1, 2.0) == pytest.approx(0.5)
    assert fbeta(0, 3, 2, 2.0) == 0.0
    assert fbeta(0, 0, 0, 1.0) == 0.0


def test_fbeta_monotone():
    base = fbeta(4, 2, 3, 2.0)
    assert fbeta(5, 2, 3, 2.0) >= base
    assert fbeta(4, 3, 3, 2.0) <= base
    assert fbeta(4, 2, 4, 2.0) <= base


def test_micro_macro_cases():
    perfect = ConfusionCounts(np.array([3, 2]), np.zeros(2, int), np.zeros(2, int), np.array([1, 2]))
    assert micro_macro_f1(perfect) == (1.0, 1.0)
    counts = ConfusionCounts(np.array([1, 1]), np.array([0, 1]), np.array([1, 0]), np.array([2, 2]))
    micro, macro = micro_macro_f1(counts)
    assert micro == pytest.approx(2 / 3)
    assert macro == pytest.approx(2 / 3)
    negatives = ConfusionCounts.from_multilabel(np.zeros((4, 1)), np.zeros((4, 1)))
    assert micro_macro_f1(negatives) == (0.0, 0.0)


def test_single_class_micro_equals_class_f1():
    counts = ConfusionCounts(np.array([3]), np.array([2]), np.array([1]), np.array([4]))
    micro, macro = micro_macro_f1(counts)
    assert micro == macro == pytest.approx(fbeta(3, 2, 1))


def test_scores_match_sklearn(rng):
    pred = (rng.random((60, 5)) < 0.4).astype(int)
    true = (rng.random((60, 5)) < 0.4).astype(int)
    counts = ConfusionCounts.from_multilabel(pred, true)
    micro, macro = micro_macro_f1(counts)
    assert micro == pytest.approx(f1_score(true, pred, average="micro", zero_division=0))
    assert macro == pytest.approx(f1_score(true, pred, average="macro", zero_division=0))
    np.testing.assert_allclose(
        fbeta(counts.tp, counts.fp, counts.fn, 2.0),
        fbeta_score(true, pred, beta=2.0, average=None, zero_division=0),
    )

    pred_idx = rng.integers(0, 4, size=80)
    true_idx = rng.integers(0, 4, size=80)
    counts = ConfusionCounts.from_multiclass(pred_idx, true_idx, 4)
    assert np.all(counts.tp + counts.fp + counts.fn + counts.tn == 80)
    micro, macro = micro_macro_f1(counts)
    assert micro == pytest.approx(f1_score(true_idx, pred_idx, average="micro"))
    assert macro == pytest.approx(f1_score(true_idx, pred_idx, average="macro", labels=range(4), zero_division=0))


def test_counts_merge_like_a_single_pass(rng):
    pred = (rng.random((30, 3)) < 0.5).astype(int)
    true = (rng.random((30, 3)) < 0.5).astype(int)
    merged = ConfusionCounts.from_multilabel(pred[:10], true[:10]) + ConfusionCounts.from_multilabel(pred[10:], true[10:])
    whole = ConfusionCounts.from_multilabel(pred, true)
    for attr in ("tp", "fp", "fn", "tn"):
        assert np.array_equal(getattr(merged, attr), getattr(whole, attr))


def test_f2_ciw():
    assert f2_ciw([1.0, 1.0, 1.0], [5.0, 1.0, 0.2]) == pytest.approx(1.0)
    assert f2_ciw([1.0, 0.0], [3.0, 1.0]) == pytest.approx(0.75)
    assert f2_ciw([0.2, 0.4, 0.9], [1.0, 1.0, 1.0]) == pytest.approx(0.5)
    with pytest.raises(ContractError):
        f2_ciw([1.0, 0.5], [1.0])


def test_f1_normal():
    empty = np.zeros((4, 3))
    assert f1_normal(empty, empty) == 1.0
    assert f1_normal(np.ones((4, 3)), np.array([[0, 0, 0], [1, 0, 0], [0, 0, 0], [0, 1, 1]])) == 0.0
    pred = np.array([[0, 0], [0, 0], [1, 0], [0, 1], [0, 0], [1, 1]])
    true = np.array([[0, 0], [1, 0], [0, 0], [0, 1], [0, 0], [1, 0]])
    # normal event: pred [T, T, F, F, T, F], true [T, F, T, F, T, F] -> tp 2, fp 1, fn 1
    assert f1_normal(pred, true) == pytest.approx(2 / 3)


def test_delta_identical_reports_is_zero():
    values = as_metrics(STL_VAL)
    assert delta_mtl(values, values) == 0.0


def test_delta_one_doubled_metric():
    base = as_metrics([0.5] * 8)
    multi = dict(base)
    multi[("water", "MF1")] = 1.0
    assert delta_mtl(multi, base) == pytest.approx(0.125)


@pytest.mark.parametrize("split,row,expected", MTL_ROWS)
def test_delta_reproduces_published_rows(split, row, expected):
    baseline = STL_VAL if split == "val" else STL_TEST
    assert delta_mtl(as_metrics(row), as_metrics(baseline)) == pytest.approx(expected, abs=5e-4)


def test_delta_skips_zero_baseline_and_checks_keys():
    base = as_metrics([0.0] + [0.5] * 7)
    multi = as_metrics([0.3] + [0.5] * 6 + [1.0])
    assert delta_mtl(multi, base) == pytest.approx(1 / 7)
    with pytest.raises(ContractError):
        delta_mtl({("defect", "F2_CIW"): 0.5}, base)


def sewer_schema():
    return TaskSchema.from_dict(
        {
            "tasks": [
                {"name": "defect", "kind": "multi_label", "classes": ["crack", "root"]},
                {"name": "shape", "kind": "multi_class", "classes": ["circular", "oval", "square"]},
            ]
        }
    )


def toy_report(split="val"):
    predictions = {"defect": np.array([[1, 0], [0, 0], [1, 1], [0, 1]]), "shape": np.array([0, 1, 1, 2])}
    targets = {"defect": np.array([[1, 0], [0, 0], [1, 0], [1, 1]]), "shape": np.array([0, 1, 2, 2])}
    return evaluate_predictions(sewer_schema(), predictions, targets, ciw={"defect": np.array([2.0, 1.0])}, split=split)


def test_evaluate_predictions():
    report = toy_report()
    f2 = [fbeta(2, 0, 1, 2.0), fbeta(1, 1, 0, 2.0)]
    assert report.per_class["defect"]["crack"] == pytest.approx(f2[0])
    assert report.tasks["defect"]["F2_CIW"] == pytest.approx((2 * f2[0] + f2[1]) / 3)
    assert report.tasks["defect"]["F1_Normal"] == 1.0
    assert report.tasks["shape"]["mF1"] == pytest.approx(0.75)
    assert list(report.headline_values()) == [
        ("defect", "F2_CIW"), ("defect", "F1_Normal"), ("shape", "MF1"), ("shape", "mF1")
    ]
    for value in report.headline_values().values():
        assert 0.0 <= value <= 1.0


def test_report_round_trip_and_rendering(tmp_path):
    report = toy_report()
    report.parameters = {"total": 120, "decoder": 80}
    report.with_delta(toy_report())
    assert report.delta_mtl == 0.0
    loaded = MetricReport.load(report.save(tmp_path / "report.json"))
    assert loaded.to_dict() == report.to_dict()

    text = report.render_table()
    assert "delta_mtl: +0.00%" in text
    assert "F2_CIW" in text and "shape" in text

    frame = report.per_class_frame()
    frame.to_csv(tmp_path / "classes.csv", index=False)
    back = pd.read_csv(tmp_path / "classes.csv")
    assert list(back.columns) == ["task", "class", "metric", "score"]
    assert len(back) == 5
    assert set(back[back.task == "defect"].metric) == {"F2"}


def test_report_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\n  \"tasks\": ")
    with pytest.raises(DataParseException):
        MetricReport.load(bad)
    with pytest.raises(DataParseException):
        MetricReport.load(tmp_path / "missing.json")
    incomplete = tmp_path / "incomplete.json"
    incomplete.write_text("{\"split\": \"val\"}")
    with pytest.raises(DataParseException):
        MetricReport.load(incomplete)
