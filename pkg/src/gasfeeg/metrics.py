"""Confusion-matrix metrics, per-class and macro-averaged reporting, and
ROC/AUC computation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .ingest import FOCAL, NORMAL


class MetricsError(ValueError):
    pass


@dataclass
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    undefined: list[str] = field(default_factory=list)


@dataclass
class RocCurve:
    points: list[tuple[float, float, float]]  # (fpr, tpr, threshold)
    auc: float


def confusion(preds, labels, positive=FOCAL) -> ConfusionCounts:
    preds = list(preds)
    labels = list(labels)
    if len(preds) != len(labels):
        raise MetricsError(
            f"length mismatch: {len(preds)} predictions, {len(labels)} labels"
        )
    if not preds:
        raise MetricsError("empty input")
    tp = fp = tn = fn = 0
    for p, y in zip(preds, labels):
        if y == positive:
            if p == positive:
                tp += 1
            else:
                fn += 1
        else:
            if p == positive:
                fp += 1
            else:
                tn += 1
    return ConfusionCounts(tp, fp, tn, fn)


def prf(counts: ConfusionCounts) -> ClassMetrics:
    """Precision, recall, F1. Zero-denominator cases report 0 and are
    flagged instead of raising."""
    undefined = []
    if counts.tp + counts.fp > 0:
        precision = counts.tp / (counts.tp + counts.fp)
    else:
        precision = 0.0
        undefined.append("precision")
    if counts.tp + counts.fn > 0:
        recall = counts.tp / (counts.tp + counts.fn)
    else:
        recall = 0.0
        undefined.append("recall")
    if precision + recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        undefined.append("f1")
    return ClassMetrics(precision, recall, f1,
                        counts.tp + counts.fn, undefined)


def macro_average(per_class: dict[str, ClassMetrics]) -> ClassMetrics:
    """Unweighted mean of per-class precision/recall/F1 (F1 values are
    averaged directly, not recomputed from averaged P and R)."""
    if not per_class:
        raise MetricsError("no classes to average")
    ms = list(per_class.values())
    return ClassMetrics(
        precision=float(np.mean([m.precision for m in ms])),
        recall=float(np.mean([m.recall for m in ms])),
        f1=float(np.mean([m.f1 for m in ms])),
        support=sum(m.support for m in ms),
    )


def roc_curve(scores, labels, positive=FOCAL) -> RocCurve:
    """ROC over descending distinct score thresholds (ties grouped), AUC by
    the trapezoidal rule."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.size != labels.size:
        raise MetricsError("length mismatch")
    pos = labels == positive
    n_pos = int(pos.sum())
    n_neg = int(scores.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise MetricsError("both classes must be present")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    p = pos[order]
    points = [(0.0, 0.0, float("inf"))]
    tp = fp = 0
    i = 0
    while i < s.size:
        j = i
        while j < s.size and s[j] == s[i]:
            if p[j]:
                tp += 1
            else:
                fp += 1
            j += 1
        points.append((fp / n_neg, tp / n_pos, float(s[i])))
        i = j
    auc = 0.0
    for (f0, t0, _), (f1, t1, _) in zip(points, points[1:]):
        auc += (f1 - f0) * (t0 + t1) / 2.0
    return RocCurve(points, float(auc))


def auc_rank_statistic(scores, labels, positive=FOCAL) -> float:
    """Independent AUC oracle: (concordant pairs + half ties) / (P * N)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos_scores = scores[labels == positive]
    neg_scores = scores[labels != positive]
    if pos_scores.size == 0 or neg_scores.size == 0:
        raise MetricsError("both classes must be present")
    diff = pos_scores[:, None] - neg_scores[None, :]
    concordant = (diff > 0).sum()
    ties = (diff == 0).sum()
    return float((concordant + 0.5 * ties) / (pos_scores.size * neg_scores.size))


def classification_report(preds, labels, scores=None,
                          classes=(FOCAL, NORMAL)) -> dict:
    """Per-class rows (each class taken as positive in turn), macro average,
    raw counts, and AUC when positive-class scores are supplied."""
    per_class = {}
    counts = {}
    for cls in classes:
        c = confusion(preds, labels, positive=cls)
        counts[cls] = c
        per_class[cls] = prf(c)
    avg = macro_average(per_class)
    report = {
        "per_class": {
            cls: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
                "undefined": m.undefined,
            }
            for cls, m in per_class.items()
        },
        "average": {"precision": avg.precision, "recall": avg.recall,
                    "f1": avg.f1},
        "counts": {cls: {"tp": c.tp, "fp": c.fp, "tn": c.tn, "fn": c.fn}
                   for cls, c in counts.items()},
    }
    if scores is not None:
        roc = roc_curve(scores, labels, positive=classes[0])
        report["auc"] = roc.auc
        report["roc_points"] = [[f, t, (None if th == float("inf") else th)]
                                for f, t, th in roc.points]
    return report


def write_metrics_json(path, report: dict):
    with open(path, "w") as f:
        f.write(json.dumps(report, indent=2, sort_keys=True))


def write_metrics_csv(path, report: dict, model_name="Custom CNN"):
    """CSV mirror of the per-class + average layout (one model block)."""
    with open(path, "w") as f:
        f.write("DL architecture,Signal,Precision,Recall,F1-score,AUC\n")
        auc = report.get("auc", "")
        first = True
        for cls, m in report["per_class"].items():
            f.write(f"{model_name if first else ''},{cls},"
                    f"{m['precision']:.4f},{m['recall']:.4f},{m['f1']:.4f},"
                    f"{auc if first else ''}\n")
            first = False
        avg = report["average"]
        f.write(f",Average,{avg['precision']:.4f},{avg['recall']:.4f},"
                f"{avg['f1']:.4f},\n")


def write_roc_csv(path, report: dict):
    with open(path, "w") as f:
        f.write("threshold,fpr,tpr\n")
        for fpr, tpr, th in report.get("roc_points", []):
            f.write(f"{'' if th is None else '%.17g' % th},"
                    f"{fpr:.17g},{tpr:.17g}\n")
