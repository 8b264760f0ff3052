"""Scoring a verifier over labeled pairs: accuracy, F1, ROC AUC, confusion
matrix, confidence summary, and McNemar's paired test between two systems."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import LABEL_SAME
from .errors import EmptyInputError, LengthMismatchError
from .verifier import Verdict

# chi-square critical value, 1 dof, alpha = 0.05
CHI2_CRIT_05 = 3.841


@dataclass
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    @property
    def n(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


@dataclass
class EvalReport:
    accuracy: float
    f1: float
    roc_auc: float
    confusion: ConfusionMatrix
    confidence_mean: float
    confidence_std: float
    n: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "f1": self.f1,
            "roc_auc": self.roc_auc,
            "confusion": vars(self.confusion),
            "confidence_mean": self.confidence_mean,
            "confidence_std": self.confidence_std,
            "n": self.n,
        }


@dataclass
class McNemarResult:
    n01: int
    n10: int
    chi2: float
    significant_at_05: bool


def verdict_score(verdict: Verdict) -> float:
    """Same-author score in [0, 1]: signed confidence folded around 0.5.

    Orients every verdict on one axis so AUC can rank positive predictions
    above negative ones regardless of which side the confidence sits on.
    """
    signed = verdict.confidence if verdict.predicted == LABEL_SAME else -verdict.confidence
    return 0.5 + 0.5 * signed


def roc_auc(scores_pos, scores_neg) -> float:
    """Mann-Whitney AUC via average ranks; ties contribute 0.5 per pair."""
    pos = np.asarray(scores_pos, dtype=np.float64)
    neg = np.asarray(scores_neg, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise EmptyInputError("both score classes must be nonempty", code="empty-class")
    combined = np.concatenate([pos, neg])
    order = np.argsort(combined, kind="mergesort")
    ranks = np.empty(combined.size, dtype=np.float64)
    sorted_vals = combined[order]
    i = 0
    while i < combined.size:
        j = i
        while j + 1 < combined.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum_pos = float(ranks[:pos.size].sum())
    u = rank_sum_pos - pos.size * (pos.size + 1) / 2.0
    return u / (pos.size * neg.size)


def evaluate(verdicts: list[tuple[Verdict, str]]) -> EvalReport:
    """Aggregate verdicts against ground-truth labels into an EvalReport."""
    if not verdicts:
        raise EmptyInputError("cannot evaluate an empty verdict list")
    tp = fn = fp = tn = 0
    confidences = []
    scores_pos = []
    scores_neg = []
    for verdict, truth in verdicts:
        predicted_same = verdict.predicted == LABEL_SAME
        actually_same = truth == LABEL_SAME
        if actually_same and predicted_same:
            tp += 1
        elif actually_same:
            fn += 1
        elif predicted_same:
            fp += 1
        else:
            tn += 1
        confidences.append(verdict.confidence)
        (scores_pos if actually_same else scores_neg).append(verdict_score(verdict))

    confusion = ConfusionMatrix(tp=tp, fn=fn, fp=fp, tn=tn)
    n = confusion.n
    accuracy = (tp + tn) / n
    f1_denom = 2 * tp + fp + fn
    f1 = 2 * tp / f1_denom if f1_denom else 0.0
    auc = roc_auc(scores_pos, scores_neg) if scores_pos and scores_neg else 0.5
    conf = np.asarray(confidences)
    return EvalReport(
        accuracy=accuracy,
        f1=f1,
        roc_auc=auc,
        confusion=confusion,
        confidence_mean=float(conf.mean()),
        confidence_std=float(conf.std()),
        n=n,
    )


def mcnemar(preds_a, preds_b, truth) -> McNemarResult:
    """Paired chi-square on discordant predictions, continuity-corrected."""
    if not (len(preds_a) == len(preds_b) == len(truth)):
        raise LengthMismatchError(
            f"prediction/truth lengths differ: {len(preds_a)}, {len(preds_b)}, {len(truth)}"
        )
    if len(truth) == 0:
        raise EmptyInputError("mcnemar requires at least one prediction")
    n01 = n10 = 0
    for a, b, y in zip(preds_a, preds_b, truth):
        a_right = a == y
        b_right = b == y
        if not a_right and b_right:
            n01 += 1
        elif a_right and not b_right:
            n10 += 1
    discordant = n01 + n10
    chi2 = (abs(n01 - n10) - 1) ** 2 / discordant if discordant else 0.0
    return McNemarResult(n01=n01, n10=n10, chi2=chi2,
                         significant_at_05=chi2 > CHI2_CRIT_05)


def render_table(report: EvalReport, mcnemar_result: McNemarResult | None = None,
                 title: str = "Verification results") -> str:
    """Aligned plain-text table with one row per headline metric."""
    rows = [
        ("Accuracy", f"{report.accuracy * 100:.2f}"),
        ("ROC AUC", f"{report.roc_auc:.3f}"),
        ("F1 Score", f"{report.f1:.3f}"),
        ("Confidence", f"{report.confidence_mean * 100:.1f}% ± {report.confidence_std * 100:.1f}"),
    ]
    if mcnemar_result is not None:
        marker = "p<0.05" if mcnemar_result.significant_at_05 else "n.s."
        rows.append(("McNemar χ²", f"{mcnemar_result.chi2:.4g} ({marker})"))
    width = max(len(name) for name, _ in rows)
    lines = [title, "-" * len(title)]
    lines += [f"{name:<{width}}  {value}" for name, value in rows]
    c = report.confusion
    lines.append("")
    lines.append(f"Confusion: TP={c.tp} FN={c.fn} FP={c.fp} TN={c.tn} (n={c.n})")
    return "\n".join(lines)


def report_json(report: EvalReport, mcnemar_result: McNemarResult | None = None) -> str:
    payload = report.to_dict()
    if mcnemar_result is not None:
        payload["mcnemar"] = vars(mcnemar_result)
    return json.dumps(payload, indent=2)
