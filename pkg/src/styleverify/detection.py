"""Perplexity from externally produced token log-probabilities, and the
AI-vs-human separability report (group means, histogram series, CDF table).

The toolkit never hosts a scoring language model: log-probabilities arrive
through a JSONL interface and must use the natural-log convention.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyInputError,
    MalformedRecordError,
    NonFiniteInputError,
    PositiveLogProbError,
)


@dataclass
class TokenLogProbs:
    id: str
    logprobs: list[float]
    scorer_tag: str = ""


@dataclass
class PerplexityReport:
    per_doc: dict[str, float]
    group_means: dict[str, float]
    cdf_at: dict[float, dict[str, float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_doc": self.per_doc,
            "group_means": self.group_means,
            "cdf_at": {str(t): fr for t, fr in sorted(self.cdf_at.items())},
        }


def perplexity(tlp: TokenLogProbs) -> float:
    """exp(-mean(logprobs)); logprobs must be finite, nonempty, and <= 0."""
    if not len(tlp.logprobs):
        raise EmptyInputError(f"{tlp.id!r}: empty logprob sequence", code="empty-sequence")
    arr = np.asarray(tlp.logprobs, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInputError(f"{tlp.id!r}: non-finite log-probability")
    if np.any(arr > 0):
        raise PositiveLogProbError(
            f"{tlp.id!r}: log-probabilities must be <= 0 (natural-log convention)"
        )
    return float(math.exp(-float(arr.mean())))


def detectability_report(groups: Mapping[str, Sequence[TokenLogProbs]],
                         thresholds: Iterable[float] = ()) -> PerplexityReport:
    """Per-document perplexities, per-group means, and, for each threshold,
    the fraction of each group at or below it."""
    per_doc: dict[str, float] = {}
    group_ppls: dict[str, np.ndarray] = {}
    for group, docs in groups.items():
        if not docs:
            raise EmptyInputError(f"group {group!r} is empty", code="empty-group")
        ppls = []
        for tlp in docs:
            ppl = perplexity(tlp)
            per_doc[tlp.id] = ppl
            ppls.append(ppl)
        group_ppls[group] = np.asarray(ppls)
    means = {g: float(p.mean()) for g, p in group_ppls.items()}
    cdf_at: dict[float, dict[str, float]] = {}
    for t in thresholds:
        cdf_at[float(t)] = {
            g: float(np.mean(p <= t)) for g, p in group_ppls.items()
        }
    return PerplexityReport(per_doc=per_doc, group_means=means, cdf_at=cdf_at)


def load_logprobs(path: str | Path) -> list[TokenLogProbs]:
    """Read a logprob JSONL file: {"id", "scorer_tag", "logprobs"} per record.

    An optional leading header record {"header": true, "log_base": "e"} may
    declare the convention; any base other than natural log is rejected.
    """
    out: list[TokenLogProbs] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecordError(f"{path}:{lineno}: bad logprob record: {exc}")
            if rec.get("header"):
                if rec.get("log_base", "e") != "e":
                    raise MalformedRecordError(
                        f"{path}:{lineno}: log base {rec['log_base']!r} rejected; "
                        "only natural log ('e') is supported"
                    )
                continue
            try:
                tlp = TokenLogProbs(
                    id=rec["id"],
                    logprobs=[float(v) for v in rec["logprobs"]],
                    scorer_tag=rec.get("scorer_tag", ""),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedRecordError(f"{path}:{lineno}: bad logprob record: {exc}")
            if any(not math.isfinite(v) or v > 0 for v in tlp.logprobs):
                raise MalformedRecordError(
                    f"{path}:{lineno}: logprobs must be finite and <= 0"
                )
            out.append(tlp)
    return out


def histogram_series(group_ppls: Mapping[str, Sequence[float]], bins: int = 30,
                     ) -> list[dict]:
    """Density histogram rows on common bin edges, one row per (group, bin)."""
    all_vals = np.concatenate([np.asarray(v, dtype=np.float64) for v in group_ppls.values()])
    edges = np.histogram_bin_edges(all_vals, bins=bins)
    rows = []
    for group, vals in group_ppls.items():
        density, _ = np.histogram(np.asarray(vals, dtype=np.float64), bins=edges, density=True)
        for lo, hi, d in zip(edges[:-1], edges[1:], density):
            rows.append({"group": group, "bin_lo": float(lo), "bin_hi": float(hi),
                         "density": float(d)})
    return rows


def cdf_series(group_ppls: Mapping[str, Sequence[float]],
               value_key: str = "ppl") -> list[dict]:
    """Empirical CDF sample rows, one per (group, observed value)."""
    rows = []
    for group, vals in group_ppls.items():
        arr = np.sort(np.asarray(vals, dtype=np.float64))
        for i, v in enumerate(arr, 1):
            rows.append({"group": group, value_key: float(v), "cdf": i / arr.size})
    return rows


def write_csv(rows: list[dict], path: str | Path) -> None:
    import csv

    if not rows:
        Path(path).write_text("")
        return
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
