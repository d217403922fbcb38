"""MAE / MRE evaluation with per-path-length error breakdowns."""
from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np


@dataclass
class EvalReport:
    mae: float
    mre: float
    per_length: dict[int, tuple[float, int]]  # true length -> (mae, sample count)
    n_samples: int


def evaluate(preds, truths) -> EvalReport:
    """Errors of rounded predictions against true hop counts (all >= 2).

    mae = mean |pred - true|, mre = mean |pred - true| / true; per_length
    groups the absolute error by true distance.
    """
    preds = np.asarray(preds, dtype=np.float64)
    truths = np.asarray(truths, dtype=np.float64)
    if preds.shape != truths.shape or preds.ndim != 1:
        raise ValueError(f"prediction/truth shapes disagree: {preds.shape} vs {truths.shape}")
    if len(preds) == 0:
        raise ValueError("nothing to evaluate")
    if (truths < 2).any():
        raise ValueError("true distances must all be >= 2 (d=1 pairs are excluded upstream)")
    abs_err = np.abs(preds - truths)
    per_length: dict[int, tuple[float, int]] = {}
    for length in np.unique(truths.astype(np.int64)):
        sel = truths == length
        per_length[int(length)] = (float(abs_err[sel].mean()), int(sel.sum()))
    return EvalReport(
        mae=float(abs_err.mean()),
        mre=float((abs_err / truths).mean()),
        per_length=per_length,
        n_samples=len(preds),
    )


def report_per_length_csv(report: EvalReport, sink: TextIO) -> None:
    """CSV "length,mae,count" rows ascending by length."""
    sink.write("length,mae,count\n")
    for length in sorted(report.per_length):
        mae, count = report.per_length[length]
        sink.write(f"{length},{repr(mae)},{count}\n")


def write_metrics_csv(report: EvalReport, sink: TextIO) -> None:
    """Scalar metrics as "metric,value" rows."""
    sink.write("metric,value\n")
    sink.write(f"mae,{repr(report.mae)}\n")
    sink.write(f"mre,{repr(report.mre)}\n")
    sink.write(f"n_samples,{report.n_samples}\n")
