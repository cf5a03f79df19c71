"""Evaluation metrics: AUC, censoring-aware relative error, Harrell's
concordance index with the observed-before-censored eligibility rule,
and calibration curves.

AUC uses midranks, so ties contribute 1/2 and the result matches the
brute-force pair statistic exactly; the concordance index is a direct
pair scan (evaluation sets here are small). Both are invariant under
strictly increasing transforms of the scores.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass

import numpy as np


class MetricError(ValueError):
    """The metric is undefined on the given inputs."""


def _midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties replaced by the mean rank of their group."""
    order = np.argsort(values, kind="mergesort")
    sorted_v = values[order]
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_v[j + 1] == sorted_v[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auc(scores, labels) -> float:
    """P(score of a random positive > score of a random negative), ties 1/2."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise MetricError(f"scores/labels must be matching vectors, got {scores.shape}, {labels.shape}")
    if not np.all((labels == 0) | (labels == 1)):
        raise MetricError("labels must be 0 or 1")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricError("AUC undefined: both classes must be present")
    ranks = _midranks(scores)
    return float((ranks[pos].sum() - 0.5 * n_pos * (n_pos + 1)) / (n_pos * n_neg))


def mrae(t, s, t_hat, t_max: float) -> float:
    """Mean relative absolute error, one-sided for censored rows.

    Observed rows contribute |t - t_hat| / t_max; censored rows are
    penalized only when the prediction falls before the censoring time,
    contributing max(0, t - t_hat) / t_max.
    """
    t = np.asarray(t, dtype=np.float64)
    s = np.asarray(s)
    t_hat = np.asarray(t_hat, dtype=np.float64)
    if not t_max > 0.0:
        raise MetricError(f"t_max must be > 0, got {t_max}")
    if t.shape != s.shape or t.shape != t_hat.shape:
        raise MetricError("t, s, t_hat must share a shape")
    err = np.where(s == 1, np.abs(t - t_hat), np.maximum(0.0, t - t_hat))
    return float(err.mean() / t_max)


def concordance_index(t, s, t_hat) -> float:
    """Harrell's concordance over eligible pairs.

    A pair is eligible when both events are observed with distinct
    times, or when one is observed and the other censored strictly
    later. Both cases reduce to: for every observed row i, every row j
    with t_j > t_i is an eligible pair in which i's event is known to
    come first; the pair is concordant when t_hat_i < t_hat_j, and a
    prediction tie counts 1/2.
    """
    t = np.asarray(t, dtype=np.float64)
    s = np.asarray(s)
    t_hat = np.asarray(t_hat, dtype=np.float64)
    if t.shape != s.shape or t.shape != t_hat.shape or t.ndim != 1:
        raise MetricError("t, s, t_hat must be matching vectors")
    concordant = 0.0
    eligible = 0
    observed = np.flatnonzero(s == 1)
    for i in observed:
        later = t > t[i]
        eligible += int(later.sum())
        concordant += (t_hat[i] < t_hat[later]).sum() + 0.5 * (t_hat[i] == t_hat[later]).sum()
    if eligible == 0:
        raise MetricError("concordance undefined: no eligible pairs")
    return float(concordant / eligible)


@dataclass
class CalibrationPoint:
    bin_center: float
    predicted_mean: float
    empirical_freq: float
    count: int


def calibration_curve(p, c, bins: int = 10) -> list[CalibrationPoint]:
    """Equal-width probability bins; empty bins are omitted."""
    p = np.asarray(p, dtype=np.float64)
    c = np.asarray(c)
    if bins < 2:
        raise MetricError(f"bins must be >= 2, got {bins}")
    if p.shape != c.shape or p.ndim != 1:
        raise MetricError("p and c must be matching vectors")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise MetricError("probabilities must lie in [0, 1]")
    idx = np.minimum((p * bins).astype(int), bins - 1)
    points = []
    for b in range(bins):
        in_bin = idx == b
        n_b = int(in_bin.sum())
        if n_b == 0:
            continue
        points.append(
            CalibrationPoint(
                bin_center=(b + 0.5) / bins,
                predicted_mean=float(p[in_bin].mean()),
                empirical_freq=float(c[in_bin].mean()),
                count=n_b,
            )
        )
    return points


def summarize(values) -> dict:
    """Mean and population standard deviation (zero for a single value)."""
    arr = np.asarray(values, dtype=np.float64)
    return {
        "mean": float(arr.mean()),
        "sd": float(arr.std(ddof=0)),
        "values": [float(v) for v in arr],
    }


def report_to_json(report: dict, path) -> None:
    """Deterministic rendering: sorted keys, no timestamps."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def calibration_to_csv(points: list[CalibrationPoint], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_center", "predicted_mean", "empirical_freq", "count"])
        for pt in points:
            d = asdict(pt)
            writer.writerow([repr(d["bin_center"]), repr(d["predicted_mean"]), repr(d["empirical_freq"]), d["count"]])
