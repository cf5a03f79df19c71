"""Synthetic benchmark generation, artificial censoring, CSV ingestion,
and deterministic splitting.

The synthetic task has five standard-normal features and two events:
eventual occurrence of event 1 depends only on (x1, x2) — inside a
centered disk whose Gaussian mass is 1/2 — and of event 2 only on
(x3, x4); the log event time of both events is linear in x5. Never
occurring is encoded as an absent (NaN) true event time.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .mathstats import Rng

# radius with P(x1^2 + x2^2 < r^2) = 1/2 under a 2-D standard normal
DISK_RADIUS = math.sqrt(2.0 * math.log(2.0))

CENSOR_SCHEMES = ("full_range", "twice_median")


class DataError(ValueError):
    """Malformed dataset contents or files."""


@dataclass
class Dataset:
    """Feature matrix plus per-event observed times and indicators.

    x: [n, d] features; t: [n, M] observed times (> 0); s: [n, M] 0/1
    with 1 = true event time, 0 = censoring time. Ground truth, when
    known (synthetic and artificially censored data), rides along for
    evaluation only: c_true is the 0/1 eventual-occurrence label and
    t_event_true the uncensored event time (NaN when the event never
    occurs).
    """

    x: np.ndarray
    t: np.ndarray
    s: np.ndarray
    event_names: list[str]
    c_true: np.ndarray | None = None
    t_event_true: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def n_features(self) -> int:
        return self.x.shape[1]

    @property
    def n_events(self) -> int:
        return self.t.shape[1]

    def validate(self) -> "Dataset":
        if self.x.ndim != 2 or self.t.ndim != 2 or self.s.ndim != 2:
            raise DataError("x, t, s must be 2-D")
        n = self.x.shape[0]
        m = self.t.shape[1]
        if self.t.shape[0] != n or self.s.shape != self.t.shape:
            raise DataError(f"inconsistent shapes: x {self.x.shape}, t {self.t.shape}, s {self.s.shape}")
        if len(self.event_names) != m:
            raise DataError(f"{len(self.event_names)} event names for {m} events")
        if not np.all(np.isfinite(self.x)):
            raise DataError("features must be finite")
        if np.any(self.t <= 0.0) or not np.all(np.isfinite(self.t)):
            raise DataError("observed times must be finite and > 0")
        if not np.all((self.s == 0) | (self.s == 1)):
            raise DataError("status must be 0 or 1")
        if self.c_true is not None:
            if self.c_true.shape != self.t.shape or not np.all((self.c_true == 0) | (self.c_true == 1)):
                raise DataError("c_true must be 0/1 and congruent with t")
            if np.any((self.c_true == 0) & (self.s == 1)):
                raise DataError("s = 1 requires c_true = 1")
        if self.t_event_true is not None:
            if self.t_event_true.shape != self.t.shape:
                raise DataError("t_event_true must be congruent with t")
            finite = np.isfinite(self.t_event_true)
            if np.any(self.t_event_true[finite] <= 0.0):
                raise DataError("true event times must be > 0")
            observed = self.s == 1
            if np.any(observed & ~finite):
                raise DataError("s = 1 requires a finite true event time")
            if not np.allclose(self.t[observed], self.t_event_true[observed], rtol=0, atol=0):
                raise DataError("s = 1 rows must have t equal to the true event time")
        return self

    def take(self, idx) -> "Dataset":
        return Dataset(
            x=self.x[idx],
            t=self.t[idx],
            s=self.s[idx],
            event_names=list(self.event_names),
            c_true=None if self.c_true is None else self.c_true[idx],
            t_event_true=None if self.t_event_true is None else self.t_event_true[idx],
            meta=dict(self.meta),
        )


def generate_synthetic(
    n: int,
    noise: float = 0.1,
    seed: int = 0,
    *,
    radius: float = DISK_RADIUS,
    slope: float = 0.5,
    intercept: float = 2.0,
    log_time_noise: float = 0.3,
) -> Dataset:
    """Two-event benchmark with disk-shaped occurrence regions.

    c1 = 1 inside x1^2 + x2^2 < radius^2 and c2 = 1 inside
    x3^2 + x4^2 < radius^2, each label independently flipped with
    probability ``noise``; for occurring events,
    log t = slope * x5 + intercept + log_time_noise * eps with
    independent standard-normal eps per event. Rows whose event never
    occurs carry a NaN true time and are reported censored at the
    latest event time of their task (pass the result through
    apply_censoring for the actual benchmark observations).
    """
    if n < 1:
        raise DataError(f"n must be >= 1, got {n}")
    if noise < 0.0 or noise > 1.0:
        raise DataError(f"label noise must lie in [0, 1], got {noise}")
    rng = Rng(seed)
    x = rng.child(0).standard_normal((n, 5))
    inside = np.stack(
        [
            x[:, 0] ** 2 + x[:, 1] ** 2 < radius**2,
            x[:, 2] ** 2 + x[:, 3] ** 2 < radius**2,
        ],
        axis=1,
    )
    flips = rng.child(1).uniform_open((n, 2)) < noise
    c = (inside ^ flips).astype(np.int64)
    eps = rng.child(2).standard_normal((n, 2))
    log_t = slope * x[:, 4:5] + intercept + log_time_noise * eps
    t_event = np.where(c == 1, np.exp(log_t), np.nan)

    t = np.empty((n, 2))
    s = c.copy()
    for j in range(2):
        finite = np.isfinite(t_event[:, j])
        if not finite.any():
            raise DataError(f"event {j}: no occurrences generated; cannot place a horizon")
        horizon = t_event[finite, j].max()
        t[:, j] = np.where(finite, t_event[:, j], horizon)
    return Dataset(
        x=x,
        t=t,
        s=s,
        event_names=["e1", "e2"],
        c_true=c,
        t_event_true=t_event,
        meta={
            "generator": "synthetic-disk",
            "n": n,
            "noise": noise,
            "seed": seed,
            "radius": radius,
            "slope": slope,
            "intercept": intercept,
            "log_time_noise": log_time_noise,
        },
    ).validate()


def apply_censoring(ds: Dataset, scheme: str, rng: Rng) -> Dataset:
    """Draw per-row uniform censoring times and fold them into (t, s).

    ``full_range`` censors uniformly over (0, max event time); and
    ``twice_median`` over (0, 2 * median event time), both per event.
    Rows whose event occurs get t = min(event time, censor time) and
    s = 1 when the event came first; rows that never occur are always
    censored. Ground-truth columns are retained for evaluation.
    """
    if scheme not in CENSOR_SCHEMES:
        raise DataError(f"unknown censoring scheme {scheme!r}; choose from {CENSOR_SCHEMES}")
    if ds.t_event_true is None:
        raise DataError("apply_censoring requires a dataset carrying true event times")
    n, m = ds.t.shape
    t_new = np.empty_like(ds.t)
    s_new = np.empty_like(ds.s)
    for j in range(m):
        event_t = ds.t_event_true[:, j]
        finite = np.isfinite(event_t)
        if not finite.any():
            raise DataError(f"event {j}: no finite event times to derive the censoring interval")
        if scheme == "full_range":
            hi = event_t[finite].max()
        else:
            hi = 2.0 * float(np.median(event_t[finite]))
        g = rng.child(j).uniform_open(n) * hi
        occurred_first = finite & (event_t <= g)
        t_new[:, j] = np.where(occurred_first, event_t, g)
        s_new[:, j] = occurred_first.astype(np.int64)
    return Dataset(
        x=ds.x,
        t=t_new,
        s=s_new,
        event_names=list(ds.event_names),
        c_true=ds.c_true,
        t_event_true=ds.t_event_true,
        meta={**ds.meta, "censoring": scheme},
    ).validate()


def split(ds: Dataset, fractions=(0.6, 0.2, 0.2), seed: int = 0):
    """Seeded permutation, then contiguous train/validation/test slices."""
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise DataError(f"fractions must be three non-negatives summing to 1, got {fractions}")
    perm = Rng(seed).child(0).permutation(ds.n)
    n_train = int(math.floor(ds.n * fractions[0]))
    n_val = int(math.floor(ds.n * fractions[1]))
    return (
        ds.take(perm[:n_train]),
        ds.take(perm[n_train : n_train + n_val]),
        ds.take(perm[n_train + n_val :]),
    )


# --- CSV round trip -------------------------------------------------------
#
# Header: x1..xd, then per event <name>: t_<name>, s_<name>, and the
# optional ground-truth columns c_<name> (eventual occurrence) and
# tt_<name> (uncensored event time, empty when the event never occurs).
# Values render with full round-trip precision.


def _fmt(v: float) -> str:
    return repr(float(v))


def save_csv(ds: Dataset, path) -> None:
    ds.validate()
    header = [f"x{i + 1}" for i in range(ds.n_features)]
    for j, name in enumerate(ds.event_names):
        header += [f"t_{name}", f"s_{name}"]
        if ds.c_true is not None:
            header.append(f"c_{name}")
        if ds.t_event_true is not None:
            header.append(f"tt_{name}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(ds.n):
            row = [_fmt(v) for v in ds.x[i]]
            for j in range(ds.n_events):
                row += [_fmt(ds.t[i, j]), str(int(ds.s[i, j]))]
                if ds.c_true is not None:
                    row.append(str(int(ds.c_true[i, j])))
                if ds.t_event_true is not None:
                    v = ds.t_event_true[i, j]
                    row.append("" if not np.isfinite(v) else _fmt(v))
            writer.writerow(row)


def load_csv(path) -> Dataset:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = list(reader)
    n_features = 0
    while n_features < len(header) and header[n_features] == f"x{n_features + 1}":
        n_features += 1
    if n_features == 0:
        raise DataError(f"{path}: header must start with feature columns x1, x2, ...")
    event_names = [col[2:] for col in header[n_features:] if col.startswith("t_") and not col.startswith("tt_")]
    if not event_names:
        raise DataError(f"{path}: no t_<event> columns found")
    col_index = {col: k for k, col in enumerate(header)}
    has_c = all(f"c_{name}" in col_index for name in event_names)
    has_tt = all(f"tt_{name}" in col_index for name in event_names)
    for name in event_names:
        if f"s_{name}" not in col_index:
            raise DataError(f"{path}: missing column s_{name}")

    n = len(rows)
    x = np.empty((n, n_features))
    t = np.empty((n, len(event_names)))
    s = np.empty((n, len(event_names)), dtype=np.int64)
    c = np.empty_like(s) if has_c else None
    tt = np.empty_like(t) if has_tt else None

    def fail(i, col, msg):
        raise DataError(f"{path}: row {i + 2}, column {col}: {msg}")

    for i, row in enumerate(rows):
        if len(row) != len(header):
            fail(i, "-", f"expected {len(header)} fields, got {len(row)}")
        for k in range(n_features):
            try:
                x[i, k] = float(row[k])
            except ValueError:
                fail(i, header[k], f"not a number: {row[k]!r}")
        for j, name in enumerate(event_names):
            raw_t = row[col_index[f"t_{name}"]]
            try:
                t[i, j] = float(raw_t)
            except ValueError:
                fail(i, f"t_{name}", f"not a number: {raw_t!r}")
            if not t[i, j] > 0.0 or not np.isfinite(t[i, j]):
                fail(i, f"t_{name}", f"times must be finite and > 0, got {raw_t}")
            raw_s = row[col_index[f"s_{name}"]]
            if raw_s not in ("0", "1"):
                fail(i, f"s_{name}", f"status must be 0 or 1, got {raw_s!r}")
            s[i, j] = int(raw_s)
            if has_c:
                raw_c = row[col_index[f"c_{name}"]]
                if raw_c not in ("0", "1"):
                    fail(i, f"c_{name}", f"occurrence label must be 0 or 1, got {raw_c!r}")
                c[i, j] = int(raw_c)
            if has_tt:
                raw_tt = row[col_index[f"tt_{name}"]]
                tt[i, j] = np.nan if raw_tt == "" else float(raw_tt)
    return Dataset(
        x=x, t=t, s=s, event_names=event_names, c_true=c, t_event_true=tt
    ).validate()


def save_manifest(ds: Dataset, path, extra: dict | None = None) -> None:
    """Generator parameters and seed, written beside the CSV."""
    doc = {**ds.meta, **(extra or {})}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
