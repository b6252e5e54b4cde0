"""Predictor/target table assembly, min-max scaling, correlation screening.

Rows are transcripts; predictors are the 22 network metrics, the 8 emotion
z-scores, and the two demographic columns (age, sex with f=0 / m=1).
Targets are consumed as given and never transformed.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .emotions import EmotionProfile
from .lexicons import EMOTIONS
from .metrics import MetricVector

log = logging.getLogger(__name__)

METRIC_COLUMNS: tuple[str, ...] = tuple(MetricVector.feature_keys())
EMOTION_COLUMNS: tuple[str, ...] = tuple(EMOTIONS)
DEMOGRAPHIC_COLUMNS: tuple[str, ...] = ("age", "sex")
TARGET_COLUMNS: tuple[str, ...] = (
    "social_maladjustment",
    "specific_internalising",
    "neurodevelopmental_risk",
)

TRAIN_RANGE = (0.0, 1.0)
SHAP_RANGE = (-5.0, 5.0)

_SEX_CODES = {"f": 0.0, "female": 0.0, "m": 1.0, "male": 1.0, "0": 0.0, "1": 1.0}


def code_sex(value: object) -> float:
    """Map a sex label to the numeric coding (f=0, m=1)."""
    if isinstance(value, (int, float)) and value in (0, 1):
        return float(value)
    key = str(value).strip().lower()
    if key in _SEX_CODES:
        return _SEX_CODES[key]
    raise ValueError(f"cannot code sex value {value!r}")


@dataclass(frozen=True)
class ScaleRecord:
    """Per-column min-max parameters; constant columns map to the midpoint."""

    col_min: float
    col_max: float
    lo: float
    hi: float
    constant: bool

    def apply(self, values: np.ndarray) -> np.ndarray:
        if self.constant:
            return np.full_like(values, (self.lo + self.hi) / 2.0, dtype=float)
        span = self.col_max - self.col_min
        return self.lo + (self.hi - self.lo) * (values - self.col_min) / span

    def invert(self, values: np.ndarray) -> np.ndarray:
        if self.constant:
            return np.full_like(values, self.col_min, dtype=float)
        span = self.col_max - self.col_min
        return self.col_min + (values - self.lo) * span / (self.hi - self.lo)


@dataclass(frozen=True)
class FeatureTable:
    transcript_ids: tuple[str, ...]
    predictors: tuple[str, ...]
    targets: tuple[str, ...]
    X: np.ndarray
    Y: np.ndarray
    scaling: Mapping[str, ScaleRecord] | None = None

    @property
    def n_rows(self) -> int:
        return len(self.transcript_ids)

    def column(self, name: str) -> np.ndarray:
        if name in self.predictors:
            return self.X[:, self.predictors.index(name)]
        if name in self.targets:
            return self.Y[:, self.targets.index(name)]
        raise KeyError(name)

    def select(self, columns: Sequence[str]) -> "FeatureTable":
        """Restrict to the given predictor columns (targets kept)."""
        idx = [self.predictors.index(c) for c in columns]
        scaling = None
        if self.scaling is not None:
            scaling = {c: self.scaling[c] for c in columns if c in self.scaling}
        return replace(
            self, predictors=tuple(columns), X=self.X[:, idx].copy(), scaling=scaling
        )

    def subset(self, name: str) -> "FeatureTable":
        """One of the three predictor subsets; demographics ride along."""
        if name == "combined":
            cols = METRIC_COLUMNS + EMOTION_COLUMNS + DEMOGRAPHIC_COLUMNS
        elif name == "network":
            cols = METRIC_COLUMNS + DEMOGRAPHIC_COLUMNS
        elif name == "emotion":
            cols = EMOTION_COLUMNS + DEMOGRAPHIC_COLUMNS
        else:
            raise ValueError(f"unknown feature subset {name!r}")
        cols = tuple(c for c in cols if c in self.predictors)
        return self.select(cols)


def assemble(
    metrics: Mapping[str, MetricVector],
    profiles: Mapping[str, EmotionProfile],
    demographics: Mapping[str, tuple[float, object]],
    targets: Mapping[str, Mapping[str, float]],
) -> FeatureTable:
    """Inner-join the per-transcript pieces into one table.

    Transcripts missing from any input (including any missing target
    score) are excluded and logged.
    """
    ids = sorted(set(metrics) & set(profiles) & set(demographics))
    rows: list[list[float]] = []
    y_rows: list[list[float]] = []
    kept: list[str] = []
    for tid in ids:
        tgt = targets.get(tid)
        if tgt is None or any(t not in tgt or tgt[t] is None for t in TARGET_COLUMNS):
            log.warning("transcript %s dropped: missing target scores", tid)
            continue
        mv = metrics[tid]
        prof = profiles[tid]
        age, sex = demographics[tid]
        row = [float(getattr(mv, c)) for c in METRIC_COLUMNS]
        row.extend(prof.z_scores[e] for e in EMOTION_COLUMNS)
        row.append(float(age))
        row.append(code_sex(sex))
        rows.append(row)
        y_rows.append([float(tgt[t]) for t in TARGET_COLUMNS])
        kept.append(tid)
    for tid in sorted((set(metrics) | set(profiles) | set(demographics)) - set(ids)):
        log.warning("transcript %s dropped: not present in every input", tid)
    predictors = METRIC_COLUMNS + EMOTION_COLUMNS + DEMOGRAPHIC_COLUMNS
    X = np.asarray(rows, dtype=float).reshape(len(kept), len(predictors))
    Y = np.asarray(y_rows, dtype=float).reshape(len(kept), len(TARGET_COLUMNS))
    return FeatureTable(
        transcript_ids=tuple(kept),
        predictors=predictors,
        targets=TARGET_COLUMNS,
        X=X,
        Y=Y,
    )


def minmax_scale(table: FeatureTable, out_range: tuple[float, float] = TRAIN_RANGE) -> FeatureTable:
    """Min-max scale every predictor column into [lo, hi].

    Constant columns are flagged and pinned to the range midpoint. Targets
    are left untouched. Scaling parameters are stored on the result for
    the inverse transform.
    """
    lo, hi = float(out_range[0]), float(out_range[1])
    if not hi > lo:
        raise ValueError("scaling range must have hi > lo")
    scaling: dict[str, ScaleRecord] = {}
    X = table.X.copy()
    for j, name in enumerate(table.predictors):
        col = table.X[:, j]
        cmin, cmax = float(col.min()), float(col.max())
        constant = cmax == cmin
        if constant:
            log.warning("column %s is constant; scaled to range midpoint", name)
        rec = ScaleRecord(col_min=cmin, col_max=cmax, lo=lo, hi=hi, constant=constant)
        X[:, j] = rec.apply(col)
        scaling[name] = rec
    return replace(table, X=X, scaling=scaling)


def inverse_scale(table: FeatureTable) -> FeatureTable:
    if table.scaling is None:
        raise ValueError("table has no scaling record")
    X = table.X.copy()
    for j, name in enumerate(table.predictors):
        X[:, j] = table.scaling[name].invert(table.X[:, j])
    return replace(table, X=X, scaling=None)


def pearson(x: np.ndarray, y: np.ndarray) -> tuple[float, bool]:
    """Pearson r and whether it is defined (both variances > 0)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.sqrt((xc**2).sum()))
    sy = float(np.sqrt((yc**2).sum()))
    if sx == 0.0 or sy == 0.0:
        return 0.0, False
    return float((xc * yc).sum() / (sx * sy)), True


@dataclass(frozen=True)
class ScreenResult:
    predictors: tuple[str, ...]
    matrix: np.ndarray  # predictor x predictor Pearson r
    defined: np.ndarray  # boolean mask, False where a column was constant
    groups: tuple[tuple[str, ...], ...]
    selected: tuple[str, ...]
    target_r: Mapping[str, Mapping[str, float]]  # target -> column -> r


def correlation_screen(
    table: FeatureTable, threshold: float = 0.1, target: str = TARGET_COLUMNS[0]
) -> ScreenResult:
    """Collapse groups of mutually correlated predictors to representatives.

    Groups are the connected components of the graph joining predictor
    pairs with |r| > threshold; each group keeps the member with the
    largest |r| against the chosen target (ties: earliest column order).
    """
    if table.n_rows < 3:
        raise ValueError("correlation screen needs at least 3 rows")
    cols = table.predictors
    p = len(cols)
    R = np.eye(p)
    defined = np.ones((p, p), dtype=bool)
    for i in range(p):
        for j in range(i + 1, p):
            r, ok = pearson(table.X[:, i], table.X[:, j])
            R[i, j] = R[j, i] = r
            defined[i, j] = defined[j, i] = ok
            if not ok:
                log.warning("correlation %s~%s undefined (constant column)", cols[i], cols[j])

    # connected components of the |r| > threshold graph
    parent = list(range(p))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(p):
        for j in range(i + 1, p):
            if abs(R[i, j]) > threshold:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)

    groups_by_root: dict[int, list[int]] = {}
    for i in range(p):
        groups_by_root.setdefault(find(i), []).append(i)

    target_r_all: dict[str, dict[str, float]] = {}
    for t in table.targets:
        ty = table.column(t)
        target_r_all[t] = {}
        for i, c in enumerate(cols):
            r, ok = pearson(table.X[:, i], ty)
            target_r_all[t][c] = r if ok else 0.0

    tr = target_r_all[target]
    selected_idx: list[int] = []
    groups: list[tuple[str, ...]] = []
    for root in sorted(groups_by_root):
        members = groups_by_root[root]
        groups.append(tuple(cols[i] for i in members))
        best = members[0]
        for i in members[1:]:
            if abs(tr[cols[i]]) > abs(tr[cols[best]]):
                best = i
        selected_idx.append(best)
    selected_idx.sort()
    return ScreenResult(
        predictors=cols,
        matrix=R,
        defined=defined,
        groups=tuple(groups),
        selected=tuple(cols[i] for i in selected_idx),
        target_r=target_r_all,
    )


def feature_target_table(
    table: FeatureTable, blank_at: float = 0.10
) -> list[dict[str, object]]:
    """Feature-by-target Pearson r rows, with |r| <= blank_at blanked."""
    rows: list[dict[str, object]] = []
    for i, c in enumerate(table.predictors):
        row: dict[str, object] = {"feature": c}
        for t in table.targets:
            r, ok = pearson(table.X[:, i], table.column(t))
            r = r if ok else 0.0
            row[t] = None if abs(r) <= blank_at else r
        rows.append(row)
    return rows


def write_csv(table: FeatureTable, path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["transcript_id", *table.predictors, *table.targets])
        for i, tid in enumerate(table.transcript_ids):
            w.writerow(
                [tid]
                + [repr(float(v)) for v in table.X[i]]
                + [repr(float(v)) for v in table.Y[i]]
            )


def read_csv(path: str) -> FeatureTable:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    names = header[1:]
    targets = [c for c in names if c in TARGET_COLUMNS]
    predictors = [c for c in names if c not in TARGET_COLUMNS]
    pred_idx = [names.index(c) + 1 for c in predictors]
    tgt_idx = [names.index(c) + 1 for c in targets]
    ids = tuple(r[0] for r in rows)
    X = np.array([[float(r[i]) for i in pred_idx] for r in rows], dtype=float)
    Y = np.array([[float(r[i]) for i in tgt_idx] for r in rows], dtype=float)
    return FeatureTable(
        transcript_ids=ids,
        predictors=tuple(predictors),
        targets=tuple(targets),
        X=X.reshape(len(rows), len(predictors)),
        Y=Y.reshape(len(rows), len(targets)),
    )
