"""Model selection and evaluation reports."""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import CalibrationDataset, FoldAssignment, kfold
from .errors import EmptyInput, LengthMismatch, MixedTasks
from .learn.model import fit
from .learn.spec import COMPARISON_TABLES, FORCE, ModelSpec, normalize_task

TOLERANCES_N = (0.5, 1.0, 1.5)
NOT_IMPLEMENTED = "not implemented"


@dataclass
class CvRow:
    spec: ModelSpec
    fold_scores: list

    @property
    def mean_score(self) -> float:
        return float(np.mean(self.fold_scores))


@dataclass
class CvReport:
    task: str
    rows: list
    selected: int
    k: int
    seed: int

    @property
    def winner(self) -> CvRow:
        return self.rows[self.selected]

    def score_of(self, preset_name: str) -> float | None:
        for row in self.rows:
            if row.spec.name == preset_name:
                return row.mean_score
        return None

    def to_csv(self) -> str:
        return cv_table_csv(self)


@dataclass
class ToleranceReport:
    n: int
    pct_within: dict
    rmse_n: float

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "pct_within": {str(t): p for t, p in self.pct_within.items()},
            "rmse_n": self.rmse_n,
        }


@dataclass
class LocationReport:
    per_label: dict  # label -> {"trials": int, "true_predictions": int}
    overall_accuracy_pct: float

    def to_json(self) -> dict:
        return {"per_label": self.per_label, "overall_accuracy_pct": self.overall_accuracy_pct}


@dataclass
class ErrorStats:
    mean_signed_error_n: float
    std_error_n: float
    max_abs_error_n: float
    n: int = 0

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "mean_signed_error_n": self.mean_signed_error_n,
            "std_error_n": self.std_error_n,
            "max_abs_error_n": self.max_abs_error_n,
        }


def _paired(truth, pred, dtype=float):
    truth = np.asarray(truth, dtype=dtype)
    pred = np.asarray(pred, dtype=dtype)
    if truth.shape != pred.shape:
        raise LengthMismatch(f"{truth.shape[0]} truths vs {pred.shape[0]} predictions")
    if truth.size == 0:
        raise EmptyInput("no samples to score")
    return truth, pred


def rmse(truth, pred) -> float:
    truth, pred = _paired(truth, pred)
    err = pred - truth
    return float(np.sqrt(np.mean(err * err)))


def tolerance_bands(truth, pred, tolerances=TOLERANCES_N) -> ToleranceReport:
    """Percent of predictions with ``|pred - truth| <= t`` (closed interval)."""
    truth, pred = _paired(truth, pred)
    err = np.abs(pred - truth)
    pct = {float(t): 100.0 * int(np.count_nonzero(err <= t)) / err.size for t in tolerances}
    return ToleranceReport(int(err.size), pct, rmse(truth, pred))


def location_accuracy(truth, pred) -> LocationReport:
    truth, pred = _paired(truth, pred, dtype=object)
    per_label = {}
    for label in sorted(set(truth.tolist())):
        mask = truth == label
        per_label[label] = {
            "trials": int(mask.sum()),
            "true_predictions": int(np.count_nonzero(pred[mask] == label)),
        }
    correct = sum(v["true_predictions"] for v in per_label.values())
    trials = sum(v["trials"] for v in per_label.values())
    return LocationReport(per_label, 100.0 * correct / trials)


def accuracy_pct(truth, pred) -> float:
    return location_accuracy(truth, pred).overall_accuracy_pct


def error_stats(truth, pred) -> ErrorStats:
    truth, pred = _paired(truth, pred)
    err = pred - truth
    return ErrorStats(
        float(np.mean(err)), float(np.std(err)), float(np.max(np.abs(err))), int(err.size)
    )


def error_stats_by_level(truth, pred) -> dict:
    """Signed error statistics grouped by distinct ground-truth force."""
    truth, pred = _paired(truth, pred)
    return {float(t): error_stats(truth[truth == t], pred[truth == t]) for t in np.unique(truth)}


def truncate_pct(value: float, digits: int = 2) -> str:
    """Fixed-point percentage truncated (not rounded), e.g. 96.666 -> '96.66'."""
    scale = 10**digits
    # nudge absorbs binary representation error such as 99.01999999
    return f"{math.floor(value * scale + 1e-9) / scale:.{digits}f}"


def _score_fold(spec, X, targets, assignment, fold, seed):
    train_idx, test_idx = assignment.train_test(fold)
    model = fit(spec, X[train_idx], targets[train_idx], seed)
    if spec.is_regression:
        return rmse(targets[test_idx], model.predict_forces(X[test_idx]))
    return accuracy_pct(targets[test_idx], model.predict_locations(X[test_idx]))


def select_winner(task: str, means) -> int:
    """argmin RMSE / argmax accuracy; the first registered row wins exact ties."""
    means = list(means)
    best = 0
    for i, v in enumerate(means):
        better = v < means[best] if task == FORCE else v > means[best]
        if better:
            best = i
    return best


def cv_compare(
    specs,
    ds: CalibrationDataset,
    k: int = 10,
    seed: int = 7,
    folds: FoldAssignment | None = None,
    n_jobs: int = 1,
) -> CvReport:
    """k-fold comparison: each spec is trained on k-1 folds and scored on the rest.

    Regression scores are per-fold RMSE (N) averaged over folds; classification
    scores are per-fold accuracy (%) averaged over folds.
    """
    specs = list(specs)
    if not specs:
        raise EmptyInput("no model specs to compare")
    tasks = {s.task for s in specs}
    if len(tasks) > 1:
        raise MixedTasks(f"specs mix tasks {sorted(tasks)}")
    task = tasks.pop()
    if folds is None:
        folds = kfold(ds, k, seed)
    X = ds.features()
    targets = ds.forces() if task == FORCE else ds.labels()

    jobs = [(s, f) for s in specs for f in range(folds.k)]
    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            scores = list(pool.map(lambda j: _score_fold(j[0], X, targets, folds, j[1], seed), jobs))
    else:
        scores = [_score_fold(s, X, targets, folds, f, seed) for s, f in jobs]

    rows = [CvRow(s, scores[i * folds.k : (i + 1) * folds.k]) for i, s in enumerate(specs)]
    selected = select_winner(task, [r.mean_score for r in rows])
    return CvReport(task, rows, selected, folds.k, seed)


def _fmt(v: float) -> str:
    return repr(float(v))


def cv_table_csv(report: CvReport) -> str:
    """``spec,mean_score,fold_1..fold_k`` with placeholder rows for absent families."""
    buf = io.StringIO()
    buf.write(",".join(["spec", "mean_score"] + [f"fold_{i + 1}" for i in range(report.k)]) + "\n")
    by_name = {row.spec.name: row for row in report.rows}
    emitted = set()
    for table_row in COMPARISON_TABLES[report.task]:
        name = table_row.preset
        if name is None:
            buf.write(",".join([_placeholder_name(table_row), NOT_IMPLEMENTED] + [""] * report.k))
            buf.write("\n")
            continue
        row = by_name.get(name)
        if row is None:
            continue
        emitted.add(name)
        buf.write(",".join([name, _fmt(row.mean_score)] + [_fmt(s) for s in row.fold_scores]))
        buf.write("\n")
    # specs outside the standard registry keep their own order at the end
    for row in report.rows:
        if row.spec.name not in emitted:
            buf.write(",".join([row.spec.name, _fmt(row.mean_score)] + [_fmt(s) for s in row.fold_scores]))
            buf.write("\n")
    return buf.getvalue()


def _placeholder_name(table_row) -> str:
    slug = f"{table_row.group} {table_row.label}".lower()
    return "-".join(slug.replace("/", " ").split())


def comparison_table(reports: dict, task: str) -> list[list[str]]:
    """Models x skins grid, one row per comparison-table entry.

    ``reports`` maps a skin id to its CvReport.  Group header rows have empty
    cells, unimplemented families read ``not implemented`` and each column's
    selected model is marked with ``*``.
    """
    task = normalize_task(task)
    skins = list(reports)
    header = ["model"] + skins
    out = [header]
    last_group = None
    for table_row in COMPARISON_TABLES[task]:
        if table_row.group != last_group:
            out.append([table_row.group] + [""] * len(skins))
            last_group = table_row.group
        cells = [table_row.label]
        for skin in skins:
            rep = reports[skin]
            if not table_row.implemented:
                cells.append(NOT_IMPLEMENTED)
                continue
            idx = next((i for i, r in enumerate(rep.rows) if r.spec.name == table_row.preset), None)
            if idx is None:
                cells.append("")
                continue
            text = f"{rep.rows[idx].mean_score:.2f}" if task == FORCE else f"{rep.rows[idx].mean_score:.1f}"
            cells.append(text + ("*" if idx == rep.selected else ""))
        out.append(cells)
    return out


def format_table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for n, r in enumerate(rows):
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def format_location_report(report: LocationReport, skin_id: str = "") -> str:
    labels = list(report.per_label)
    rows = [["skin"] + labels + ["accuracy (%)"]]
    rows.append(
        [skin_id or "-"]
        + [f"{report.per_label[l]['true_predictions']}/{report.per_label[l]['trials']}" for l in labels]
        + [truncate_pct(report.overall_accuracy_pct)]
    )
    return format_table(rows)
