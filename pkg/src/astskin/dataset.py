"""Calibration corpus: records, CSV persistence and stratified partitioning."""

from __future__ import annotations

import hashlib
import io
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .dsp import SpectralFeatures
from .errors import KTooLarge, MalformedCsv, MixedSkinIds, TooFewRecords
from .rng import SplitMix64

CSV_COLUMNS = ("skin_id", "location", "x_mm", "y_mm", "force_n", "a300", "a500", "a700", "a900")
FORCE_SANITY_MAX_N = 40.0


@dataclass(frozen=True)
class CalibrationRecord:
    skin_id: str
    location: str
    x_mm: float
    y_mm: float
    force_n: float
    features: SpectralFeatures

    def __post_init__(self):
        if not 0.0 <= self.force_n <= FORCE_SANITY_MAX_N:
            raise ValueError(f"force_n {self.force_n} outside [0, {FORCE_SANITY_MAX_N}]")


@dataclass
class CalibrationDataset:
    records: list
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = {r.skin_id for r in self.records}
        if len(ids) > 1:
            raise MixedSkinIds(f"records from several skins: {sorted(ids)}")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def skin_id(self) -> str | None:
        return self.records[0].skin_id if self.records else None

    def features(self) -> np.ndarray:
        return np.array([r.features.as_array() for r in self.records]).reshape(-1, 4)

    def forces(self) -> np.ndarray:
        return np.array([r.force_n for r in self.records], dtype=float)

    def labels(self) -> np.ndarray:
        return np.array([r.location for r in self.records], dtype=object)

    def subset(self, indices, **provenance) -> "CalibrationDataset":
        prov = dict(self.provenance)
        prov.update(provenance)
        return CalibrationDataset([self.records[int(i)] for i in indices], prov)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for r in self.records:
            f = r.features
            values = (r.x_mm, r.y_mm, r.force_n, f.a300, f.a500, f.a700, f.a900)
            buf.write(",".join([r.skin_id, r.location] + [repr(float(v)) for v in values]))
            buf.write("\n")
        return buf.getvalue()

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_csv_text().encode("utf-8")).hexdigest()


def write_csv(ds: CalibrationDataset, path) -> None:
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(ds.to_csv_text())
    os.replace(tmp, path)


def parse_csv_text(text: str, source: str = "<string>") -> CalibrationDataset:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedCsv(f"{source}: empty file, expected header")
    header = lines[0].rstrip("\r").split(",")
    if tuple(header) != CSV_COLUMNS:
        missing = [c for c in CSV_COLUMNS if c not in header]
        extra = [c for c in header if c not in CSV_COLUMNS]
        detail = []
        if missing:
            detail.append(f"missing column(s) {missing}")
        if extra:
            detail.append(f"unexpected column(s) {extra}")
        if not detail:
            detail.append("columns out of order")
        raise MalformedCsv(f"{source}: bad header ({'; '.join(detail)})")

    records = []
    skin_ids = set()
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.rstrip("\r").split(",")
        if len(cells) != len(CSV_COLUMNS):
            raise MalformedCsv(
                f"{source}:{lineno}: expected {len(CSV_COLUMNS)} columns, got {len(cells)}"
            )
        try:
            nums = [float(c) for c in cells[2:]]
        except ValueError:
            bad = next(
                CSV_COLUMNS[i + 2] for i, c in enumerate(cells[2:]) if not _is_float(c)
            )
            raise MalformedCsv(f"{source}:{lineno}: column {bad!r} is not a number") from None
        if not all(math.isfinite(v) for v in nums):
            raise MalformedCsv(f"{source}:{lineno}: non-finite value")
        skin_ids.add(cells[0])
        if len(skin_ids) > 1:
            raise MixedSkinIds(f"{source}:{lineno}: skin ids {sorted(skin_ids)} in one file")
        try:
            rec = CalibrationRecord(
                cells[0], cells[1], nums[0], nums[1], nums[2],
                SpectralFeatures.from_sequence(nums[3:]),
            )
        except ValueError as exc:
            raise MalformedCsv(f"{source}:{lineno}: {exc}") from None
        records.append(rec)
    return CalibrationDataset(records, {"source": source})


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_csv(path) -> CalibrationDataset:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_csv_text(fh.read(), os.fspath(path))


def _location_groups(ds: CalibrationDataset) -> list[np.ndarray]:
    labels = ds.labels()
    return [np.flatnonzero(labels == lab) for lab in sorted(set(labels))]


def split_holdout(ds: CalibrationDataset, train_fraction: float = 0.9, seed: int = 7):
    """Stratified train/test split.

    Locations are visited in sorted label order; each location's indices are
    shuffled with one shared SplitMix64 stream and the first
    ``floor(train_fraction * n_loc)`` go to train.  Both partitions keep the
    original row order.
    """
    if len(ds) < 10:
        raise TooFewRecords(f"split needs at least 10 records, got {len(ds)}")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    rng = SplitMix64(seed)
    train, test = [], []
    for group in _location_groups(ds):
        shuffled = group[rng.permutation(len(group))]
        # epsilon keeps e.g. 0.9 * 1700 from flooring to 1529
        n_train = int(math.floor(train_fraction * len(group) + 1e-9))
        train.append(shuffled[:n_train])
        test.append(shuffled[n_train:])
    train_idx = np.sort(np.concatenate(train))
    test_idx = np.sort(np.concatenate(test))
    meta = {"split_seed": seed, "train_fraction": train_fraction}
    return (
        ds.subset(train_idx, partition="train", **meta),
        ds.subset(test_idx, partition="test", **meta),
    )


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    assignment: np.ndarray

    def train_test(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        mask = self.assignment == fold
        return np.flatnonzero(~mask), np.flatnonzero(mask)

    def sizes(self) -> list[int]:
        return np.bincount(self.assignment, minlength=self.k).tolist()


def kfold(ds: CalibrationDataset, k: int = 10, seed: int = 7) -> FoldAssignment:
    """Stratified fold assignment.

    Per-location shuffled index blocks (sorted label order, one SplitMix64
    stream) are concatenated and dealt round-robin, so fold sizes differ by
    at most one overall and per location.
    """
    if k < 2:
        raise KTooLarge(f"k must be >= 2, got {k}")
    if k > len(ds):
        raise KTooLarge(f"k={k} exceeds the {len(ds)} available records")
    rng = SplitMix64(seed)
    order = np.concatenate([g[rng.permutation(len(g))] for g in _location_groups(ds)])
    assignment = np.empty(len(ds), dtype=np.int64)
    assignment[order] = np.arange(len(ds)) % k
    return FoldAssignment(k, assignment)
