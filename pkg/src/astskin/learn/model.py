"""Training entry point and the fitted-model wrapper."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dataset import CalibrationDataset
from ..dsp import SpectralFeatures
from ..errors import DegenerateData, TaskMismatch
from .bayes import GaussianNaiveBayes, LinearDiscriminant
from .gp import GaussianProcess
from .knn import KNearestNeighbors
from .linear import LinearOLS
from .spec import FORCE, LOCATION, ModelSpec
from .tree import BaggedTrees, TreeModel

FEATURE_NAMES = ("a300", "a500", "a700", "a900")


class ConstantRegressor:
    """Fallback when every training target is identical."""

    kind = "constant"

    def __init__(self, value=0.0):
        self.value = float(value)

    def fit(self, X, y, seed=0):
        self.value = float(y[0])
        return self

    def predict(self, X):
        return np.full(np.asarray(X).shape[0], self.value)

    def get_params(self):
        return {"constant": self.value}

    @classmethod
    def from_params(cls, hp, params):
        return cls(params["constant"])


def make_estimator(spec: ModelSpec, n_classes: int = 0):
    hp = spec.hyperparameters
    cls_task = spec.task == LOCATION
    if spec.kind == "linear-ols":
        return LinearOLS()
    if spec.kind == "tree":
        return TreeModel(hp["preset"], cls_task, n_classes)
    if spec.kind == "bagged-trees":
        return BaggedTrees(hp["n_trees"], hp["preset"], cls_task, n_classes)
    if spec.kind == "gp":
        return GaussianProcess(hp["kernel"])
    if spec.kind == "knn":
        return KNearestNeighbors(hp["k"], hp["weighting"], hp["metric"], n_classes)
    if spec.kind == "gaussian-naive-bayes":
        return GaussianNaiveBayes(n_classes)
    if spec.kind == "linear-discriminant":
        return LinearDiscriminant(n_classes)
    raise AssertionError(spec.kind)


def estimator_from_params(spec: ModelSpec, params: dict, n_classes: int):
    hp = spec.hyperparameters
    if "constant" in params:
        return ConstantRegressor.from_params(hp, params)
    if spec.kind == "linear-ols":
        return LinearOLS.from_params(hp, params)
    if spec.kind == "gp":
        return GaussianProcess.from_params(hp, params)
    cls = {
        "tree": TreeModel,
        "bagged-trees": BaggedTrees,
        "knn": KNearestNeighbors,
        "gaussian-naive-bayes": GaussianNaiveBayes,
        "linear-discriminant": LinearDiscriminant,
    }[spec.kind]
    if spec.kind in ("tree", "bagged-trees"):
        return cls.from_params(hp, params, spec.task == LOCATION, n_classes)
    return cls.from_params(hp, params, n_classes=n_classes)


@dataclass
class TrainedModel:
    spec: ModelSpec
    estimator: object
    means: np.ndarray
    scales: np.ndarray
    classes: list = field(default_factory=list)
    training_meta: dict = field(default_factory=dict)

    @property
    def task(self) -> str:
        return self.spec.task

    def standardize(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return (X - self.means) / self.scales

    def _require(self, task):
        if self.task != task:
            raise TaskMismatch(f"model is a {self.task} model, not {task}")

    # batch API; the single-sample functions below wrap these
    def predict_forces(self, X) -> np.ndarray:
        self._require(FORCE)
        return np.asarray(self.estimator.predict(self.standardize(X)), dtype=np.float64)

    def predict_force_vars(self, X, include_noise=False) -> np.ndarray:
        self._require(FORCE)
        if not isinstance(self.estimator, GaussianProcess):
            raise TaskMismatch("predictive variance is only available for gp models")
        return self.estimator.predict_var(self.standardize(X), include_noise)

    def location_scores(self, X) -> np.ndarray:
        self._require(LOCATION)
        return self.estimator.predict_scores(self.standardize(X))

    def predict_locations(self, X) -> np.ndarray:
        # classes are sorted, so argmax's first-max rule is the alphabetical tie-break
        scores = self.location_scores(X)
        return np.array(self.classes, dtype=object)[np.argmax(scores, axis=1)]


def _as_row(x) -> np.ndarray:
    if isinstance(x, SpectralFeatures):
        return x.as_array()[None, :]
    return np.asarray(x, dtype=np.float64).reshape(1, -1)


def predict_force(m: TrainedModel, x) -> float:
    return float(m.predict_forces(_as_row(x))[0])


def predict_force_var(m: TrainedModel, x, include_noise=False) -> float:
    return float(m.predict_force_vars(_as_row(x), include_noise)[0])


def predict_location(m: TrainedModel, x) -> tuple[str, dict]:
    scores = m.location_scores(_as_row(x))[0]
    label = m.classes[int(np.argmax(scores))]
    return label, {c: float(s) for c, s in zip(m.classes, scores)}


def standardization(X):
    """Per-feature mean and population std; zero-variance features keep scale 1."""
    means = X.mean(axis=0)
    scales = X.std(axis=0)
    warnings = []
    # rounding leaves a constant column with std ~1e-17, so test the range instead
    constant = X.max(axis=0) == X.min(axis=0)
    for j, s in enumerate(scales):
        if constant[j] or not s > 0:
            scales[j] = 1.0
            name = FEATURE_NAMES[j] if j < len(FEATURE_NAMES) else f"x{j}"
            warnings.append(f"DegenerateData: feature {name} has zero variance; scale set to 1")
    return means, scales, warnings


def fit(spec: ModelSpec, X, targets, seed: int = 7, meta: dict | None = None) -> TrainedModel:
    """Train on arrays: ``X`` (n x 4) and forces or location labels."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DegenerateData("training data is empty")
    means, scales, warnings = standardization(X)
    Z = (X - means) / scales
    info = {"seed": int(seed), "rows": int(X.shape[0])}
    info.update(meta or {})

    if spec.task == FORCE:
        y = np.asarray(targets, dtype=np.float64)
        classes = []
        if np.all(y == y[0]):
            warnings.append("DegenerateData: all targets identical; constant model")
            est = ConstantRegressor().fit(Z, y)
        else:
            est = make_estimator(spec).fit(Z, y, seed)
        if isinstance(est, GaussianProcess) and est.subsampled_from is not None:
            info["gp_subsample"] = {"from": est.subsampled_from, "kept": est.X.shape[0]}
    else:
        labels = np.asarray(targets, dtype=object)
        classes = sorted(set(labels.tolist()))
        if len(classes) < 2:
            raise DegenerateData("classification needs at least two distinct labels")
        lookup = {c: i for i, c in enumerate(classes)}
        y = np.array([lookup[v] for v in labels], dtype=np.int64)
        est = make_estimator(spec, len(classes)).fit(Z, y, seed)

    info["warnings"] = warnings
    return TrainedModel(spec, est, means, scales, classes, info)


def train(spec: ModelSpec, train_ds: CalibrationDataset, seed: int = 7) -> TrainedModel:
    if len(train_ds) == 0:
        raise DegenerateData("training dataset is empty")
    targets = train_ds.forces() if spec.task == FORCE else train_ds.labels()
    meta = {"dataset_hash": train_ds.content_hash(), "skin_id": train_ds.skin_id}
    return fit(spec, train_ds.features(), targets, seed, meta)
