"""Model specifications and the comparison registries."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidModelSpec

FORCE = "force-regression"
LOCATION = "location-classification"
TASKS = (FORCE, LOCATION)
TASK_ALIASES = {"force": FORCE, "location": LOCATION, FORCE: FORCE, LOCATION: LOCATION}

TREE_MAX_LEAVES = {"fine": 100, "medium": 20, "coarse": 4}
GP_KERNELS = ("rational-quadratic", "squared-exponential", "matern52", "exponential")
KNN_WEIGHTINGS = ("uniform", "inverse-squared-distance")
KNN_METRICS = ("euclidean", "cosine", "minkowski-3")

_KIND_TASKS = {
    "linear-ols": {FORCE},
    "gp": {FORCE},
    "tree": {FORCE, LOCATION},
    "bagged-trees": {FORCE, LOCATION},
    "knn": {LOCATION},
    "gaussian-naive-bayes": {LOCATION},
    "linear-discriminant": {LOCATION},
}

_DEFAULTS = {
    "linear-ols": {},
    "gp": {"kernel": "exponential"},
    "tree": {"preset": "fine"},
    "bagged-trees": {"n_trees": 30, "preset": "fine"},
    "knn": {"k": 10, "weighting": "uniform", "metric": "euclidean"},
    "gaussian-naive-bayes": {},
    "linear-discriminant": {},
}


def normalize_task(task: str) -> str:
    try:
        return TASK_ALIASES[task]
    except KeyError:
        raise InvalidModelSpec(f"unknown task {task!r}; expected one of {TASKS}") from None


@dataclass(frozen=True)
class ModelSpec:
    task: str
    kind: str
    hyperparameters: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "task", normalize_task(self.task))
        if self.kind not in _KIND_TASKS:
            raise InvalidModelSpec(f"unknown model kind {self.kind!r}")
        if self.task not in _KIND_TASKS[self.kind]:
            raise InvalidModelSpec(f"{self.kind} cannot be used for {self.task}")
        hp = dict(_DEFAULTS[self.kind])
        unknown = set(self.hyperparameters) - set(hp)
        if unknown:
            raise InvalidModelSpec(f"{self.kind}: unknown hyperparameter(s) {sorted(unknown)}")
        hp.update(self.hyperparameters)
        _check_hyperparameters(self.kind, hp)
        object.__setattr__(self, "hyperparameters", hp)
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    @property
    def is_regression(self) -> bool:
        return self.task == FORCE

    def to_json(self) -> dict:
        return {"task": self.task, "kind": self.kind, "hyperparameters": dict(self.hyperparameters)}


def _check_hyperparameters(kind: str, hp: dict) -> None:
    if kind in ("tree", "bagged-trees") and hp["preset"] not in TREE_MAX_LEAVES:
        raise InvalidModelSpec(f"tree preset must be one of {sorted(TREE_MAX_LEAVES)}")
    if kind == "bagged-trees" and not (isinstance(hp["n_trees"], int) and hp["n_trees"] >= 1):
        raise InvalidModelSpec("n_trees must be a positive integer")
    if kind == "gp" and hp["kernel"] not in GP_KERNELS:
        raise InvalidModelSpec(f"gp kernel must be one of {GP_KERNELS}")
    if kind == "knn":
        if not (isinstance(hp["k"], int) and hp["k"] >= 1):
            raise InvalidModelSpec("knn k must be a positive integer")
        if hp["weighting"] not in KNN_WEIGHTINGS:
            raise InvalidModelSpec(f"knn weighting must be one of {KNN_WEIGHTINGS}")
        if hp["metric"] not in KNN_METRICS:
            raise InvalidModelSpec(f"knn metric must be one of {KNN_METRICS}")


# preset name -> (kind, hyperparameters); names are what the CLI accepts
_PRESETS = {
    FORCE: {
        "linear-ols": ("linear-ols", {}),
        "tree-fine": ("tree", {"preset": "fine"}),
        "tree-medium": ("tree", {"preset": "medium"}),
        "tree-coarse": ("tree", {"preset": "coarse"}),
        "gp-rational-quadratic": ("gp", {"kernel": "rational-quadratic"}),
        "gp-squared-exponential": ("gp", {"kernel": "squared-exponential"}),
        "gp-matern52": ("gp", {"kernel": "matern52"}),
        "gp-exponential": ("gp", {"kernel": "exponential"}),
        "bagged-trees": ("bagged-trees", {}),
    },
    LOCATION: {
        "tree-fine": ("tree", {"preset": "fine"}),
        "tree-medium": ("tree", {"preset": "medium"}),
        "tree-coarse": ("tree", {"preset": "coarse"}),
        "linear-discriminant": ("linear-discriminant", {}),
        "gaussian-naive-bayes": ("gaussian-naive-bayes", {}),
        "knn-fine": ("knn", {"k": 1}),
        "knn-medium": ("knn", {"k": 10}),
        "knn-coarse": ("knn", {"k": 100}),
        "knn-cosine": ("knn", {"k": 10, "metric": "cosine"}),
        "knn-cubic": ("knn", {"k": 10, "metric": "minkowski-3"}),
        "knn-weighted": ("knn", {"k": 10, "weighting": "inverse-squared-distance"}),
        "bagged-trees": ("bagged-trees", {}),
    },
}


def preset(task: str, name: str) -> ModelSpec:
    task = normalize_task(task)
    try:
        kind, hp = _PRESETS[task][name]
    except KeyError:
        raise InvalidModelSpec(
            f"unknown model {name!r} for {task}; choose from {sorted(_PRESETS[task])}"
        ) from None
    return ModelSpec(task, kind, hp, name)


def preset_names(task: str) -> list[str]:
    return list(_PRESETS[normalize_task(task)])


@dataclass(frozen=True)
class TableRow:
    group: str
    label: str
    preset: str | None  # None: family not implemented, emitted as a placeholder

    @property
    def implemented(self) -> bool:
        return self.preset is not None


def _rows(groups) -> tuple[TableRow, ...]:
    return tuple(TableRow(g, label, p) for g, rows in groups for label, p in rows)


_NN = [
    ("Narrow Neural Network", None),
    ("Medium Neural Network", None),
    ("Wide Neural Network", None),
    ("Bilayered Neural Network", None),
    ("Trilayered Neural Network", None),
]
_SVM = [
    ("Linear", None),
    ("Quadratic", None),
    ("Cubic", None),
    ("Fine Gaussian", None),
    ("Medium Gaussian", None),
    ("Coarse Gaussian", None),
]

COMPARISON_TABLES = {
    FORCE: _rows([
        ("Linear Regression", [
            ("Linear", "linear-ols"),
            ("Interactions Linear", None),
            ("Robust", None),
            ("Stepwise Linear", None),
        ]),
        ("Regression Trees", [
            ("Fine Tree", "tree-fine"),
            ("Medium Tree", "tree-medium"),
            ("Coarse Tree", "tree-coarse"),
        ]),
        ("Support Vector Machines", _SVM),
        ("Gaussian Process", [
            ("Rational Quadratic", "gp-rational-quadratic"),
            ("Squared Exponential", "gp-squared-exponential"),
            ("Matern 5/2", "gp-matern52"),
            ("Exponential", "gp-exponential"),
        ]),
        ("Ensemble of Trees", [("Boosted Trees", None), ("Bagged Trees", "bagged-trees")]),
        ("Neural Networks", _NN),
    ]),
    LOCATION: _rows([
        ("Tree", [
            ("Fine Tree", "tree-fine"),
            ("Medium Tree", "tree-medium"),
            ("Coarse Tree", "tree-coarse"),
        ]),
        ("Discriminant Analysis", [
            ("Linear Discriminant", "linear-discriminant"),
            ("Quadratic Discriminant", None),
        ]),
        ("Naive Bayes", [
            ("Gaussian Naive Bayes", "gaussian-naive-bayes"),
            ("Kernel Naive Bayes", None),
        ]),
        ("Support Vector Machines", _SVM),
        ("Nearest Neighbor Classifier", [
            ("Fine KNN", "knn-fine"),
            ("Medium KNN", "knn-medium"),
            ("Coarse KNN", "knn-coarse"),
            ("Cosine KNN", "knn-cosine"),
            ("Cubic KNN", "knn-cubic"),
            ("Weighted KNN", "knn-weighted"),
        ]),
        ("Ensemble Classifiers", [
            ("Boosted Trees", None),
            ("Bagged Trees", "bagged-trees"),
            ("Subspace Discriminant", None),
            ("Subspace KNN", None),
            ("RUSBoosted Trees", None),
        ]),
        ("Neural Network Classifiers", _NN),
    ]),
}


def registry(task: str) -> list[ModelSpec]:
    """Implemented specs for a task, in comparison-table order."""
    task = normalize_task(task)
    return [preset(task, row.preset) for row in COMPARISON_TABLES[task] if row.implemented]
