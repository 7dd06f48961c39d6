import numpy as np

from .. import _accel
from .._kernels_py import METRIC_COSINE, METRIC_EUCLIDEAN, METRIC_MINKOWSKI3

_METRIC_CODES = {
    "euclidean": METRIC_EUCLIDEAN,
    "minkowski-3": METRIC_MINKOWSKI3,
    "cosine": METRIC_COSINE,
}


def raw_to_distance(raw, metric):
    if metric == "euclidean":
        return np.sqrt(raw)
    if metric == "minkowski-3":
        return np.cbrt(raw)
    return raw


def vote(neighbor_labels, distances, n_classes, weighting):
    """Per-class scores summing to 1 for each query row.

    Inverse-squared-distance weighting gives exact duplicates (distance 0)
    all of the weight.
    """
    nq, k = neighbor_labels.shape
    if weighting == "uniform":
        weights = np.ones((nq, k))
    else:
        exact = distances == 0.0
        with np.errstate(divide="ignore"):
            weights = 1.0 / (distances * distances)
        has_exact = exact.any(axis=1)
        weights[has_exact] = exact[has_exact].astype(float)
    scores = np.zeros((nq, n_classes))
    rows = np.repeat(np.arange(nq), k)
    np.add.at(scores, (rows, neighbor_labels.ravel()), weights.ravel())
    return scores / scores.sum(axis=1, keepdims=True)


class KNearestNeighbors:
    kind = "knn"

    def __init__(self, k=10, weighting="uniform", metric="euclidean", n_classes=0):
        self.k = k
        self.weighting = weighting
        self.metric = metric
        self.n_classes = n_classes
        self.X = None
        self.y = None

    def fit(self, X, y, seed=0):
        self.X = np.ascontiguousarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        return self

    def kneighbors(self, Xq):
        """Neighbor indices and distances, nearest first, ties by training order."""
        idx, raw = _accel.knn_raw(Xq, self.X, self.k, _METRIC_CODES[self.metric])
        return idx, raw_to_distance(raw, self.metric)

    def predict_scores(self, Xq):
        idx, dist = self.kneighbors(Xq)
        return vote(self.y[idx], dist, self.n_classes, self.weighting)

    def get_params(self):
        return {"x_train": self.X, "y_train": self.y}

    @classmethod
    def from_params(cls, hp, params, n_classes=0):
        model = cls(hp["k"], hp["weighting"], hp["metric"], n_classes)
        model.X = np.ascontiguousarray(params["x_train"], dtype=np.float64)
        model.y = np.asarray(params["y_train"], dtype=np.int64)
        return model
