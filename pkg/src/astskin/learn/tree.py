"""CART trees grown best-first under a leaf budget, and bootstrap bagging."""

from __future__ import annotations

import heapq

import numpy as np

from .. import _accel
from ..rng import SplitMix64
from .spec import TREE_MAX_LEAVES


def _threshold(lo: float, hi: float) -> float:
    t = 0.5 * (lo + hi)
    # adjacent floats: the midpoint can round up onto hi
    return lo if t >= hi else t


class DecisionTree:
    """Binary tree over a target matrix ``Y`` (n x m).

    Regression passes ``Y = y[:, None]`` (variance reduction); classification
    passes one-hot class columns (Gini).  Leaves store the column means, i.e.
    the mean target or the class fractions.  The node with the largest
    impurity decrease is split first until ``max_leaves`` leaves exist or no
    split improves impurity.
    """

    def __init__(self, max_leaves: int, min_leaf: int = 1):
        self.max_leaves = int(max_leaves)
        self.min_leaf = int(min_leaf)
        self.feature = self.threshold = self.left = self.right = self.value = None

    def fit(self, X, Y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        Y = np.ascontiguousarray(Y, dtype=np.float64)
        feature, threshold, left, right, value = [], [], [], [], []

        def new_node(idx):
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(Y[idx].mean(axis=0))
            return len(feature) - 1

        def candidate(node, idx):
            if len(idx) < 2 * self.min_leaf:
                return
            f, lo, hi, score = _accel.best_split(X[idx], Y[idx], self.min_leaf)
            if f < 0:
                return
            total = Y[idx].sum(axis=0)
            parent = float(np.dot(total, total)) / len(idx)
            gain = score - parent
            if gain > 1e-12 * max(abs(parent), 1e-300):
                heapq.heappush(heap, (-gain, node, f, _threshold(lo, hi), idx))

        heap = []
        root_idx = np.arange(X.shape[0])
        candidate(new_node(root_idx), root_idx)
        leaves = 1
        while heap and leaves < self.max_leaves:
            _, node, f, thr, idx = heapq.heappop(heap)
            go_left = X[idx, f] <= thr
            li, ri = idx[go_left], idx[~go_left]
            feature[node], threshold[node] = f, thr
            left[node] = new_node(li)
            right[node] = new_node(ri)
            leaves += 1
            candidate(left[node], li)
            candidate(right[node], ri)

        self.feature = np.array(feature, dtype=np.int64)
        self.threshold = np.array(threshold, dtype=np.float64)
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.value = np.array(value, dtype=np.float64).reshape(len(feature), Y.shape[1])
        return self

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def apply(self, X):
        """Leaf index reached by each row."""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            cur = node[rows]
            goes_left = X[rows, self.feature[cur]] <= self.threshold[cur]
            node[rows] = np.where(goes_left, self.left[cur], self.right[cur])
            active = self.feature[node] >= 0
        return node

    def predict_value(self, X):
        return self.value[self.apply(X)]

    def get_params(self):
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
        }

    @classmethod
    def from_params(cls, max_leaves, params):
        tree = cls(max_leaves)
        tree.feature = np.asarray(params["feature"], dtype=np.int64)
        tree.threshold = np.asarray(params["threshold"], dtype=np.float64)
        tree.left = np.asarray(params["left"], dtype=np.int64)
        tree.right = np.asarray(params["right"], dtype=np.int64)
        tree.value = np.asarray(params["value"], dtype=np.float64)
        return tree


def _one_hot(y_idx, n_classes):
    return np.eye(n_classes)[y_idx]


class TreeModel:
    kind = "tree"

    def __init__(self, preset="fine", classification=False, n_classes=0):
        self.preset = preset
        self.classification = classification
        self.n_classes = n_classes
        self.tree = None

    def fit(self, X, y, seed=0):
        Y = _one_hot(y, self.n_classes) if self.classification else np.asarray(y, float)[:, None]
        self.tree = DecisionTree(TREE_MAX_LEAVES[self.preset]).fit(X, Y)
        return self

    def predict(self, X):
        return self.tree.predict_value(X)[:, 0]

    def predict_scores(self, X):
        return self.tree.predict_value(X)

    def get_params(self):
        return self.tree.get_params()

    @classmethod
    def from_params(cls, hp, params, classification=False, n_classes=0):
        model = cls(hp["preset"], classification, n_classes)
        model.tree = DecisionTree.from_params(TREE_MAX_LEAVES[hp["preset"]], params)
        return model


class BaggedTrees:
    """Bootstrap-aggregated trees.

    Member ``t`` is seeded with the ``t``-th SplitMix64 output of the master
    seed and trained on ``n`` draws with replacement.  Regression averages
    the members; classification takes a majority vote of member labels.
    """

    kind = "bagged-trees"

    def __init__(self, n_trees=30, preset="fine", classification=False, n_classes=0):
        self.n_trees = n_trees
        self.preset = preset
        self.classification = classification
        self.n_classes = n_classes
        self.members: list[DecisionTree] = []

    def fit(self, X, y, seed=0):
        n = X.shape[0]
        Y = _one_hot(y, self.n_classes) if self.classification else np.asarray(y, float)[:, None]
        self.members = []
        for child in SplitMix64(seed).spawn(self.n_trees):
            rows = SplitMix64(child).integers(n, n)
            self.members.append(DecisionTree(TREE_MAX_LEAVES[self.preset]).fit(X[rows], Y[rows]))
        return self

    def predict(self, X):
        return np.mean([m.predict_value(X)[:, 0] for m in self.members], axis=0)

    def predict_scores(self, X):
        votes = np.zeros((np.asarray(X).shape[0], self.n_classes))
        rows = np.arange(votes.shape[0])
        for m in self.members:
            votes[rows, np.argmax(m.predict_value(X), axis=1)] += 1.0
        return votes / len(self.members)

    def get_params(self):
        return {"trees": [m.get_params() for m in self.members]}

    @classmethod
    def from_params(cls, hp, params, classification=False, n_classes=0):
        model = cls(hp["n_trees"], hp["preset"], classification, n_classes)
        leaves = TREE_MAX_LEAVES[hp["preset"]]
        model.members = [DecisionTree.from_params(leaves, p) for p in params["trees"]]
        return model
