"""Gaussian naive Bayes and linear discriminant analysis."""

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..errors import SingularCovariance

VARIANCE_FLOOR = 1e-9
LDA_RIDGE = 1e-9


def softmax_rows(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class GaussianNaiveBayes:
    kind = "gaussian-naive-bayes"

    def __init__(self, n_classes=0):
        self.n_classes = n_classes
        self.means = self.variances = self.log_priors = None

    def fit(self, X, y, seed=0):
        C = self.n_classes
        self.means = np.array([X[y == c].mean(axis=0) for c in range(C)])
        self.variances = np.maximum(
            np.array([X[y == c].var(axis=0) for c in range(C)]), VARIANCE_FLOOR
        )
        counts = np.bincount(y, minlength=C).astype(float)
        self.log_priors = np.log(counts / counts.sum())
        return self

    def log_joint(self, X):
        out = np.empty((X.shape[0], self.n_classes))
        for c in range(self.n_classes):
            var = self.variances[c]
            diff = X - self.means[c]
            out[:, c] = self.log_priors[c] - 0.5 * np.sum(
                np.log(2.0 * np.pi * var) + diff * diff / var, axis=1
            )
        return out

    def predict_scores(self, X):
        return softmax_rows(self.log_joint(X))

    def get_params(self):
        return {"means": self.means, "variances": self.variances, "log_priors": self.log_priors}

    @classmethod
    def from_params(cls, hp, params, n_classes=0):
        model = cls(n_classes)
        model.means = np.asarray(params["means"], dtype=float)
        model.variances = np.asarray(params["variances"], dtype=float)
        model.log_priors = np.asarray(params["log_priors"], dtype=float)
        return model


class LinearDiscriminant:
    """Shared-covariance Gaussian classes; linear scores ``x W^T + b``."""

    kind = "linear-discriminant"

    def __init__(self, n_classes=0):
        self.n_classes = n_classes
        self.coef = self.intercept = None

    def fit(self, X, y, seed=0):
        C = self.n_classes
        n, d = X.shape
        means = np.array([X[y == c].mean(axis=0) for c in range(C)])
        centered = X - means[y]
        cov = centered.T @ centered / max(n - C, 1) + LDA_RIDGE * np.eye(d)
        try:
            cho = cho_factor(cov, lower=True)
        except LinAlgError:
            raise SingularCovariance("pooled covariance is singular even after ridge") from None
        if not np.all(np.isfinite(cho[0])):
            raise SingularCovariance("pooled covariance factorization is not finite")
        counts = np.bincount(y, minlength=C).astype(float)
        self.coef = cho_solve(cho, means.T).T
        self.intercept = -0.5 * np.sum(self.coef * means, axis=1) + np.log(counts / n)
        return self

    def predict_scores(self, X):
        return softmax_rows(X @ self.coef.T + self.intercept)

    def get_params(self):
        return {"coef": self.coef, "intercept": self.intercept}

    @classmethod
    def from_params(cls, hp, params, n_classes=0):
        model = cls(n_classes)
        model.coef = np.asarray(params["coef"], dtype=float)
        model.intercept = np.asarray(params["intercept"], dtype=float)
        return model
