"""Exact Gaussian-process regression with a log-marginal-likelihood grid search."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solve_triangular

from ..rng import SplitMix64

GP_MAX_TRAIN = 1500
LENGTH_SCALES = (0.1, 0.3, 1.0, 3.0, 10.0)
SIGNAL_FACTORS = (0.5, 1.0, 2.0)
NOISE_FACTORS = (1e-4, 1e-2, 1e-1)
RQ_ALPHAS = (0.5, 1.0, 2.0)

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GpKernel:
    kind: str
    signal_variance: float
    length_scale: float
    noise_variance: float
    alpha: float = 1.0  # rational-quadratic only

    def __post_init__(self):
        if not (self.signal_variance > 0 and self.length_scale > 0 and self.noise_variance > 0):
            raise ValueError("kernel variances and length scale must be positive")
        if self.kind == "rational-quadratic" and not self.alpha > 0:
            raise ValueError("rational-quadratic alpha must be positive")

    def correlation(self, sqdist):
        return correlation(self.kind, sqdist, self.length_scale, self.alpha)

    def __call__(self, sqdist):
        """Covariance (without noise) for a matrix of squared distances."""
        return self.signal_variance * self.correlation(sqdist)


def sq_distances(A, B):
    """Squared Euclidean distances, accumulated feature by feature."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    out = np.zeros((A.shape[0], B.shape[0]))
    for j in range(A.shape[1]):
        diff = A[:, j, None] - B[None, :, j]
        out += diff * diff
    return out


def correlation(kind, sqdist, length_scale, alpha=1.0):
    ell = length_scale
    if kind == "squared-exponential":
        return np.exp(-sqdist / (2.0 * ell * ell))
    if kind == "rational-quadratic":
        return (1.0 + sqdist / (2.0 * alpha * ell * ell)) ** (-alpha)
    r = np.sqrt(sqdist) / ell
    if kind == "exponential":
        return np.exp(-r)
    if kind == "matern52":
        s5r = math.sqrt(5.0) * r
        return (1.0 + s5r + (5.0 / 3.0) * r * r) * np.exp(-s5r)
    raise ValueError(f"unknown kernel {kind!r}")


def hyperparameter_grid(kind, target_variance):
    """Grid in search order; the first maximum wins, so smaller length scales win ties."""
    alphas = RQ_ALPHAS if kind == "rational-quadratic" else (1.0,)
    for ell in LENGTH_SCALES:
        for a in alphas:
            for sf in SIGNAL_FACTORS:
                for nf in NOISE_FACTORS:
                    yield GpKernel(kind, sf * target_variance, ell, nf * target_variance, a)


def log_marginal_likelihood(corr, y, kernel):
    """Returns ``(lml, cho)``; ``lml = -inf`` if the covariance is not PD."""
    K = kernel.signal_variance * corr
    K.flat[:: K.shape[0] + 1] += kernel.noise_variance
    try:
        # K is symmetric: its transpose is a Fortran-ordered view LAPACK can factor in place
        cho = cho_factor(K.T, lower=True, check_finite=False, overwrite_a=True)
    except LinAlgError:
        return -math.inf, None
    a = cho_solve(cho, y, check_finite=False)
    lml = -0.5 * float(y @ a) - float(np.sum(np.log(np.diag(cho[0])))) - 0.5 * len(y) * _LOG_2PI
    return lml, (cho, a)


class GaussianProcess:
    kind = "gp"

    def __init__(self, kernel_kind="exponential", max_train=GP_MAX_TRAIN):
        self.kernel_kind = kernel_kind
        self.max_train = max_train
        self.kernel: GpKernel | None = None
        self.X = None
        self.alpha_vec = None
        self.y_mean = 0.0
        self.lml = None
        self.subsampled_from = None
        self._chol = None

    def fit(self, X, y, seed=0):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.shape[0] > self.max_train:
            self.subsampled_from = X.shape[0]
            keep = np.sort(SplitMix64(seed).permutation(X.shape[0])[: self.max_train])
            X, y = X[keep], y[keep]
        self.X = np.ascontiguousarray(X)
        self.y_mean = float(np.mean(y))
        yc = y - self.y_mean
        variance = float(np.mean(yc * yc))
        if not variance > 0:
            raise ValueError("targets have zero variance")
        sqd = sq_distances(self.X, self.X)

        best = (-math.inf, None, None)
        corr_cache_key, corr = None, None
        for kernel in hyperparameter_grid(self.kernel_kind, variance):
            key = (kernel.length_scale, kernel.alpha)
            if key != corr_cache_key:
                corr = kernel.correlation(sqd)
                corr_cache_key = key
            lml, fac = log_marginal_likelihood(corr, yc, kernel)
            if lml > best[0]:
                best = (lml, kernel, fac)
        if best[1] is None:
            raise LinAlgError("no grid point produced a positive-definite covariance")
        self.lml, self.kernel, (self._chol, self.alpha_vec) = best
        return self

    def fit_fixed(self, X, y, kernel: GpKernel, center=True):
        """Condition on data with fixed hyperparameters (no search, no subsampling)."""
        self.X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        self.y_mean = float(np.mean(y)) if center else 0.0
        self.kernel = kernel
        self.lml, fac = log_marginal_likelihood(
            kernel.correlation(sq_distances(self.X, self.X)), y - self.y_mean, kernel
        )
        if fac is None:
            raise LinAlgError("covariance is not positive definite")
        self._chol, self.alpha_vec = fac
        return self

    def cross_covariance(self, Xq):
        return self.kernel(sq_distances(Xq, self.X))

    def predict(self, Xq):
        return self.cross_covariance(Xq) @ self.alpha_vec + self.y_mean

    def predict_var(self, Xq, include_noise=False):
        if self._chol is None:
            K = self.kernel(sq_distances(self.X, self.X))
            K[np.diag_indices_from(K)] += self.kernel.noise_variance
            self._chol = cho_factor(K, lower=True, check_finite=False)
        v = solve_triangular(self._chol[0], self.cross_covariance(Xq).T, lower=True)
        var = self.kernel.signal_variance - np.sum(v * v, axis=0)
        if include_noise:
            var = var + self.kernel.noise_variance
        return np.maximum(var, 0.0)

    def get_params(self):
        k = self.kernel
        return {
            "x_train": self.X,
            "alpha": self.alpha_vec,
            "y_mean": self.y_mean,
            "signal_variance": k.signal_variance,
            "length_scale": k.length_scale,
            "noise_variance": k.noise_variance,
            "rq_alpha": k.alpha,
            "log_marginal_likelihood": self.lml,
        }

    @classmethod
    def from_params(cls, hp, params):
        gp = cls(hp["kernel"])
        gp.X = np.ascontiguousarray(params["x_train"], dtype=np.float64)
        gp.alpha_vec = np.asarray(params["alpha"], dtype=np.float64)
        gp.y_mean = float(params["y_mean"])
        gp.kernel = GpKernel(
            hp["kernel"],
            float(params["signal_variance"]),
            float(params["length_scale"]),
            float(params["noise_variance"]),
            float(params["rq_alpha"]),
        )
        gp.lml = float(params["log_marginal_likelihood"])
        return gp
