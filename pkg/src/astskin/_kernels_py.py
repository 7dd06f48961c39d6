"""Pure numpy implementations of the hot kernels.

The Cython module ``_kernels`` mirrors these functions operation for
operation (same accumulation order, same comparisons) so both backends
return bit-identical results.
"""

import numpy as np

METRIC_EUCLIDEAN = 0
METRIC_MINKOWSKI3 = 1
METRIC_COSINE = 2

_QUERY_CHUNK = 256


def best_split(X, Y, min_leaf=1):
    """Best axis-aligned split of a node.

    Maximizes ``sum_c L_c**2 / n_l + sum_c R_c**2 / n_r`` where ``L``/``R``
    are per-column target sums on each side.  With ``Y`` a single target
    column this is variance reduction; with one-hot class columns it is the
    Gini decrease.  Only boundaries between distinct feature values are
    considered.  Ties keep the lowest feature, then the lowest position.

    Returns ``(feature, lo, hi, score)``; ``feature == -1`` if no split.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    n, d = X.shape
    m = Y.shape[1]
    best = (-1, 0.0, 0.0, -np.inf)
    if n < 2 * min_leaf:
        return best
    nl = np.arange(1, n, dtype=np.float64)
    nr = n - nl
    size_ok = (nl >= min_leaf) & (nr >= min_leaf)
    for j in range(d):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        cum = np.cumsum(Y[order], axis=0)
        left = cum[:-1]
        right = cum[-1] - left
        acc_l = left[:, 0] * left[:, 0]
        acc_r = right[:, 0] * right[:, 0]
        for c in range(1, m):
            acc_l += left[:, c] * left[:, c]
            acc_r += right[:, c] * right[:, c]
        score = acc_l / nl + acc_r / nr
        valid = size_ok & (xs[:-1] < xs[1:])
        if not valid.any():
            continue
        score = np.where(valid, score, -np.inf)
        i = int(np.argmax(score))
        if score[i] > best[3]:
            best = (j, float(xs[i]), float(xs[i + 1]), float(score[i]))
    return best


def _raw_block(Qc, X, metric):
    nq, d = Qc.shape
    acc = np.zeros((nq, X.shape[0]))
    if metric == METRIC_EUCLIDEAN:
        for j in range(d):
            diff = Qc[:, j, None] - X[None, :, j]
            acc += diff * diff
        return acc
    if metric == METRIC_MINKOWSKI3:
        for j in range(d):
            diff = np.abs(Qc[:, j, None] - X[None, :, j])
            acc += diff * diff * diff
        return acc
    if metric == METRIC_COSINE:
        qq = np.zeros(nq)
        xx = np.zeros(X.shape[0])
        for j in range(d):
            acc += Qc[:, j, None] * X[None, :, j]
            qq += Qc[:, j] * Qc[:, j]
            xx += X[:, j] * X[:, j]
        denom = np.sqrt(qq)[:, None] * np.sqrt(xx)[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = 1.0 - acc / denom
        return np.where(denom > 0.0, raw, 1.0)
    raise ValueError(f"unknown metric code {metric}")


def knn_raw(Q, X, k, metric):
    """k nearest training rows per query, ordered by (raw distance, index).

    ``raw`` is the squared distance for euclidean, the cubed distance for
    minkowski-3 and ``1 - cos`` for cosine; callers convert it.
    """
    Q = np.ascontiguousarray(Q, dtype=np.float64)
    X = np.ascontiguousarray(X, dtype=np.float64)
    k = min(int(k), X.shape[0])
    idx = np.empty((Q.shape[0], k), dtype=np.int64)
    raw = np.empty((Q.shape[0], k))
    for start in range(0, Q.shape[0], _QUERY_CHUNK):
        block = _raw_block(Q[start : start + _QUERY_CHUNK], X, metric)
        order = np.argsort(block, axis=1, kind="stable")[:, :k]
        idx[start : start + len(block)] = order
        raw[start : start + len(block)] = np.take_along_axis(block, order, axis=1)
    return idx, raw
