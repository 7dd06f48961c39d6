"""Compare the compiled and pure-Python kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat 5]

Times the two hot kernels on workloads sized like the calibration task
(4590 training rows, 510 holdout queries), then a full fine-tree fit and a
weighted-kNN holdout prediction, and checks both backends agree exactly.
"""

import argparse
import time

import numpy as np

from astskin import _accel
from astskin.dataset import split_holdout
from astskin.learn import preset, train
from astskin.simskin import bundled_profile, generate_dataset


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def with_backend(impl, fn):
    saved = _accel.best_split, _accel.knn_raw
    _accel.best_split, _accel.knn_raw = impl.best_split, impl.knn_raw
    try:
        return fn()
    finally:
        _accel.best_split, _accel.knn_raw = saved


def workloads(train_ds, test_ds):
    X = train_ds.features()
    y = train_ds.forces()[:, None]
    Q = test_ds.features()
    jobs = {}
    for n in (32, 512, len(X)):
        jobs[f"best_split n={n}"] = lambda impl, n=n: impl.best_split(X[:n], y[:n], 1)
    jobs["knn_raw 510x4590 k=10"] = lambda impl: impl.knn_raw(Q, X, 10, 0)
    jobs["tree-fine fit"] = lambda impl: with_backend(
        impl, lambda: train(preset("force", "tree-fine"), train_ds).estimator.tree.threshold
    )
    knn = train(preset("location", "knn-weighted"), train_ds)
    jobs["knn-weighted predict"] = lambda impl: with_backend(
        impl, lambda: knn.location_scores(Q)
    )
    return jobs


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    try:
        fast = _accel.load_backend("cython")
    except ImportError:
        raise SystemExit("compiled backend not built; run `pip install -e . --no-build-isolation`")
    slow = _accel.load_backend("python")

    ds = generate_dataset(bundled_profile("ast1"), 34, 50, 7)
    train_ds, test_ds = split_holdout(ds, 0.9, 7)

    print(f"{'workload':28s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s}  identical")
    for name, job in workloads(train_ds, test_ds).items():
        t_fast, r_fast = best_of(lambda: job(fast), args.repeat)
        t_slow, r_slow = best_of(lambda: job(slow), args.repeat)
        print(
            f"{name:28s} {1e3 * t_fast:10.2f} {1e3 * t_slow:10.2f} "
            f"{t_slow / t_fast:7.1f}x  {same(r_fast, r_slow)}"
        )


if __name__ == "__main__":
    main()
