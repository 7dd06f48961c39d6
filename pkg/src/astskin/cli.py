"""Command-line entry point: ``astskin <subcommand> [flags]``.

Exit codes: 0 success, 1 I/O or domain error (the message names the error
class), 2 usage error.  Each run writes its artifacts atomically plus a
``<output>.run_meta.json`` sidecar whose ``argv`` replays the run.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__, _accel
from .dataset import CalibrationDataset, parse_csv_text, read_csv, split_holdout, write_csv
from .dsp import DEFAULT_FRAME_LEN, DEFAULT_RATE_HZ, REFERENCE_AMPLITUDE, REFERENCE_FREQS_HZ, ToneSpec
from .dsp import featurize, synth_reference
from .errors import AstSkinError, EmptyInput, MalformedCsv
from .learn import FORCE, LOCATION, load_model, preset, preset_names, registry, save_model, train
from .learn.spec import normalize_task
from .metrics import (
    comparison_table,
    cv_compare,
    cv_table_csv,
    error_stats,
    error_stats_by_level,
    format_location_report,
    format_table,
    location_accuracy,
    tolerance_bands,
    truncate_pct,
)
from .simskin import FREQS, generate_dataset, load_profile
from .svg import bar_chart, line_chart
from .wavfile import wav_read, wav_write

SEED_ENV = "AST_SEED"
DEFAULT_SEED = 7
META_SUFFIX = ".run_meta.json"


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return _seed(raw)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{SEED_ENV}: {exc}") from None


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 <= value < 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1)")
    return value


def _features(text: str) -> list[float]:
    parts = text.split(",")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"features must be numbers, got {text!r}") from None
    if len(values) != 4:
        raise argparse.ArgumentTypeError("expected four comma-separated amplitudes a300,a500,a700,a900")
    return values


def _tones(text: str) -> list[ToneSpec]:
    tones = []
    for item in text.split(","):
        try:
            freq, amp = item.split(":")
            tones.append(ToneSpec(float(freq), float(amp)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"tone must be FREQ:AMP, got {item!r}") from None
    return tones


def _task(text: str) -> str:
    try:
        return normalize_task(text)
    except AstSkinError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------- file helpers

def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_text_atomic(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_json_atomic(path, doc) -> None:
    write_text_atomic(path, json.dumps(doc, indent=1, sort_keys=True) + "\n")


def versions() -> dict:
    return {
        "astskin": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "kernel_backend": _accel.BACKEND,
    }


def write_run_meta(meta_path, args, replay_argv, inputs, outputs) -> None:
    doc = {
        "subcommand": args.command,
        "seed": getattr(args, "seed", None),
        "argv": replay_argv,
        "versions": versions(),
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "outputs": {str(p): sha256_file(p) for p in outputs},
    }
    write_json_atomic(meta_path, doc)


# ---------------------------------------------------------------- subcommands

def _partition(ds: CalibrationDataset, holdout_frac: float, seed: int):
    if holdout_frac == 0.0:
        return ds, ds
    return split_holdout(ds, 1.0 - holdout_frac, seed)


def _preset(task, name):
    if name not in preset_names(task):
        raise UsageError(f"unknown model {name!r} for {task}; choose from {', '.join(preset_names(task))}")
    return preset(task, name)


FEATURE_CSV_HEADER = "frame,start_sample,a300,a500,a700,a900"


def read_feature_rows(path) -> np.ndarray:
    """Feature matrix from a featurize CSV or a calibration CSV."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lines = text.splitlines()
    if lines and lines[0] == FEATURE_CSV_HEADER:
        rows = []
        for n, line in enumerate(lines[1:], start=2):
            cells = line.split(",")
            try:
                if len(cells) != 6:
                    raise ValueError
                rows.append([float(c) for c in cells[2:]])
            except ValueError:
                raise MalformedCsv(f"{path}:{n}: expected frame,start_sample and four amplitudes") from None
        return np.array(rows, dtype=np.float64).reshape(-1, 4)
    return parse_csv_text(text, str(path)).features()


def cmd_synth(args):
    tones = args.tones or [ToneSpec(f, REFERENCE_AMPLITUDE) for f in REFERENCE_FREQS_HZ]
    wav_write(synth_reference(tones, args.rate, args.dur), args.out)
    return [], [args.out]


def cmd_featurize(args):
    w = wav_read(args.input)
    hop = args.hop or args.frame
    window = None if args.window == "rectangular" else args.window
    rows = [FEATURE_CSV_HEADER]
    for i, feats in enumerate(featurize(w, args.frame, hop, window)):
        rows.append(",".join([str(i), str(i * hop)] + [repr(float(v)) for v in feats.as_array()]))
    write_text_atomic(args.out, "\n".join(rows) + "\n")
    print(f"{len(rows) - 1} frame(s) -> {args.out}")
    return [args.input], [args.out]


def cmd_simulate(args):
    profile = load_profile(args.profile)
    ds = generate_dataset(profile, args.levels, args.per_level, args.seed)
    write_csv(ds, args.out)
    print(f"{len(ds)} rows for {profile.skin_id} -> {args.out}")
    inputs = [args.profile] if Path(args.profile).is_file() else []
    return inputs, [args.out]


def cmd_train(args):
    ds = read_csv(args.data)
    train_ds, _ = _partition(ds, args.holdout_frac, args.seed)
    model = train(_preset(args.task, args.kind), train_ds, args.seed)
    model.training_meta["holdout_frac"] = args.holdout_frac
    for warning in model.training_meta.get("warnings", []):
        print(f"warning: {warning}", file=sys.stderr)
    save_model(model, args.out)
    print(f"trained {args.kind} ({model.task}) on {len(train_ds)} rows -> {args.out}")
    return [args.data], [args.out]


def cmd_select(args):
    ds = read_csv(args.data)
    train_ds, _ = _partition(ds, args.holdout_frac, args.seed)
    if args.models:
        specs = [_preset(args.task, name) for name in args.models.split(",")]
    else:
        specs = registry(args.task)
    report = cv_compare(specs, train_ds, args.folds, args.seed, n_jobs=args.jobs)
    write_text_atomic(args.out, cv_table_csv(report))
    grid = comparison_table({train_ds.skin_id or "skin": report}, report.task)
    print(format_table(grid), end="")
    unit = "RMSE N" if report.task == FORCE else "accuracy %"
    print(f"selected: {report.winner.spec.name} ({unit} {report.winner.mean_score:.4f})")
    return [args.data], [args.out]


def cmd_predict(args):
    if (args.features is None) == (args.data is None):
        raise UsageError("give exactly one of --features or --data")
    model = load_model(args.model)
    if args.features is not None:
        X = np.array([args.features])
    else:
        X = read_feature_rows(args.data)
    if model.task == FORCE:
        out = [repr(float(v)) for v in model.predict_forces(X)]
    else:
        out = [str(v) for v in model.predict_locations(X)]
    if args.out:
        header = "force_n" if model.task == FORCE else "location"
        write_text_atomic(args.out, "\n".join([header] + out) + "\n")
        return [p for p in (args.model, args.data) if p], [args.out]
    print("\n".join(out))
    return [p for p in (args.model, args.data) if p], []


def cmd_evaluate(args):
    model = load_model(args.model)
    ds = read_csv(args.data)
    _, test_ds = _partition(ds, args.holdout_frac, args.seed)
    X = test_ds.features()
    doc = {"task": model.task, "model": model.spec.name or model.spec.kind, "skin_id": test_ds.skin_id,
           "rows": len(test_ds)}
    if model.task == FORCE:
        truth, pred = test_ds.forces(), model.predict_forces(X)
        bands = tolerance_bands(truth, pred)
        doc["tolerance"] = bands.to_json()
        doc["error_stats"] = error_stats(truth, pred).to_json()
        doc["error_stats_by_level"] = {
            repr(k): v.to_json() for k, v in error_stats_by_level(truth, pred).items()
        }
        for t, pct in bands.pct_within.items():
            print(f"within +/-{t:.2f} N: {pct:.2f}%")
        print(f"rmse: {bands.rmse_n:.4f} N")
    else:
        rep = location_accuracy(test_ds.labels(), model.predict_locations(X))
        doc["location"] = rep.to_json()
        doc["location"]["overall_accuracy_pct_text"] = truncate_pct(rep.overall_accuracy_pct)
        print(format_location_report(rep, test_ds.skin_id or ""), end="")
    write_json_atomic(args.out, doc)
    return [args.model, args.data], [args.out]


def amplitude_means(ds: CalibrationDataset) -> dict:
    """``{label: (forces, means[n_forces, 4])}`` averaged over repeated samples."""
    labels, forces, X = ds.labels(), ds.forces(), ds.features()
    out = {}
    for label in sorted(set(labels.tolist())):
        mask = labels == label
        levels = np.unique(forces[mask])
        means = np.array([X[mask & (forces == f)].mean(axis=0) for f in levels])
        out[label] = (levels, means)
    return out


def cmd_report(args):
    ds = read_csv(args.data)
    if len(ds) == 0:
        raise EmptyInput(f"{args.data} has no rows")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    means = amplitude_means(ds)
    outputs = []
    rows = ["location,force_n,a300,a500,a700,a900"]
    for label, (levels, m) in means.items():
        for f, row in zip(levels, m):
            rows.append(",".join([label, repr(float(f))] + [repr(float(v)) for v in row]))
    csv_path = out_dir / "amplitude_means.csv"
    write_text_atomic(csv_path, "\n".join(rows) + "\n")
    outputs.append(csv_path)
    skin = ds.skin_id or ""
    for j, freq in enumerate(FREQS):
        series = {f"location {label}": (levels, m[:, j]) for label, (levels, m) in means.items()}
        svg = line_chart(series, f"{skin} {freq} Hz amplitude vs force".strip(), "force (N)", "amplitude")
        path = out_dir / f"amplitude_{freq}hz.svg"
        write_text_atomic(path, svg)
        outputs.append(path)
    inputs = [args.data]
    if args.evaluation:
        with open(args.evaluation, encoding="utf-8") as fh:
            doc = json.load(fh)
        if "tolerance" not in doc:
            raise EmptyInput(f"{args.evaluation} holds no force tolerance report")
        pct = doc["tolerance"]["pct_within"]
        cats = sorted(pct, key=float)
        svg = bar_chart([f"+/-{float(c):.2f} N" for c in cats], [pct[c] for c in cats],
                        f"{doc.get('skin_id') or ''} force predictions within tolerance".strip(),
                        "predictions (%)")
        path = out_dir / "tolerance_bands.svg"
        write_text_atomic(path, svg)
        outputs.append(path)
        inputs.append(args.evaluation)
    print(f"{len(outputs)} file(s) -> {out_dir}")
    return inputs, outputs


# ---------------------------------------------------------------- parser

COMMANDS = {
    "synth": cmd_synth,
    "featurize": cmd_featurize,
    "simulate": cmd_simulate,
    "train": cmd_train,
    "select": cmd_select,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
}


def build_parser(seed_default: int | None = None) -> argparse.ArgumentParser:
    seed_default = DEFAULT_SEED if seed_default is None else seed_default
    parser = argparse.ArgumentParser(
        prog="astskin",
        description="Acoustic soft tactile skin calibration pipeline.",
        epilog=f"Seeds default to ${SEED_ENV} when set, else {DEFAULT_SEED}; --seed overrides both.",
    )
    parser.add_argument("--version", action="version", version=f"astskin {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--seed", type=_seed, default=seed_default,
                       help=f"64-bit seed (default ${SEED_ENV} or {DEFAULT_SEED})")
        return p

    p = add("synth", "write the four-tone reference signal as a WAV file")
    p.add_argument("--rate", type=_positive_int, default=DEFAULT_RATE_HZ, help="sample rate in Hz")
    p.add_argument("--dur", type=float, default=1.0, help="duration in seconds")
    p.add_argument("--tones", type=_tones, help="override tones as FREQ:AMP,FREQ:AMP,...")
    p.add_argument("--out", required=True, help="output WAV path")

    p = add("featurize", "extract tone amplitudes from the frames of a WAV capture")
    p.add_argument("--in", dest="input", required=True, help="input WAV path")
    p.add_argument("--frame", type=_positive_int, default=DEFAULT_FRAME_LEN, help="frame length in samples")
    p.add_argument("--hop", type=_positive_int, help="hop in samples (default: frame length)")
    p.add_argument("--window", choices=("rectangular", "hann"), default="rectangular", help="analysis window")
    p.add_argument("--out", required=True, help="output features CSV")

    p = add("simulate", "generate a calibration dataset from a skin profile")
    p.add_argument("--profile", required=True, help="profile JSON path or bundled name (ast1 ... ast4d)")
    p.add_argument("--levels", type=_positive_int, default=34, help="force levels from 0 to force_max_n")
    p.add_argument("--per-level", type=_positive_int, default=50, help="samples per level and location")
    p.add_argument("--out", required=True, help="output calibration CSV")

    p = add("train", "train one model on the training partition")
    p.add_argument("--data", required=True, help="calibration CSV")
    p.add_argument("--task", type=_task, required=True, help="force or location")
    p.add_argument("--kind", required=True,
                   help="model preset; force: " + ", ".join(preset_names(FORCE))
                   + "; location: " + ", ".join(preset_names(LOCATION)))
    p.add_argument("--holdout-frac", type=_fraction, default=0.1,
                   help="stratified fraction held out for evaluation (0 trains on all rows)")
    p.add_argument("--out", required=True, help="output model JSON")

    p = add("select", "cross-validate the model registry and pick the winner")
    p.add_argument("--data", required=True, help="calibration CSV")
    p.add_argument("--task", type=_task, required=True, help="force or location")
    p.add_argument("--models", help="comma-separated preset names (default: full registry)")
    p.add_argument("--folds", type=_positive_int, default=10, help="number of CV folds")
    p.add_argument("--holdout-frac", type=_fraction, default=0.1,
                   help="stratified fraction excluded before cross-validation")
    p.add_argument("--jobs", type=_positive_int, default=1, help="parallel CV workers")
    p.add_argument("--out", required=True, help="output table CSV")

    p = add("predict", "predict force or location with a saved model")
    p.add_argument("--model", required=True, help="model JSON")
    p.add_argument("--features", type=_features, help="a300,a500,a700,a900 for one sample")
    p.add_argument("--data", help="calibration or feature CSV to predict row by row")
    p.add_argument("--out", help="write predictions CSV instead of printing")

    p = add("evaluate", "score a saved model on the holdout partition")
    p.add_argument("--model", required=True, help="model JSON")
    p.add_argument("--data", required=True, help="calibration CSV")
    p.add_argument("--holdout-frac", type=_fraction, default=0.1,
                   help="stratified holdout fraction (0 scores every row)")
    p.add_argument("--out", required=True, help="output report JSON")

    p = add("report", "write amplitude-vs-force SVGs and tolerance charts")
    p.add_argument("--data", required=True, help="calibration CSV")
    p.add_argument("--evaluation", help="report JSON from evaluate (adds a tolerance bar chart)")
    p.add_argument("--out-dir", required=True, help="output directory")
    return parser


def _replay_argv(argv: list[str], args) -> list[str]:
    """The invocation with the effective seed spelled out, so $AST_SEED is not needed."""
    if any(a == "--seed" or a.startswith("--seed=") for a in argv):
        return list(argv)
    return list(argv) + ["--seed", str(args.seed)]


def _meta_path(args, outputs) -> Path:
    if args.command == "report":
        return Path(args.out_dir) / "run_meta.json"
    if outputs:
        first = Path(outputs[0])
        return first.with_name(first.name + META_SUFFIX)
    return Path(args.model).with_name(Path(args.model).name + ".predict" + META_SUFFIX)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser(default_seed())
    except UsageError as exc:
        print(f"astskin: error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        inputs, outputs = COMMANDS[args.command](args)
        write_run_meta(_meta_path(args, outputs), args, _replay_argv(argv, args), inputs, outputs)
    except UsageError as exc:
        print(f"astskin {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except AstSkinError as exc:
        print(f"astskin {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"astskin {args.command}: IoError: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"astskin {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
