import json
import re
import struct
from pathlib import Path

import numpy as np
import pytest

from astskin import cli
from astskin.dataset import CSV_COLUMNS, read_csv
from astskin.dsp import DEFAULT_FRAME_LEN
from astskin.learn.spec import COMPARISON_TABLES, FORCE


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def small_calib(tmp_path_factory):
    path = tmp_path_factory.mktemp("calib") / "calib.csv"
    assert cli.main(["simulate", "--profile", "ast1", "--levels", "12", "--per-level", "5", "--out", str(path)]) == 0
    return path


@pytest.fixture
def noiseless_profile(tmp_path, ast1_noiseless):
    path = tmp_path / "flat.json"
    path.write_text(json.dumps(ast1_noiseless.to_json()))
    return path


class TestSynthFeaturize:
    def test_synth_then_featurize(self, tmp_path, capsys):
        wav = tmp_path / "ref.wav"
        feats = tmp_path / "features.csv"
        assert run(capsys, "synth", "--rate", 44100, "--dur", 1.0, "--out", wav)[0] == 0
        assert struct.unpack_from("<I", wav.read_bytes(), 24)[0] == 44100
        code, out, _ = run(capsys, "featurize", "--in", wav, "--frame", 4410, "--hop", 4410, "--out", feats)
        assert code == 0 and "10 frame(s)" in out
        lines = feats.read_text().splitlines()
        assert lines[0] == "frame,start_sample,a300,a500,a700,a900"
        values = np.array([[float(c) for c in line.split(",")[2:]] for line in lines[1:]])
        # 16-bit quantization bounds the amplitude error
        np.testing.assert_allclose(values, 0.6 / 2.4, atol=1e-4)

    def test_custom_tones_and_window(self, tmp_path, capsys):
        wav = tmp_path / "t.wav"
        assert run(capsys, "synth", "--tones", "500:0.5", "--dur", 0.2, "--out", wav)[0] == 0
        feats = tmp_path / "f.csv"
        assert run(capsys, "featurize", "--in", wav, "--window", "hann", "--out", feats)[0] == 0
        row = [float(c) for c in feats.read_text().splitlines()[1].split(",")]
        assert row[3] == pytest.approx(0.5, abs=1e-4)

    def test_malformed_wav(self, tmp_path, capsys):
        bad = tmp_path / "bad.wav"
        bad.write_bytes(b"RIFX" + b"\0" * 40)
        code, _, err = run(capsys, "featurize", "--in", bad, "--out", tmp_path / "x.csv")
        assert code == 1 and "MalformedWav" in err


class TestSimulate:
    def test_default_counts(self, tmp_path, capsys):
        out = tmp_path / "calib.csv"
        code, stdout, _ = run(capsys, "simulate", "--profile", "ast1", "--levels", 34, "--per-level", 50,
                              "--seed", 7, "--out", out)
        assert code == 0 and "5100 rows" in stdout
        assert out.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
        assert len(read_csv(out)) == 5100

    def test_env_seed_and_override(self, tmp_path, capsys, monkeypatch):
        paths = {}
        for name, env, flag in (("a", "11", []), ("b", None, ["--seed", "11"]), ("c", "12", [])):
            if env is None:
                monkeypatch.delenv("AST_SEED", raising=False)
            else:
                monkeypatch.setenv("AST_SEED", env)
            paths[name] = tmp_path / f"{name}.csv"
            assert run(capsys, "simulate", "--profile", "ast2a", "--levels", 3, "--per-level", 2,
                       "--out", paths[name], *flag)[0] == 0
        assert paths["a"].read_bytes() == paths["b"].read_bytes()
        assert paths["a"].read_bytes() != paths["c"].read_bytes()
        monkeypatch.setenv("AST_SEED", "12")
        assert run(capsys, "simulate", "--profile", "ast2a", "--levels", 3, "--per-level", 2,
                   "--seed", 11, "--out", tmp_path / "d.csv")[0] == 0
        assert (tmp_path / "d.csv").read_bytes() == paths["a"].read_bytes()

    def test_bad_profile(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"skin_id": "X"}')
        code, _, err = run(capsys, "simulate", "--profile", bad, "--out", tmp_path / "o.csv")
        assert code == 1 and "MalformedProfile" in err


class TestTrainPredictEvaluate:
    def test_force_pipeline(self, tmp_path, capsys, small_calib):
        model = tmp_path / "m.json"
        code, _, _ = run(capsys, "train", "--data", small_calib, "--task", "force", "--kind", "gp-exponential",
                         "--out", model)
        assert code == 0
        doc = json.loads(model.read_text())
        assert doc["format_version"] == 1 and doc["task"] == FORCE
        code, out, _ = run(capsys, "predict", "--model", model, "--features", "0.21,0.18,0.15,0.12")
        assert code == 0
        assert np.isfinite(float(out.strip()))

        report = tmp_path / "eval.json"
        code, out, _ = run(capsys, "evaluate", "--model", model, "--data", small_calib, "--out", report)
        assert code == 0 and "within +/-1.50 N" in out
        rep = json.loads(report.read_text())
        assert rep["rows"] == 18
        assert set(rep["tolerance"]["pct_within"]) == {"0.5", "1.0", "1.5"}

    def test_location_pipeline(self, tmp_path, capsys, small_calib):
        model = tmp_path / "loc.json"
        assert run(capsys, "train", "--data", small_calib, "--task", "location", "--kind", "knn-weighted",
                   "--out", model)[0] == 0
        code, out, _ = run(capsys, "evaluate", "--model", model, "--data", small_calib, "--out", tmp_path / "e.json")
        assert code == 0 and "/6" in out
        preds = tmp_path / "p.csv"
        assert run(capsys, "predict", "--model", model, "--data", small_calib, "--out", preds)[0] == 0
        lines = preds.read_text().splitlines()
        assert lines[0] == "location" and len(lines) == 181 and set(lines[1:]) <= {"A", "B", "C"}

    def test_predict_from_feature_csv(self, tmp_path, capsys, small_calib):
        model = tmp_path / "m.json"
        run(capsys, "train", "--data", small_calib, "--task", "force", "--kind", "linear-ols", "--out", model)
        wav, feats = tmp_path / "r.wav", tmp_path / "f.csv"
        run(capsys, "synth", "--dur", 0.3, "--out", wav)
        run(capsys, "featurize", "--in", wav, "--out", feats)
        code, out, _ = run(capsys, "predict", "--model", model, "--data", feats)
        assert code == 0 and len(out.split()) == 3

    def test_task_mismatch_and_usage(self, tmp_path, capsys, small_calib):
        model = tmp_path / "m.json"
        run(capsys, "train", "--data", small_calib, "--task", "force", "--kind", "tree-coarse", "--out", model)
        assert run(capsys, "predict", "--model", model)[0] == 2
        code, _, err = run(capsys, "train", "--data", small_calib, "--task", "force", "--kind", "knn-fine",
                           "--out", tmp_path / "x.json")
        assert code == 2 and "knn-fine" in err
        assert run(capsys, "train", "--data", small_calib, "--task", "pressure", "--kind", "tree-fine",
                   "--out", tmp_path / "x.json")[0] == 2
        assert run(capsys, "train", "--data", small_calib, "--task", "force", "--kind", "tree-fine",
                   "--holdout-frac", "1.5", "--out", tmp_path / "x.json")[0] == 2

    def test_domain_and_io_errors(self, tmp_path, capsys):
        code, _, err = run(capsys, "predict", "--model", tmp_path / "absent.json", "--features", "0.1,0.1,0.1,0.1")
        assert code == 1 and "IoError" in err
        broken = tmp_path / "broken.json"
        broken.write_text('{"format_version": 9}')
        code, _, err = run(capsys, "predict", "--model", broken, "--features", "0.1,0.1,0.1,0.1")
        assert code == 1 and "VersionMismatch" in err
        csv = tmp_path / "bad.csv"
        csv.write_text("skin_id,location\n")
        code, _, err = run(capsys, "train", "--data", csv, "--task", "force", "--kind", "linear-ols",
                           "--out", tmp_path / "m.json")
        assert code == 1 and "MalformedCsv" in err


class TestSelect:
    def test_table_rows(self, tmp_path, capsys, small_calib):
        table = tmp_path / "table.csv"
        code, out, _ = run(capsys, "select", "--data", small_calib, "--task", "force",
                           "--models", "linear-ols,tree-coarse,tree-fine", "--folds", 5, "--out", table)
        assert code == 0 and "selected: " in out
        lines = table.read_text().splitlines()
        assert lines[0] == "spec,mean_score,fold_1,fold_2,fold_3,fold_4,fold_5"
        names = [line.split(",")[0] for line in lines[1:]]
        placeholders = [r for r in COMPARISON_TABLES[FORCE] if not r.implemented]
        assert len(names) == 3 + len(placeholders)
        assert {"linear-ols", "tree-coarse", "tree-fine"} <= set(names)
        assert sum(",not implemented," in line for line in lines) == len(placeholders)

    def test_full_registry_row_set(self, tmp_path, capsys, small_calib):
        table = tmp_path / "t.csv"
        assert run(capsys, "select", "--data", small_calib, "--task", "location", "--folds", 3, "--jobs", 2,
                   "--out", table)[0] == 0
        rows = COMPARISON_TABLES["location-classification"]
        names = [line.split(",")[0] for line in table.read_text().splitlines()[1:]]
        assert len(names) == len(rows)
        assert [n for n, r in zip(names, rows) if r.implemented] == [r.preset for r in rows if r.implemented]


class TestReport:
    def test_noiseless_polylines_monotone(self, tmp_path, capsys, noiseless_profile):
        calib = tmp_path / "flat.csv"
        run(capsys, "simulate", "--profile", noiseless_profile, "--levels", 34, "--per-level", 2, "--out", calib)
        out_dir = tmp_path / "rep"
        assert run(capsys, "report", "--data", calib, "--out-dir", out_dir)[0] == 0
        svgs = sorted(out_dir.glob("*.svg"))
        assert [p.name for p in svgs] == [f"amplitude_{f}hz.svg" for f in (300, 500, 700, 900)]
        for svg in svgs:
            lines = re.findall(r'<polyline data-series="location ([ABC])"[^>]* points="([^"]+)"', svg.read_text())
            assert [label for label, _ in lines] == ["A", "B", "C"]
            for _, points in lines:
                xy = np.array([[float(v) for v in p.split(",")] for p in points.split()])
                assert len(xy) == 34
                assert np.all(np.diff(xy[:, 0]) > 0)
                dy = np.diff(xy[:, 1])
                assert np.all(dy > 0) or np.all(dy < 0)

    def test_deterministic_bytes_and_tolerance_chart(self, tmp_path, capsys, small_calib):
        model, rep = tmp_path / "m.json", tmp_path / "e.json"
        run(capsys, "train", "--data", small_calib, "--task", "force", "--kind", "tree-fine", "--out", model)
        run(capsys, "evaluate", "--model", model, "--data", small_calib, "--out", rep)
        outputs = []
        for name in ("r1", "r2"):
            assert run(capsys, "report", "--data", small_calib, "--evaluation", rep, "--out-dir", tmp_path / name)[0] == 0
            outputs.append({p.name: p.read_bytes() for p in (tmp_path / name).iterdir() if p.suffix in (".svg", ".csv")})
        assert outputs[0] == outputs[1]
        assert "tolerance_bands.svg" in outputs[0]
        assert outputs[0]["tolerance_bands.svg"].count(b"<rect data-category") == 3

    def test_empty_dataset(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text(",".join(CSV_COLUMNS) + "\n")
        code, _, err = run(capsys, "report", "--data", empty, "--out-dir", tmp_path / "r")
        assert code == 1 and "EmptyInput" in err


class TestRunMeta:
    def test_sidecar_replays_byte_identically(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("AST_SEED", "99")
        out = tmp_path / "calib.csv"
        run(capsys, "simulate", "--profile", "ast3a", "--levels", 4, "--per-level", 3, "--out", out)
        meta = json.loads((tmp_path / "calib.csv.run_meta.json").read_text())
        assert meta["seed"] == 99 and meta["subcommand"] == "simulate"
        assert set(meta["versions"]) >= {"astskin", "numpy", "scipy", "python"}
        first = out.read_bytes()
        out.unlink()
        monkeypatch.delenv("AST_SEED")
        assert cli.main(meta["argv"]) == 0
        assert out.read_bytes() == first
        assert meta["outputs"][str(out)] == cli.sha256_file(out)

    def test_input_hashes_recorded(self, tmp_path, capsys, small_calib):
        model = tmp_path / "m.json"
        run(capsys, "train", "--data", small_calib, "--task", "force", "--kind", "linear-ols", "--out", model)
        meta = json.loads((tmp_path / "m.json.run_meta.json").read_text())
        assert meta["inputs"] == {str(small_calib): cli.sha256_file(small_calib)}


class TestHelp:
    def test_every_flag_is_listed(self, capsys):
        parser = cli.build_parser()
        sub = next(a for a in parser._actions if a.dest == "command")
        source = Path(cli.__file__).read_text()
        consumed = set(re.findall(r"args\.([a-z_]+)", source)) - {"command"}
        registered = set()
        for name, subparser in sub.choices.items():
            assert cli.main([name, "--help"]) == 0
            text = capsys.readouterr().out
            for action in subparser._actions:
                for flag in action.option_strings:
                    assert flag in text, (name, flag)
                registered.add(action.dest)
        assert consumed <= registered

    def test_top_level_help_lists_commands(self, capsys):
        assert cli.main(["--help"]) == 0
        text = capsys.readouterr().out
        for name in ("synth", "featurize", "simulate", "train", "select", "predict", "evaluate", "report"):
            assert name in text
        assert cli.main([]) == 2

    def test_defaults_match_geometry(self):
        args = cli.build_parser().parse_args(["featurize", "--in", "a.wav", "--out", "b.csv"])
        assert args.frame == DEFAULT_FRAME_LEN and args.hop is None and args.seed == 7
