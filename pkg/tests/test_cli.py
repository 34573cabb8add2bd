import json
import os
import subprocess
import sys

import numpy as np
import pytest

from iedefect.cli import main
from iedefect.slabdata import GridShape, SlabRecording, write_slab


def _tree(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            p = os.path.join(dirpath, f)
            out[os.path.relpath(p, root)] = open(p, "rb").read()
    return out


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth") / "s7"
    assert main(["synth", "--rows", "9", "--cols", "28", "--seed", "7", "--out", str(d)]) == 0
    return d


def test_synth_writes_files_deterministically(synth_dir, tmp_path):
    assert sorted(os.listdir(synth_dir)) == ["defects.json", "slab.json"]
    assert main(["synth", "--seed", "7", "--out", str(tmp_path / "again")]) == 0
    assert _tree(synth_dir) == _tree(tmp_path / "again")


def test_synth_rows_zero_is_usage_error(tmp_path, capsys):
    assert main(["synth", "--rows", "0", "--out", str(tmp_path)]) == 1
    assert "--rows" in capsys.readouterr().err


def test_bad_flag_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--bogus"])
    assert exc.value.code == 1


def test_analyze_manifest(synth_dir, tmp_path):
    out = tmp_path / "a"
    assert main(["analyze", str(synth_dir / "slab.json"), "--out", str(out)]) == 0
    m = json.loads((out / "manifest.json").read_text())
    assert m["ranges"]["low"]["f_end_hz"] < m["ranges"]["high"]["f_start_hz"]
    assert m["config"]["exponent"] == 1.5 and m["config"]["multiplier"] == 1.5
    for name, info in m["artifacts"].items():
        assert (out / name).exists(), name


def test_default_flags_equal_explicit(synth_dir, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["analyze", str(synth_dir / "slab.json"), "--out", str(a)])
    main(["analyze", str(synth_dir / "slab.json"), "--out", str(b), "--exponent", "1.5", "--multiplier", "1.5"])
    assert _tree(a) == _tree(b)


def test_constant_slab_is_method_error(tmp_path, capsys):
    rec = SlabRecording("flat", GridShape(2, 3), 1000.0, np.ones((6, 64)))
    write_slab(rec, tmp_path / "flat.json")
    assert main(["analyze", str(tmp_path / "flat.json"), "--out", str(tmp_path / "o")]) == 3
    err = capsys.readouterr().err
    assert "degenerate distribution" in err and "flat" in err


def test_single_range_names_slab(tmp_path, capsys):
    t = np.arange(256) / 8000.0
    # nine consecutive on-bin tones fill every histogram bin
    samples = np.array([np.sin(2 * np.pi * (k * 31.25) * t) for k in range(32, 41)])
    write_slab(SlabRecording("narrow", GridShape(3, 3), 8000.0, samples), tmp_path / "n.json")
    assert main(["analyze", str(tmp_path / "n.json"), "--out", str(tmp_path / "o")]) == 3
    err = capsys.readouterr().err
    assert "no frequency separation" in err and "narrow" in err


def test_evaluate_zero_noise(synth_dir, tmp_path):
    out = tmp_path / "a"
    main(["analyze", str(synth_dir / "slab.json"), "--out", str(out)])
    assert main(["evaluate", str(out), "--defects", str(synth_dir / "defects.json")]) == 0
    for kind in ("binary", "cluster"):
        m = json.loads((out / f"metrics_{kind}.json").read_text())
        assert m["f1"] == 1.0 and m["slab_id"] == "synth-7"
        c = m["confusion"]
        assert c["fp"] == 0 and c["fn"] == 0
    assert (out / "roc.csv").read_text().startswith("threshold_hz,fpr,tpr\n")


def test_evaluate_missing_mask_is_data_error(synth_dir, tmp_path):
    (tmp_path / "empty").mkdir()
    assert main(["evaluate", str(tmp_path / "empty"), "--defects", str(synth_dir / "defects.json")]) == 2


def test_pipeline_batch_with_partial_failure(tmp_path):
    dirs = []
    for seed in (1, 2):
        d = tmp_path / "in" / f"slab{seed}"
        main(["synth", "--seed", str(seed), "--out", str(d)])
        dirs.append(str(d))
    broken = tmp_path / "in" / "broken"
    broken.mkdir()
    (broken / "slab.json").write_text("{")
    (broken / "defects.json").write_text("{}")
    out = tmp_path / "out"
    code = main(["pipeline", dirs[0], str(broken), dirs[1], "--out", str(out)])
    assert code == 2
    summary = json.loads((out / "summary.json").read_text())
    assert [s["input"] for s in summary["slabs"]] == ["slab1", "slab2"]
    assert [f["input"] for f in summary["failures"]] == ["broken"]
    assert (out / "slab2" / "metrics_cluster.json").exists()


def test_pipeline_rerun_is_byte_identical(synth_dir, tmp_path):
    for name in ("r1", "r2"):
        assert main(["pipeline", str(synth_dir), "--out", str(tmp_path / name)]) == 0
    a, b = _tree(tmp_path / "r1"), _tree(tmp_path / "r2")
    assert a == b and len(a) > 15


def test_render(synth_dir, tmp_path):
    a = tmp_path / "a"
    main(["analyze", str(synth_dir / "slab.json"), "--out", str(a)])
    out = tmp_path / "r"
    assert main(["render", "--grid", str(a / "low_band_grid.csv"), "--mask", str(a / "binary_mask.csv"),
                 "--upscale", "2", "--smooth", "--out", str(out)]) == 0
    assert (out / "low_band_grid.ppm").read_bytes().startswith(b"P6\n56 18\n255\n")
    assert (out / "binary_mask.pgm").read_bytes().startswith(b"P5\n56 18\n255\n")
    assert main(["render", "--out", str(out)]) == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "iedefect", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for sub in ("synth", "analyze", "evaluate", "pipeline", "render"):
        assert sub in r.stdout
