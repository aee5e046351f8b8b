"""CLI subcommands: exit codes, file outputs, determinism."""

import io
import json
import subprocess

import numpy as np
import pytest
from PIL import Image

from strayeval import (
    BinaryMask,
    Measurement,
    decode_mask,
    encode_mask,
    measurements_to_jsonl,
)
from strayeval.cli import main


def _write_mask(path, bits):
    path.write_bytes(encode_mask(BinaryMask(np.array(bits, dtype=bool))))
    return str(path)


def _square_fixture(tmp_path):
    """Fragmented GT + a prediction covering the top half of the square."""
    bits = np.zeros((24, 24), dtype=bool)
    bits[4:20, 4:20] = True
    stripes = bits.copy()
    stripes[::6, :] = False
    pred = bits & (np.arange(24)[:, None] < 12)
    gt_path = _write_mask(tmp_path / "gt.png", stripes)
    pred_path = _write_mask(tmp_path / "pred.png", pred)
    return pred_path, gt_path


def test_label_empty_mask(tmp_path, capsys):
    mask_path = _write_mask(tmp_path / "m.png", np.zeros((6, 6)))
    assert main(["label", mask_path]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["region_count"] == 0
    assert doc["regions"] == []


def test_label_two_regions_and_16bit_png(tmp_path, capsys):
    bits = np.zeros((8, 8))
    bits[0, 0] = 1
    bits[5:7, 5:7] = 1
    mask_path = _write_mask(tmp_path / "m.png", bits)
    labels_path = tmp_path / "labels.png"
    out_path = tmp_path / "regions.json"
    code = main(
        ["label", mask_path, "--out-labels", str(labels_path), "--out", str(out_path)]
    )
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert [r["label"] for r in doc["regions"]] == [1, 2]
    assert doc["regions"][0]["area"] == 1
    assert doc["regions"][1]["area"] == 4
    arr = np.asarray(Image.open(io.BytesIO(labels_path.read_bytes())))
    assert arr.dtype == np.uint16 or arr.dtype == np.int32
    assert arr.max() == 2


def test_label_missing_file_exits_2(tmp_path, capsys):
    assert main(["label", str(tmp_path / "absent.png")]) == 2


def test_label_malformed_file_exits_3(tmp_path, capsys):
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"nonsense bytes")
    assert main(["label", str(bad)]) == 3


def test_smooth_round_trip(tmp_path):
    bits = np.zeros((20, 20))
    bits[5, 5] = 1
    bits[5, 12] = 1  # gap of 6, defaults bridge it
    mask_path = _write_mask(tmp_path / "m.png", bits)
    out_path = tmp_path / "smoothed.png"
    assert main(["smooth", mask_path, "--out", str(out_path)]) == 0
    out = decode_mask(out_path.read_bytes())
    assert out.bits[5, 5] and out.bits[5, 12] and out.bits[5, 8]


def test_eval_identical_masks(tmp_path, capsys):
    bits = np.zeros((10, 10))
    bits[2:5, 2:5] = 1
    a = _write_mask(tmp_path / "a.png", bits)
    b = _write_mask(tmp_path / "b.png", bits)
    assert main(["eval", a, b]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pixel"]["precision"] == 1.0
    assert doc["pixel"]["recall"] == 1.0
    assert doc["pixel"]["iou_fault"] == 1.0
    assert doc["artifact"]["pap"] == 1.0
    assert doc["artifact"]["par"] == 1.0
    assert doc["artifact"]["pamiou"] == 1.0
    assert doc["frame_id"] == "a"


def test_eval_dimension_mismatch_exits_4(tmp_path, capsys):
    a = _write_mask(tmp_path / "a.png", np.zeros((4, 6)))
    b = _write_mask(tmp_path / "b.png", np.zeros((5, 6)))
    assert main(["eval", a, b]) == 4
    err = capsys.readouterr().err
    assert "6x4" in err and "6x5" in err


def test_eval_smooth_flag_raises_par(tmp_path, capsys):
    pred_path, gt_path = _square_fixture(tmp_path)
    assert main(["eval", pred_path, gt_path]) == 0
    without = json.loads(capsys.readouterr().out)
    assert main(["eval", pred_path, gt_path, "--smooth"]) == 0
    with_smooth = json.loads(capsys.readouterr().out)
    assert with_smooth["artifact"]["par"] > without["artifact"]["par"]
    assert with_smooth["gt_was_smoothed"] is True
    assert without["gt_was_smoothed"] is False


def test_eval_batch_csv(tmp_path, capsys, monkeypatch):
    pred_dir = tmp_path / "pred"
    gt_dir = tmp_path / "gt"
    pred_dir.mkdir()
    gt_dir.mkdir()
    rng = np.random.default_rng(7)
    for i in range(4):
        bits = rng.random((12, 12)) < 0.3
        _write_mask(pred_dir / f"f{i}.png", bits)
        _write_mask(gt_dir / f"f{i}.png", rng.random((12, 12)) < 0.3)
    monkeypatch.setenv("STRAYEVAL_THREADS", "2")
    out_path = tmp_path / "summary.csv"
    code = main(["eval", str(pred_dir), str(gt_dir), "--batch", "--out", str(out_path)])
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert len(lines) == 1 + 4 + 1
    assert lines[1].split(",")[0] == "f0"
    assert lines[-1].split(",")[0] == "mean"


def test_eval_batch_missing_pair_exits_3(tmp_path):
    pred_dir = tmp_path / "pred"
    gt_dir = tmp_path / "gt"
    pred_dir.mkdir()
    gt_dir.mkdir()
    _write_mask(pred_dir / "only.png", np.zeros((4, 4)))
    assert main(["eval", str(pred_dir), str(gt_dir), "--batch"]) == 3


def test_bad_threads_env_exits_3(tmp_path, monkeypatch):
    pred_dir = tmp_path / "pred"
    gt_dir = tmp_path / "gt"
    pred_dir.mkdir()
    gt_dir.mkdir()
    _write_mask(pred_dir / "a.png", np.zeros((4, 4)))
    _write_mask(gt_dir / "a.png", np.zeros((4, 4)))
    monkeypatch.setenv("STRAYEVAL_THREADS", "many")
    assert main(["eval", str(pred_dir), str(gt_dir), "--batch"]) == 3


def _measurements_file(tmp_path, ms):
    path = tmp_path / "ms.jsonl"
    path.write_text(measurements_to_jsonl(ms))
    return str(path)


def test_pipeline_clean_frame(tmp_path, capsys):
    seg = _write_mask(tmp_path / "seg.png", np.zeros((8, 8)))
    ms = _measurements_file(
        tmp_path, [Measurement("a", (1, 1)), Measurement("b", (7, 7))]
    )
    assert main(["pipeline", seg, ms]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["frame_usable"] is True
    assert len(doc["accepted"]) == 2 and doc["rejected"] == []


def test_pipeline_saturated_frame_exits_10(tmp_path, capsys):
    seg = _write_mask(tmp_path / "seg.png", np.ones((8, 8)))
    ms = _measurements_file(tmp_path, [Measurement("a", (1, 1))])
    assert main(["pipeline", seg, ms]) == 10
    doc = json.loads(capsys.readouterr().out)
    assert doc["frame_usable"] is False
    assert doc["action"] == "TriggerFdir"
    assert doc["rejected"][0]["reason"] == "FrameUnusable"


def test_pipeline_invalid_pixel_measurement(tmp_path, capsys):
    bits = np.zeros((10, 10))
    bits[0, :5] = 1  # fraction 0.05
    seg = _write_mask(tmp_path / "seg.png", bits)
    ms = _measurements_file(
        tmp_path, [Measurement("hit", (0, 0)), Measurement("ok", (5, 5))]
    )
    assert main(["pipeline", seg, ms]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [m["id"] for m in doc["accepted"]] == ["ok"]
    assert doc["rejected"] == [{"id": "hit", "row": 0, "col": 0, "reason": "InvalidPixel"}]


def test_pipeline_malformed_measurements_exits_3(tmp_path, capsys):
    seg = _write_mask(tmp_path / "seg.png", np.zeros((4, 4)))
    bad = tmp_path / "ms.jsonl"
    bad.write_text("this is not json\n")
    assert main(["pipeline", seg, str(bad)]) == 3


def _gen_config(tmp_path):
    cfg = {
        "width": 64,
        "height": 64,
        "sun_center": [-20.0, -20.0],
        "flare_count": 2,
        "flare_axis_jitter": 0.05,
        "intensity_range": [150.0, 220.0],
        "background": {"kind": "flat", "level": 10.0},
        "gt_threshold": 20.0,
    }
    path = tmp_path / "scene.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def _dir_bytes(root):
    return {
        p.name: p.read_bytes() for p in sorted(root.iterdir()) if p.is_file()
    }


def test_gen_is_byte_deterministic(tmp_path):
    cfg = _gen_config(tmp_path)
    out1 = tmp_path / "d1"
    out2 = tmp_path / "d2"
    for out in (out1, out2):
        code = main(["gen", cfg, "--seed", "7", "--count", "3", "--out-dir", str(out)])
        assert code == 0
    assert _dir_bytes(out1) == _dir_bytes(out2)
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert len(manifest["frames"]) == 3
    assert [f["seed"] for f in manifest["frames"]] == [7, 8, 9]
    splits = [f["split"] for f in manifest["frames"]]
    assert splits.count("train") == 2 and splits.count("eval") == 1


def test_gen_count_zero(tmp_path):
    cfg = _gen_config(tmp_path)
    out = tmp_path / "empty"
    assert main(["gen", cfg, "--count", "0", "--out-dir", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["frames"] == []


def test_gen_refuses_nonempty_dir_without_force(tmp_path):
    cfg = _gen_config(tmp_path)
    out = tmp_path / "busy"
    out.mkdir()
    (out / "junk.txt").write_text("x")
    assert main(["gen", cfg, "--count", "1", "--out-dir", str(out)]) == 2
    assert main(["gen", cfg, "--count", "1", "--out-dir", str(out), "--force"]) == 0


def test_gen_bad_config_exits_3(tmp_path):
    bad = tmp_path / "cfg.json"
    bad.write_text('{"widht": 64}')
    assert main(["gen", str(bad), "--out-dir", str(tmp_path / "o")]) == 3
    bad.write_text("not json{")
    assert main(["gen", str(bad), "--out-dir", str(tmp_path / "o2")]) == 3


def test_gen_output_scores_perfect_against_itself(tmp_path, capsys):
    cfg = _gen_config(tmp_path)
    out = tmp_path / "ds"
    assert main(["gen", cfg, "--seed", "1", "--count", "1", "--out-dir", str(out)]) == 0
    gt = str(out / "frame_0000_gt.png")
    assert main(["eval", gt, gt]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pixel"]["iou_fault"] == 1.0
    assert doc["artifact"]["pamiou"] == 1.0


def test_usage_error_raises_system_exit():
    with pytest.raises(SystemExit):
        main(["eval"])  # missing required paths
    with pytest.raises(SystemExit):
        main(["no-such-command"])


def test_console_script_runs():
    result = subprocess.run(["strayeval", "--help"], capture_output=True, text=True)
    assert result.returncode == 0
    assert "label" in result.stdout and "pipeline" in result.stdout
