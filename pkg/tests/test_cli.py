import json
import subprocess
import sys

import numpy as np
import pytest
from PIL import Image

from stegograph.cli import main
from stegograph.files import load_image, save_png
from stegograph.image import RgbImage

from conftest import random_image


@pytest.fixture
def job(tmp_path, rng):
    covers, payloads = [], []
    for i in range(3):
        path = tmp_path / f"cover{i}.png"
        save_png(random_image(rng, 40, 50), path)
        covers.append(path)
    for i, shape in enumerate([(20, 22), (11, 13)]):
        path = tmp_path / f"secret{i}.png"
        save_png(random_image(rng, *shape), path)
        payloads.append(path)
    return tmp_path, covers, payloads


def encode_args(out, covers, payloads, *extra):
    args = ["encode", "--out", str(out), "--chunk-size", "128", *extra]
    for p in payloads:
        args += ["-p", str(p)]
    return args + [str(c) for c in covers]


def test_encode_decode_round_trip(job, capsys):
    root, covers, payloads = job
    assert main(encode_args(root / "st", covers, payloads)) == 0
    out = capsys.readouterr().out
    assert "utilization:" in out and "overhead" in out
    stegos = sorted((root / "st").glob("*.stego.png"))
    assert [s.name for s in stegos] == ["cover0.stego.png", "cover1.stego.png", "cover2.stego.png"]

    shuffled = [str(stegos[i]) for i in (2, 0, 1)]
    assert main(["decode", "--out", str(root / "dec"), *shuffled]) == 0
    for i, original in enumerate(payloads):
        assert load_image(root / "dec" / f"payload_{i}.png") == load_image(original)


def test_xor_key_round_trip(job):
    root, covers, payloads = job
    assert main(encode_args(root / "st", covers, payloads, "--xor-key", "c0ffee")) == 0
    stegos = [str(p) for p in sorted((root / "st").glob("*.stego.png"))]
    assert main(["decode", "--xor-key", "c0ffee", "--out", str(root / "ok"), *stegos]) == 0
    assert load_image(root / "ok" / "payload_0.png") == load_image(payloads[0])
    assert main(["decode", "--xor-key", "beef", "--out", str(root / "bad"), *stegos]) == 0
    assert load_image(root / "bad" / "payload_0.png") != load_image(payloads[0])


def test_rerun_is_idempotent_and_overwrite_is_explicit(job, rng, capsys):
    root, covers, payloads = job
    args = encode_args(root / "st", covers, payloads)
    assert main(args) == 0
    assert main(args) == 0
    save_png(random_image(rng, 20, 22), payloads[0])
    assert main(args) == 2
    assert "--overwrite" in capsys.readouterr().err
    assert main(args + ["--overwrite"]) == 0


def test_insufficient_capacity_writes_nothing(tmp_path, rng, capsys):
    save_png(random_image(rng, 5, 5), tmp_path / "small.png")
    save_png(random_image(rng, 30, 30), tmp_path / "big.png")
    code = main(["encode", "--out", str(tmp_path / "out"), "-p", str(tmp_path / "big.png"), str(tmp_path / "small.png")])
    assert code == 3
    assert "bits" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_missing_stego_image_exit_4(job, capsys):
    root, covers, payloads = job
    assert main(encode_args(root / "st", covers, payloads)) == 0
    first = root / "st" / "cover0.stego.png"
    assert main(["decode", "--out", str(root / "dec"), str(first)]) == 4
    err = capsys.readouterr().err
    assert "missing" in err and "positions" in err
    assert not (root / "dec").exists()


def test_no_stego_exit_5(job, capsys):
    _, covers, _ = job
    assert main(["decode", str(covers[0])]) == 5
    err = capsys.readouterr().err
    assert "skipped" in err


@pytest.mark.parametrize("mode, suffix", [("L", ".png"), ("RGBA", ".png"), ("RGB", ".jpg"), ("P", ".png")])
def test_unsupported_inputs_exit_2(tmp_path, mode, suffix):
    path = tmp_path / f"img{suffix}"
    Image.new(mode, (8, 8)).save(path)
    assert main(["capacity", str(path)]) == 2


def test_sixteen_bit_png_rejected(tmp_path):
    path = tmp_path / "deep.png"
    Image.fromarray(np.zeros((4, 4), np.uint16)).save(path)
    assert main(["capacity", str(path)]) == 2


def test_missing_and_garbage_files_exit_2(tmp_path):
    assert main(["capacity", str(tmp_path / "nope.png")]) == 2
    (tmp_path / "junk.png").write_bytes(b"\x89PNG\r\n\x1a\n garbage")
    assert main(["capacity", str(tmp_path / "junk.png")]) == 2


def test_usage_errors_exit_2(capsys):
    for argv in (["encode"], ["capacity", "--bits", "4", "x.png"], ["bogus"], ["decode", "--xor-key", "zz", "x.png"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2
    assert main(["analyze"]) == 2


def test_capacity_report(tmp_path, capsys):
    path = tmp_path / "mega.png"
    save_png(random_image(np.random.default_rng(0), 1000, 1000), path)
    assert main(["capacity", str(path), "--json-out", str(tmp_path / "cap.json")]) == 0
    out = capsys.readouterr().out
    assert "3000000 slots" in out and "750000 bytes" in out
    report = json.loads((tmp_path / "cap.json").read_text())
    assert report["total_slots"] == 3_000_000 and report["total_bytes"] == 750_000


def test_analyze_writes_csv_and_flags_constant_images(tmp_path, capsys):
    flat = tmp_path / "flat.png"
    save_png(RgbImage(np.full((6, 6, 3), 9, np.uint8)), flat)
    assert main(["analyze", "--out", str(tmp_path), "--json-out", str(tmp_path / "a.json"), str(flat)]) == 0
    assert "degenerate" in capsys.readouterr().out
    lines = (tmp_path / "flat.hist.csv").read_text().splitlines()
    assert len(lines) == 257 and lines[10] == "9,36,36,36,108"
    summary = json.loads((tmp_path / "a.json").read_text())["images"][0]
    assert summary["degenerate"] is True and summary["verdict"] == 0


def test_analyze_compare(job, capsys):
    root, covers, payloads = job
    assert main(encode_args(root / "st", covers, payloads, "--bits", "3")) == 0
    capsys.readouterr()
    stego = root / "st" / "cover0.stego.png"
    code = main(["analyze", "--bits", "3", "--compare", str(covers[0]), str(stego),
                 "--json-out", str(root / "cmp.json")])
    assert code == 0
    assert "bound 7" in capsys.readouterr().out
    cmp = json.loads((root / "cmp.json").read_text())["compare"]
    assert max(cmp["max_delta_red"], cmp["max_delta_green"], cmp["max_delta_blue"]) <= 7


def test_encode_json_summary(job):
    root, covers, payloads = job
    assert main(encode_args(root / "st", covers, payloads, "--json-out", str(root / "enc.json"))) == 0
    text = (root / "enc.json").read_text()
    summary = json.loads(text)
    assert summary["command"] == "encode"
    assert text == json.dumps(summary, separators=(",", ":"), ensure_ascii=False) + "\n"
    assert 0 < summary["utilization"] <= 1


def test_module_entry_point():
    result = subprocess.run([sys.executable, "-m", "stegograph", "--help"], capture_output=True, text=True)
    assert result.returncode == 0
    for command in ("encode", "decode", "capacity", "analyze"):
        assert command in result.stdout
