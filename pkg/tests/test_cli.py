import hashlib
import json

import pytest

from greenexp.cli import main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expand_listing(tmp_path, capsys):
    out = tmp_path / "o"
    code, text, _ = run(["expand", "--preset", "anisotropic-linear", "--y", "0,0", "--l", "1",
                         "--out", str(out)], capsys)
    assert code == 0
    phi1 = [ln for ln in text.splitlines() if ln.startswith("Φ₁")]
    assert phi1 and "1/(4π) · x1 · log r" in phi1[0]
    assert (out / "expansion.json").exists() and (out / "expansion.txt").exists()


def test_manifest_hashes(tmp_path, capsys):
    out = tmp_path / "o"
    run(["expand", "--preset", "diag-quadratic", "--y", "0.75,0", "--l", "2", "--out", str(out)],
        capsys)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["exit_status"] == 0
    for entry in manifest["files"]:
        data = (out / entry["file"]).read_bytes()
        assert hashlib.sha256(data).hexdigest() == entry["sha256"]


def test_outputs_byte_identical(tmp_path, capsys):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        run(["green", "--preset", "anisotropic-linear", "--y", "0.1,0", "--l", "1",
             "--grid", "65", "--out", str(d)], capsys)
    for name in ("green.csv", "regular.csv", "report.json", "manifest.json"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes(), name


def test_negative_order_is_usage_error(tmp_path, capsys):
    code, _, err = run(["expand", "--preset", "identity", "--y", "0,0", "--l", "-1",
                        "--out", str(tmp_path)], capsys)
    assert code == 2
    assert "usage:" in err


@pytest.mark.parametrize("args", [
    ["expand", "--y", "0,0"],
    ["expand", "--preset", "identity", "--y", "3,0"],
    ["green", "--preset", "identity", "--y", "0,0", "--grid", "9"],
    ["robin", "--preset", "identity", "--l", "0"],
    ["verify", "--suite", "nonsense"],
])
def test_config_errors_exit_2(args, tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(args + ["--out", str(tmp_path / "o")]))
    assert exc.value.code == 2


def test_bad_spec_file_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("K11 = 1\nK22 = 1 +\n")
    code, _, err = run(["expand", "--spec", str(cfg), "--y", "0,0", "--out", str(tmp_path)],
                       capsys)
    assert code == 2 and "line 2" in err


def test_argparse_rejects_unknown_backend(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["expand", "--preset", "identity", "--backend", "gpu"])
    assert exc.value.code == 2


def test_green_identity_report(tmp_path, capsys):
    out = tmp_path / "g"
    code, text, _ = run(["green", "--preset", "identity", "--y", "0.3,0", "--grid", "129",
                         "--out", str(out)], capsys)
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["images_oracle_max_relative_error"] < 1e-3
    assert report["schema_version"] == 1


def test_robin_command(tmp_path, capsys):
    out = tmp_path / "r"
    code, _, _ = run(["robin", "--preset", "identity", "--grid", "65", "--out", str(out)], capsys)
    assert code == 0
    lines = (out / "robin.csv").read_text().splitlines()
    assert lines[0] == "y1,y2,R" and len(lines) > 30


def test_selftest_passes(tmp_path, capsys):
    code, text, _ = run(["selftest", "--out", str(tmp_path / "s")], capsys)
    assert code == 0
    assert text.count("[PASS]") == 5


def test_spec_file_settings_used(tmp_path, capsys):
    cfg = tmp_path / "k.cfg"
    cfg.write_text("K11 = 1 + x1\nK22 = 1 + x1\ndomain = box -0.5:0.5 -0.5:0.5\n"
                   "y = 0, 0\nl = 1\n")
    code, text, _ = run(["expand", "--spec", str(cfg), "--out", str(tmp_path / "o")], capsys)
    assert code == 0 and "1/(4π) · x1 · log r" in text
