import json
import math
import subprocess
import sys

import pytest

from shift2d.atlas_cli import CSV_HEADER, main
from shift2d.shift_model import build_ex216, save_weights


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


# ------------------------------------------------------------- classify

def test_classify_subnormal_point(capsys):
    rc, out, _ = run(capsys, "classify", "--a", "0.5", "--x", "0.5",
                     "--y", "0.6")
    assert rc == 0
    assert "label: SUBNORMAL" in out
    assert out.count("PASS") == 4


def test_classify_out_of_class_exits_2(capsys):
    rc, _, err = run(capsys, "classify", "--a", "0.9", "--x", "0.5",
                     "--y", "0.9")
    assert rc == 2
    assert "a*y" in err and ">=" in err


def test_classify_direct_matches_closed_form_label(capsys):
    rc, out_cf, _ = run(capsys, "classify", "--a", "0.5", "--x", "0.55",
                        "--y", "0.97")
    rc2, out_dir, _ = run(capsys, "classify", "--a", "0.5", "--x", "0.55",
                          "--y", "0.97", "--method", "direct")
    assert rc == 0 and rc2 == 0
    label_cf = next(l for l in out_cf.splitlines() if l.startswith("label:"))
    label_dir = next(l for l in out_dir.splitlines() if l.startswith("label:"))
    assert label_cf == label_dir


def test_classify_json_payload(capsys):
    rc, out, _ = run(capsys, "classify", "--a", "0.5", "--x", "0.55",
                     "--y", "0.98", "--json")
    assert rc == 0
    payload = json.loads(out)
    assert payload["label"] == "HYPO_NOT_SUB"
    assert payload["verdicts"] == {
        "subnormal": False, "hyponormal": True,
        "semi-hyponormal": True, "weakly-hyponormal": True,
    }
    assert set(payload["margins"]) == {"sub", "hypo", "sh", "wh"}
    assert payload["boundary"] is False


# ---------------------------------------------------------------- atlas

def read_rows(path):
    lines = path.read_text(encoding="ascii").splitlines()
    assert lines[0] == CSV_HEADER
    return [line.split(",") for line in lines[1:]]


def test_atlas_corners_run(tmp_path, capsys):
    out = tmp_path / "t.csv"
    rc, text, _ = run(capsys, "atlas", "--nx", "2", "--ny", "2",
                      "--out", str(out))
    assert rc == 0
    assert "wrote 4 rows" in text
    rows = read_rows(out)
    assert len(rows) == 4
    # row-major in (x, y): x varies slowest
    xs = [r[1] for r in rows]
    assert xs[0] == xs[1] and xs[2] == xs[3] and xs[0] != xs[2]


def test_atlas_csv_is_byte_identical_across_runs(tmp_path, capsys):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ("atlas", "--nx", "25", "--ny", "20")
    assert run(capsys, *args, "--out", str(p1))[0] == 0
    assert run(capsys, *args, "--out", str(p2))[0] == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_atlas_numbers_use_17_digit_format(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert run(capsys, "atlas", "--nx", "6", "--ny", "5",
               "--out", str(out))[0] == 0
    for row in read_rows(out):
        for field in row[:3] + row[4:8]:
            v = float(field)  # parses locale-independently
            if not math.isnan(v):
                assert "%.17g" % v == field
        assert row[8] in ("0", "1")
        assert row[9] == "closed-form"


def test_atlas_out_rows_have_nan_margins(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert run(capsys, "atlas", "--nx", "30", "--ny", "12",
               "--out", str(out))[0] == 0
    rows = read_rows(out)
    outs = [r for r in rows if r[3] == "OUT"]
    ins = [r for r in rows if r[3] != "OUT"]
    assert outs and ins
    for r in outs:
        assert all(f == "nan" for f in r[4:8])
        # OUT rows are exactly the cells with a*y >= x
        assert float(r[0]) * float(r[2]) >= float(r[1])
    for r in ins:
        assert all(not math.isnan(float(f)) for f in r[4:8])


def test_atlas_svg_written_and_deterministic(tmp_path, capsys):
    c1, s1 = tmp_path / "a.csv", tmp_path / "a.svg"
    c2, s2 = tmp_path / "b.csv", tmp_path / "b.svg"
    args = ("atlas", "--nx", "20", "--ny", "16")
    assert run(capsys, *args, "--out", str(c1), "--svg", str(s1))[0] == 0
    assert run(capsys, *args, "--out", str(c2), "--svg", str(s2))[0] == 0
    blob = s1.read_text(encoding="utf-8")
    assert blob.lstrip().startswith("<?xml")
    assert "</svg>" in blob
    assert s1.read_bytes() == s2.read_bytes()


def test_atlas_direct_disagrees_only_on_boundary_rows(tmp_path, capsys):
    cf, dr = tmp_path / "cf.csv", tmp_path / "dr.csv"
    args = ("atlas", "--nx", "24", "--ny", "20")
    assert run(capsys, *args, "--out", str(cf))[0] == 0
    assert run(capsys, *args, "--out", str(dr), "--method", "direct")[0] == 0
    for r_cf, r_dr in zip(read_rows(cf), read_rows(dr)):
        assert r_cf[:3] == r_dr[:3]
        if r_cf[8] == "0":  # not boundary-flagged
            assert r_cf[3] == r_dr[3], r_cf[:3]
        assert r_dr[9] == "direct"
        # margins identical: they always come from the closed forms
        assert r_cf[4:9] == r_dr[4:9]


def test_atlas_rejects_bad_window_and_grid(tmp_path, capsys):
    out = str(tmp_path / "t.csv")
    assert run(capsys, "atlas", "--xmin", "0.9", "--xmax", "0.2",
               "--out", out)[0] == 2
    assert run(capsys, "atlas", "--ymax", "1.5", "--out", out)[0] == 2
    assert run(capsys, "atlas", "--nx", "1", "--out", out)[0] == 2
    assert run(capsys, "atlas", "--a", "1.5", "--out", out)[0] == 2


def test_atlas_unwritable_path_exits_4(tmp_path, capsys):
    rc, _, err = run(capsys, "atlas", "--nx", "2", "--ny", "2",
                     "--out", str(tmp_path / "no" / "dir" / "t.csv"))
    assert rc == 4
    assert "error:" in err


# ---------------------------------------------------------------- check

def check_json(capsys, *argv):
    rc, out, err = run(capsys, "check", *argv, "--json")
    assert rc == 0, err
    payload = json.loads(out)
    return {r["test"]: r for r in payload["rows"]}, payload


def test_check_helton_howe_all_pass(capsys):
    rows, payload = check_json(capsys, "--named", "helton-howe")
    assert len(rows) == 8
    assert all(r["verdict"] == "pass" for r in rows.values())
    assert payload["tail"] == "constant"


def test_check_drury_arveson_needs_cap(capsys):
    rc, _, err = run(capsys, "check", "--named", "drury-arveson")
    assert rc == 2
    assert "cap" in err


def test_check_drury_arveson_semi_hypo_witness(capsys):
    rows, _ = check_json(capsys, "--named", "drury-arveson", "--ncap", "6")
    semi = rows["semi-hypo"]
    assert semi["verdict"] == "fail"
    assert semi["witness"]["level"] == 1
    assert semi["witness"]["det"] == pytest.approx(-0.1339745962155613,
                                                   abs=1e-12)
    # componentwise subnormal but jointly not even hyponormal
    assert rows["hyponormal-6pt"]["verdict"] == "fail"
    assert rows["weak-hypo"]["verdict"] == "inconclusive"


def test_check_ex216_semi_pass_hypo_fail(capsys):
    rows, _ = check_json(capsys, "--named", "ex216:1.05,1.05")
    assert rows["semi-hypo"]["verdict"] == "pass"
    assert rows["hyponormal-6pt"]["verdict"] == "fail"


def test_check_ex215_l_positivity_witness(capsys):
    rows, _ = check_json(capsys, "--named", "ex215:0.5,0.8")
    lp = rows["L-positive"]
    assert lp["verdict"] == "fail"
    assert lp["witness"]["k"] == [0, 1]
    assert lp["witness"]["pair"] == [pytest.approx(0.16),
                                     pytest.approx(0.0625)]


def test_check_weights_file_roundtrip(tmp_path, capsys):
    path = tmp_path / "d.json"
    save_weights(build_ex216(1.05, 1.05), str(path))
    rows, payload = check_json(capsys, "--weights", str(path))
    assert rows["semi-hypo"]["verdict"] == "pass"
    assert rows["hyponormal-6pt"]["verdict"] == "fail"


def test_check_embed_file(tmp_path, capsys):
    path = tmp_path / "e.json"
    path.write_text(json.dumps({"omega": [0.7, 0.8, 0.9, 1.0],
                                "eta": [0.35, 0.4, 0.45, 0.5]}))
    rows, _ = check_json(capsys, "--named", f"embed:{path}")
    assert rows["validate"]["verdict"] == "pass"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"omega": [0.7, 0.8], "eta": [0.35, 0.3]}))
    rc, _, err = run(capsys, "check", "--named", f"embed:{bad}")
    assert rc == 2
    assert "not proportional" in err


def test_check_bad_inputs(tmp_path, capsys):
    assert run(capsys, "check", "--named", "nosuch")[0] == 2
    assert run(capsys, "check", "--named", "ex216:oops")[0] == 2
    assert run(capsys, "check", "--named", "axy:0.5,0.5")[0] == 2
    assert run(capsys, "check",
               "--weights", str(tmp_path / "missing.json"))[0] == 4
    mangled = tmp_path / "m.json"
    mangled.write_text("{not json")
    assert run(capsys, "check", "--weights", str(mangled))[0] == 2


# ---------------------------------------------------------------- sqrt2

def test_sqrt2_golden_matrix(capsys):
    rc, out, _ = run(capsys, "sqrt2", "--m", "1", "0.5", "1")
    assert rc == 0
    root = math.sqrt(2.0 + math.sqrt(3.0))
    assert "%.17g" % ((1.0 + math.sqrt(3.0) / 2.0) / root) in out
    assert "%.17g" % (0.5 / root) in out


def test_sqrt2_identity(capsys):
    rc, out, _ = run(capsys, "sqrt2", "--m", "1", "0", "1")
    assert rc == 0
    assert "[[1, 0], [0, 1]]" in out


def test_sqrt2_indefinite_exits_3(capsys):
    rc, _, err = run(capsys, "sqrt2", "--m", "1", "2", "1")
    assert rc == 3
    assert "not PSD" in err


def test_sqrt2_rejects_non_finite(capsys):
    rc, _, err = run(capsys, "sqrt2", "--m", "1", "nan", "1")
    assert rc == 2
    assert "finite" in err


# ----------------------------------------------------------- environment

def test_tol_env_override(capsys, monkeypatch):
    # slightly indefinite: rejected at the default band, accepted loose
    argv = ("sqrt2", "--m", "1", "1.0000001", "1")
    monkeypatch.delenv("SHIFT2D_TOL", raising=False)
    assert run(capsys, *argv)[0] == 3
    monkeypatch.setenv("SHIFT2D_TOL", "1e-3")
    assert run(capsys, *argv)[0] == 0
    monkeypatch.setenv("SHIFT2D_TOL", "bogus")
    rc, _, err = run(capsys, *argv)
    assert rc == 2
    assert "SHIFT2D_TOL" in err


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "shift2d.atlas_cli", "classify",
         "--a", "0.5", "--x", "0.5", "--y", "0.6"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert "SUBNORMAL" in proc.stdout
