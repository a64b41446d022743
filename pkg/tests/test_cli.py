import io
import json
from pathlib import Path

import pytest

from isocrystals.cli import run

DEMO = Path(__file__).resolve().parent.parent / "demos" / "instances"


def call(*argv):
    buf = io.StringIO()
    code = run([str(a) for a in argv], buf)
    return code, buf.getvalue()


def test_newton_and_polygon():
    code, out = call("newton", "--iso", DEMO / "e_half.json")
    assert code == 0 and "1/2" in out


def test_dominates_exit_codes():
    assert call("dominates", "1,0", "1/2,1/2")[0] == 0
    assert call("dominates", "0,0", "1/2,1/2")[0] == 1
    assert call("dominates", "1,0,0", "1/2,1/2")[0] == 1
    assert call("dominates", "1,x", "0,0")[0] == 3


def test_wa_check_rank_one():
    iso = DEMO / "rank_one.json"
    assert call("wa-check", "--iso", iso, "--filt", DEMO / "rank_one_filt_1.json")[0] == 0
    assert call("wa-check", "--iso", iso, "--filt", DEMO / "rank_one_filt_0.json")[0] == 1


def test_wa_check_rational_counterexample_names_witness():
    code, out = call("wa-check", "--iso", DEMO / "trivial_plane.json",
                     "--filt", DEMO / "trivial_plane_rational_filt.json")
    assert code == 1 and "witness" in out


def test_wa_check_non_rational_line():
    code, _ = call("wa-check", "--iso", DEMO / "trivial_plane_r2.json",
                   "--filt", DEMO / "trivial_plane_r2_filt.json")
    assert code == 0


def test_reports_are_reproducible():
    args = ("--json", "build-lattice", "--iso", DEMO / "e_half.json", "--mu", "1,0", "--seed", "4")
    first, second = call(*args), call(*args)
    assert first == second and first[0] == 0
    doc = json.loads(first[1])
    assert doc["exit_code"] == 0


def test_build_lattice_refuses_non_dominating():
    assert call("build-lattice", "--iso", DEMO / "e_half.json", "--mu", "0,0")[0] == 1


def test_hn_and_strata():
    code, out = call("hn", "--iso", DEMO / "trivial_plane.json",
                     "--filt", DEMO / "trivial_plane_rational_filt.json")
    assert code == 0 and "-1" in out
    code, out = call("strata-sample", "--iso", DEMO / "trivial_plane.json", "--mu", "1,-1",
                     "--trials", 5, "--format", "csv")
    assert code == 0 and out.count("\n") >= 2


def test_generate_is_deterministic(tmp_path):
    out = tmp_path / "inst.json"
    a = call("generate", "filtration", "--d", 3, "--seed", 5)
    b = call("generate", "filtration", "--d", 3, "--seed", 5)
    assert a == b and a[0] == 0
    assert call("generate", "filtration", "--d", 3, "--seed", 5, "--out", out)[0] == 0
    code, _ = call("wa-check", "--iso", out, "--filt", out)
    assert code in (0, 1, 2)
    assert call("newton", "--iso", out)[0] == 0


def test_input_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call("newton", "--iso", bad)[0] == 3
    bad.write_text(json.dumps({"context": {"p": "2", "r": "1"}}))
    assert call("newton", "--iso", bad)[0] == 3
    assert call("newton", "--iso", tmp_path / "missing.json")[0] == 3
    assert call("no-such-command")[0] == 3
    assert call("wa-check", "--iso", DEMO / "e_half.json",
                "--filt", DEMO / "rank_one_filt_1.json")[0] == 3


def test_precision_from_environment(monkeypatch):
    monkeypatch.setenv("ISOCRYSTAL_PRECISION", "zz")
    assert call("newton", "--iso", DEMO / "e_half.json")[0] == 3
    monkeypatch.setenv("ISOCRYSTAL_PRECISION", "40")
    assert call("newton", "--iso", DEMO / "e_half.json")[0] == 0


def test_selftest_single_criterion():
    code, out = call("selftest", "--quick", "--only", 1)
    assert code == 0 and out.startswith("[PASS]  1.")
