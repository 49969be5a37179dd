import json
import os
import subprocess
import sys

import pytest

from blowup1d.cli import ConfigError, main, parse_config
from blowup1d.cli.checks import TOLERANCES


def test_minimal_verify_gets_defaults():
    cfg = parse_config("command=verify")
    r = cfg.resolved()
    assert r["command"] == "verify" and r["seed"] == 0 and r["tol_scale"] == 1.0
    assert r["params"] == {"criteria": [], "suite": "all"}


def test_holder_profile_line():
    cfg = parse_config("command=profile branch=holder n=3 terms=8 a=0.1")
    assert cfg.params["n"] == 3 and cfg.params["branch"] == "holder"
    assert cfg.params["a"] == (0.1,) and cfg.params["terms"] == 8


def test_alpha_is_a_unit_fraction():
    assert parse_config("command=profile alpha=1/4").params["n"] == 4
    assert parse_config("command=profile alpha=0.5").params["n"] == 2
    with pytest.raises(ConfigError, match=r"alpha.*1/n"):
        parse_config("command=profile alpha=0.4")


def test_sections_comments_and_tolerances():
    text = "# sweep\ncommand=sim\n[sim]\na=0.1,-0.2  # two runs\nmode_count=128\n[tolerances]\npde_fd=1e-3\n"
    cfg = parse_config(text)
    assert cfg.params["a"] == (0.1, -0.2) and cfg.params["mode_count"] == 128
    assert cfg.tolerances == {"pde_fd": 1e-3}


@pytest.mark.parametrize("text, pattern", [
    ("command=verify\n\nbogus=1", r"line 3.*'bogus'"),
    ("command=sim\nmode_count=many", r"line 2.*'mode_count'"),
    ("command=sim\nsafety=-1", r"line 2.*'safety'"),
    ("command=sim\n[cusp]\na=1", r"line 3.*\[cusp\]"),
    ("command=verify\n[tolerances]\nnope=1", r"line 3.*'nope'"),
    ("command=launch", r"line 1.*'command'"),
    ("[nowhere]", r"line 1.*nowhere"),
    ("seed=1", r"no command"),
    ("command=collapse t_max=1.2", r"t_max"),
    ("command=cusp a=2.5", r"a < 2"),
])
def test_config_errors_name_key_and_line(text, pattern):
    with pytest.raises(ConfigError, match=pattern):
        parse_config(text)


def test_command_line_overrides_file():
    cfg = parse_config("command=sim\nt_max=1", [(None, "t_max", "0.5", 0)])
    assert cfg.params["t_max"] == 0.5
    with pytest.raises(ConfigError, match="command line"):
        parse_config("command=sim", [(None, "t_max", "soon", 0)])


def test_exit_zero_and_manifest(tmp_path):
    out = tmp_path / "ok"
    assert main(["verify", "criteria=2,14", "--out", str(out)]) == 0
    m = json.loads((out / "manifest.json").read_text())
    assert m["status"] == "pass" and [c["id"] for c in m["checks"]] == [2, 14]
    assert "report.json" in m["files"]
    for c in m["checks"]:
        for p in c["parts"]:
            assert p["tolerance"] in TOLERANCES and p["threshold"] is not None
    assert set(m["versions"]) >= {"numpy", "scipy", "python", "blowup1d"}


def test_exit_one_on_a_failed_check(tmp_path, capsys):
    assert main(["verify", "criteria=2", "tolerances.cot_constant=1e-30", "--out", str(tmp_path)]) == 1
    assert capsys.readouterr().out.startswith("FAIL criterion  2")


def test_tol_scale_loosens_upper_tolerances_only(tmp_path):
    assert main(["verify", "criteria=2", "tolerances.cot_constant=1e-30", "--tol-scale", "1e30",
                 "--out", str(tmp_path)]) == 0


@pytest.mark.parametrize("argv", [["verify", "criteria=99"], ["verify", "bogus=1"],
                                  ["sim", "domain=circle", "initial=special"],
                                  ["report", "input=/nonexistent/dir"], ["verify", "garbage"]])
def test_exit_two_on_usage_errors(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_exit_two_on_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["verify", "criteria=2", "--out", str(blocker / "sub")]) == 2
    assert not (blocker.parent / "sub").exists()


def _json_files(root):
    out = {}
    for d, _, names in os.walk(root):
        for n in names:
            if n != "timing.txt":
                p = os.path.join(d, n)
                out[os.path.relpath(p, root)] = open(p, "rb").read()
    return out


def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["profile", "terms=4", "N=128", "points=21", "a=0.1,-0.1", "--out", str(d)]) == 0
    fa, fb = _json_files(a), _json_files(b)
    assert fa.keys() == fb.keys()
    for k in fa:
        if k == "manifest.json":
            ma, mb = json.loads(fa[k]), json.loads(fb[k])
            ma["config"].pop("out"), mb["config"].pop("out")
            assert ma == mb
        else:
            assert fa[k] == fb[k], k
    assert (a / "a=+0.1" / "profile.csv").exists()
    assert (a / "timing.txt").read_text().startswith("wall_clock_seconds")


def test_profile_outputs_plot_data(tmp_path):
    assert main(["profile", "terms=4", "N=128", "points=21", "--out", str(tmp_path)]) == 0
    dat = sorted(p.name for p in (tmp_path / "plotdata").glob("*.dat"))
    assert "profile_F.dat" in dat
    lines = (tmp_path / "plotdata" / "profile_F.dat").read_text().splitlines()
    assert lines[0].startswith("#") and len(lines[1].split()) == 2


def test_sim_and_report(tmp_path):
    run = tmp_path / "runs" / "sim"
    assert main(["sim", "mode_count=64", "t_max=0.3", "a=0", "--out", str(run)]) == 0
    assert (run / "history.csv").exists()
    rep = tmp_path / "rep"
    assert main(["report", f"input={tmp_path / 'runs'}", "--out", str(rep)]) == 0
    r = json.loads((rep / "report.json").read_text())
    assert r["failed_checks"] == 0 and r["runs"][0]["command"] == "sim"


def test_console_entry_point_help():
    p = subprocess.run([sys.executable, "-m", "blowup1d", "--help"], capture_output=True, text=True)
    assert p.returncode == 0 and "key=value" in p.stdout


def test_exit_three_on_numerical_breakdown(tmp_path, capsys):
    # too coarse a grid to meet the consistency condition of the right-hand side
    assert main(["profile", "terms=4", "N=64", "--out", str(tmp_path)]) == 3
    assert "BREAKDOWN" in capsys.readouterr().err
    assert json.loads((tmp_path / "manifest.json").read_text())["status"] == "breakdown"
