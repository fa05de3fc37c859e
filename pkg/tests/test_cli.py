import math
from pathlib import Path

import pytest

from xpulse.cli import EXIT_FAIL, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from xpulse.csvio import read_manifest, read_slice, read_table


def files(d: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def rerun_identical(tmp_path, out, threads=4):
    again = tmp_path / (out.name + "_rerun")
    assert main(["rerun", str(out / "manifest.txt"), "--out", str(again), "--threads", str(threads)]) in (EXIT_OK, EXIT_FAIL)
    assert files(again) == files(out)


def test_field_example(tmp_path):
    out = tmp_path / "f"
    argv = ["field", "--eta", "0.7853981634", "--T", "1", "--spectrum", "rect:1", "--plane", "z,t", "--rho", "0", "--out", str(out)]
    assert main(argv) == EXIT_OK
    sl = read_slice(out / "field_slice.csv")
    assert sl.plan.axis1.name == "z" and sl.plan.axis2.name == "t"
    i = 10  # z = T / cos(eta), t = T
    assert sl.plan.axis1.values()[i] == pytest.approx(math.sqrt(2), abs=1e-9)
    assert sl.plan.axis2.values()[i] == 1.0
    assert abs(sl.values[i, i] - 1.0) < 1e-9
    m = read_manifest(out / "manifest.txt")
    assert m["outputs"] == ["field_slice.csv"] and m["subcommand"] == "field"
    # repeat run is byte-identical
    out2 = tmp_path / "f2"
    assert main(argv[:-1] + [str(out2)]) == EXIT_OK
    assert files(out) == files(out2)
    rerun_identical(tmp_path, out)


def test_field_outside_support_all_zero(tmp_path):
    out = tmp_path / "o"
    assert main(["field", "--plane", "t,rho", "--z", "0", "--range1", "5:0.5:4", "--out", str(out)]) == EXIT_OK
    assert not read_slice(out / "field_slice.csv").values.any()


def test_field_em_and_degrees(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["field", "--em", "--eta-deg", "45", "--plane", "rho,z", "--t", "1", "--out", str(a)]) == EXIT_OK
    assert main(["field", "--em", "--eta", repr(math.radians(45)), "--plane", "rho,z", "--t", "1", "--out", str(b)]) == EXIT_OK
    assert files(a) == files(b)
    assert read_slice(a / "em_slice.csv").values.shape == (3, 21, 21)


@pytest.mark.parametrize(
    "argv",
    [
        ["field", "--eta", "1", "--eta-deg", "30"],
        ["field", "--plane", "z,z"],
        ["field", "--plane", "z,t", "--z", "1"],
        ["field", "--spectrum", "saw:1"],
        ["field", "--eta", "2"],
        ["field", "--range1", "0:1"],
        ["energy", "--rho-max", "-1"],
        ["peak", "--times", "0.5,2"],
        ["fdtd", "--config", "/does/not/exist"],
        ["verify", "--threads", "0"],
        ["bogus"],
    ],
)
def test_usage_errors(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path / "u")]) == EXIT_USAGE


def test_energy_and_gap_threshold(tmp_path):
    out = tmp_path / "e"
    assert main(["energy", "--kind", "em", "--out", str(out)]) == EXIT_OK
    cols, rows = read_table(out / "energy.csv")
    assert cols[:4] == ["kind", "analytic", "numeric", "relative_gap"]
    assert float(rows[0][3]) < 0.02
    assert main(["energy", "--kind", "em", "--max-gap", "1e-9", "--out", str(tmp_path / "e2")]) == EXIT_FAIL
    rerun_identical(tmp_path, out)


def test_energy_numerical_failure(tmp_path):
    assert main(["energy", "--kind", "scalar", "--rho-max", "20", "--out", str(tmp_path / "n")]) == EXIT_NUMERIC


def test_verify(tmp_path, capsys):
    out = tmp_path / "v"
    assert main(["verify", "--spectrum", "gauss:2,0.5,0.5,3.5", "--out", str(out)]) == EXIT_OK
    assert "FAIL" not in capsys.readouterr().out
    cols, rows = read_table(out / "suite.csv")
    assert all(r[1] == "True" for r in rows)
    assert (out / "residuals.csv").exists()
    rerun_identical(tmp_path, out)


def test_boost(tmp_path):
    out = tmp_path / "b"
    assert main(["boost", "--points", "200", "--out", str(out)]) == EXIT_OK
    _, rows = read_table(out / "boost_checks.csv")
    assert {r[0] for r in rows} >= {"boost_consistency", "z_independence", "mixed_boundary", "cylinder_linearity"}
    sl = read_slice(out / "boost_slice.csv")
    assert sl.meta["frame"] == "comoving"
    rerun_identical(tmp_path, out)


@pytest.mark.parametrize("eta,expected", [("0.7853981633974483", 1.41421), ("1.0471975511965976", 2.0)])
def test_peak(tmp_path, eta, expected):
    out = tmp_path / "p"
    assert main(["peak", "--eta", eta, "--out", str(out)]) == EXIT_OK
    _, rows = read_table(out / "peak.csv")
    v, length, ideal, dz = float(rows[0][1]), float(rows[0][3]), float(rows[0][4]), float(rows[0][5])
    assert v == pytest.approx(expected, rel=0.01)
    assert abs(length - ideal) <= dz
    rerun_identical(tmp_path, out)


def test_fdtd_runs_and_reruns(tmp_path):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("T=8.0\naperture_radius=12.0\nrho_dom=20.0\nz_dom=36.0\ntotal_time=30.0\ndetectors=0.0,7.2;2.0,10.0\n")
    out = tmp_path / "d"
    assert main(["fdtd", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    cols, rows = read_table(out / "summary.csv")
    assert cols == ["detector", "front_arrival", "peak_arrival", "apparent_speed"]
    assert len(rows) == 2
    assert read_table(out / "trace_0.csv")[0] == ["t", "value"]
    rerun_identical(tmp_path, out, threads=2)


def test_fdtd_cone_mode(tmp_path):
    cfg = tmp_path / "bump.cfg"
    cfg.write_text("mode=cauchy-bump\nrho_dom=6\nz_dom=12\ntotal_time=2.0\ndetectors=\n")
    out = tmp_path / "c"
    assert main(["fdtd", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    _, rows = read_table(out / "cone.csv")
    assert float(rows[0][1]) == 0.0 and all(float(r[1]) < 1e-8 for r in rows)


def test_rerun_rejects_tampered_manifest(tmp_path):
    out = tmp_path / "p"
    assert main(["peak", "--out", str(out)]) == EXIT_OK
    m = out / "manifest.txt"
    m.write_text(m.read_text().replace("param.dz=0.01", "param.dz=0.02"))
    assert main(["rerun", str(m), "--out", str(tmp_path / "r")]) == EXIT_USAGE
