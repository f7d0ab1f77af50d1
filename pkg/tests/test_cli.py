import csv
import os

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from anisoperim import __version__
from anisoperim.cli import main
from anisoperim.fields import ScalarField
from anisoperim.geometry import ConvexCurve
from anisoperim.io import write_field


def _config(tmp_path, body, name="run.ini"):
    path = tmp_path / name
    path.write_text(body)
    return str(path)


def _summary_rows(outdir):
    with open(os.path.join(outdir, "summary.csv"), newline="") as fh:
        return list(csv.reader(fh))[1:]


def test_version_command(capsys):
    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip() == __version__


def test_presets_command(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    assert "radial-quadratic" in out
    assert "power3" in out
    assert "symmetrize" in out


def test_run_all_suites_and_artifacts(tmp_path, capsys):
    cfg = _config(tmp_path, """
[norm]
kind = ellipse
a = 1.0
b = 0.7

[field]
preset = radial-quadratic

[resolution]
h = 0.015625
levels = 32
refine = 1
radial_n = 256
""")
    out = str(tmp_path / "out")
    assert main(["run", cfg, "--out", out]) == 0
    text = capsys.readouterr().out
    assert "PASSED" in text and "FAIL" not in text
    rows = _summary_rows(out)
    assert rows and all(r[3] == "pass" for r in rows)
    for artifact in ("summary.csv", "steiner.csv", "hessian_routes.csv",
                     "reilly.csv", "profile.csv", "u_star.csv",
                     "u_diamond.csv", "lp.csv", "comparison.csv",
                     "v_sharp.csv", "profile.svg", "comparison.svg",
                     "overlay.svg"):
        assert os.path.exists(os.path.join(out, artifact)), artifact


def test_figures_can_be_disabled(tmp_path):
    cfg = _config(tmp_path, """
[field]
preset = radial-quadratic

[resolution]
h = 0.015625
levels = 16

[suites]
run = symmetrize

[output]
figures = no
""")
    out = str(tmp_path / "out")
    assert main(["run", cfg, "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "u_diamond.csv"))
    assert not any(name.endswith(".svg") for name in os.listdir(out))


def test_output_directory_from_config(tmp_path):
    out = tmp_path / "configured"
    cfg = _config(tmp_path, f"""
[suites]
run = identities

[output]
directory = {out}
figures = no
""")
    assert main(["run", cfg]) == 0
    assert (out / "summary.csv").exists()


def test_parallel_matches_serial(tmp_path):
    cfg = _config(tmp_path, """
[norm]
kind = power
p = 3

[field]
preset = rotated-quadratic

[resolution]
h = 0.015625
levels = 24
refine = 1

[suites]
run = identities curvature symmetrize

[output]
figures = no
""")
    serial = str(tmp_path / "serial")
    parallel = str(tmp_path / "parallel")
    assert main(["run", cfg, "--out", serial]) == 0
    assert main(["run", cfg, "--out", parallel, "--parallel"]) == 0
    with open(os.path.join(serial, "summary.csv"), "rb") as fh:
        a = fh.read()
    with open(os.path.join(parallel, "summary.csv"), "rb") as fh:
        b = fh.read()
    assert a == b


def test_numeric_polar_cross_checks_field_free_suites(tmp_path):
    cfg = _config(tmp_path, """
[norm]
kind = ellipse
polar = numeric

[suites]
run = identities geometry

[output]
figures = no
""")
    assert main(["run", cfg, "--out", str(tmp_path / "out")]) == 0


def test_numeric_polar_refuses_field_suites(tmp_path, capsys):
    cfg = _config(tmp_path, """
[norm]
polar = numeric

[field]
preset = radial-quadratic

[suites]
run = symmetrize
""")
    assert main(["run", cfg, "--out", str(tmp_path / "out")]) == 2
    assert "analytic polar" in capsys.readouterr().err


def test_grid_field_file_runs_structural_suites(tmp_path, radial_field_euclid):
    field_path = tmp_path / "field.csv"
    write_field(field_path, radial_field_euclid)
    cfg = _config(tmp_path, f"""
[field]
file = {field_path}

[resolution]
levels = 24

[suites]
run = symmetrize

[output]
figures = no
""")
    out = str(tmp_path / "out")
    assert main(["run", cfg, "--out", out]) == 0
    assert all(r[3] == "pass" for r in _summary_rows(out))


def test_grid_field_file_refuses_derivative_suites(tmp_path,
                                                   radial_field_euclid,
                                                   capsys):
    field_path = tmp_path / "field.csv"
    write_field(field_path, radial_field_euclid)
    cfg = _config(tmp_path, f"""
[field]
file = {field_path}

[suites]
run = polya-szego
""")
    assert main(["run", cfg, "--out", str(tmp_path / "out")]) == 2
    assert "closed-form derivatives" in capsys.readouterr().err


def test_failing_data_exits_one(tmp_path, capsys):
    # a two-peak field: dropping the second island makes the perimeter
    # profile jump, which the rearrangement diagnostics must flag
    h = 1.0 / 32.0
    xs = np.arange(-1.2, 1.2 + h, h)
    ys = np.arange(-0.8, 0.8 + h, h)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    left = 0.25 - (xx + 0.45) ** 2 - yy**2
    right = 0.24 - (xx - 0.45) ** 2 - yy**2
    values = np.maximum(np.maximum(left, right), 0.0)
    theta = np.linspace(0.0, 2.0 * np.pi, 257)[:-1]
    ring = 0.5 * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    hull = ConvexHull(np.vstack([ring + [-0.45, 0.0], ring + [0.45, 0.0]]))
    domain = ConvexCurve(hull.points[hull.vertices])
    field = ScalarField.from_grid(domain, (xs[0], ys[0]), h, values,
                                  name="two-peaks")
    field_path = tmp_path / "peaks.csv"
    write_field(field_path, field)
    cfg = _config(tmp_path, f"""
[field]
file = {field_path}

[resolution]
levels = 16

[suites]
run = symmetrize

[output]
figures = no
""")
    assert main(["run", cfg, "--out", str(tmp_path / "out")]) == 1
    assert "FAIL" in capsys.readouterr().out


@pytest.mark.parametrize("body,message", [
    ("[mystery]\nkey = 1\n", "unknown config section"),
    ("[norm]\nflavor = mint\n", "unknown keys"),
    ("[norm]\nkind = taxicab\n", "unknown norm kind"),
    ("[norm]\nkind = power\np = 1.2\n", "p >= 2"),
    ("[norm]\npolar = sideways\n", "analytic"),
    ("[field]\npreset = radial-quadratic\nfile = x.csv\n", "not both"),
    ("[field]\npreset = mystery\n", "unknown field preset"),
    ("[suites]\nrun = nonsense\n", "unknown suites"),
    ("[resolution]\nh = -0.1\n", "positive"),
    ("[resolution]\nh = soup\n", "bad resolution"),
    ("[field]\npreset = radial-quadratic\n[suites]\nrun = compare\n"
     "[resolution]\nh = not-a-number\n", "bad resolution"),
])
def test_bad_configs_exit_two(tmp_path, capsys, body, message):
    cfg = _config(tmp_path, body)
    assert main(["run", cfg, "--out", str(tmp_path / "out")]) == 2
    assert message in capsys.readouterr().err


def test_missing_config_exits_two(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.ini")]) == 2
    assert "cannot read config" in capsys.readouterr().err
