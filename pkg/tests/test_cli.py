import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from fluctem.cli import EXIT_CONFIG, EXIT_NONCONVERGED, main, reduced_frequency, reduced_length
from fluctem.friction import ShearSystem, growth_rate, pendry_force


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    """Split CSV output into (metadata lines, header, rows of floats or strings)."""
    meta = [line for line in text.splitlines() if line.startswith("#")]
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    rows = list(csv.reader(io.StringIO(body)))
    header, data = rows[0], rows[1:]

    def conv(x):
        try:
            return float(x)
        except ValueError:
            return x

    return meta, header, [[conv(x) for x in r] for r in data]


def test_spectra_trace_converges(capsys):
    code, out, _ = run(["spectra", "--deltas", "1e-2,1e-3,1e-4,1e-5"], capsys)
    assert code == 0
    meta, header, rows = table(out)
    assert header == ["delta", "density", "vacuum_limit"]
    assert any(line.startswith("# command spectra") for line in meta)
    dens = np.array([r[1] for r in rows])
    limit = rows[0][2]
    assert limit == pytest.approx(2 * math.sin(1.0))
    err = np.abs(dens - limit)
    assert np.all(np.diff(err) < 0)
    assert np.all(np.diff(dens) > 0) or np.all(np.diff(dens) < 0)


def test_spectra_profile(capsys):
    code, out, _ = run(["spectra", "--mode", "profile", "--r-values", "lin:0.5:5:10", "--omega", "2"], capsys)
    assert code == 0
    _, header, rows = table(out)
    assert header == ["R", "density", "vacuum"]
    for R, dens, vac in rows:
        assert dens == pytest.approx(8 * math.sin(2 * R) / R, abs=1e-13)
        assert vac == pytest.approx(dens, abs=1e-13)


def test_empty_sweep_gives_header_only(capsys):
    code, out, _ = run(["spectra", "--deltas", ""], capsys)
    assert code == 0
    _, header, rows = table(out)
    assert header == ["delta", "density", "vacuum_limit"] and rows == []


def test_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["kk-check", "--out", str(a), "--omega-test", "0.3,0.5"]) == 0
    assert main(["kk-check", "--out", str(b), "--omega-test", "0.3,0.5"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""


def test_kk_check_dichotomy(capsys):
    _, out, _ = run(["kk-check", "--model", "plasma"], capsys)
    assert table(out)[2][0][1] == pytest.approx(4.0)
    _, out, _ = run(["kk-check"], capsys)
    assert table(out)[2][0][1] < 0.02


def test_friction_dynamics(capsys):
    code, out, err = run(["friction-dynamics", "--d", "0.8,1.2", "--n-t", "41", "--grid-n", "0"], capsys)
    assert code == 0
    _, header, rows = table(out)
    assert header == ["d", "t", "N", "dN_dt", "F_per_area"]
    slopes = {}
    for d in (0.8, 1.2):
        sub = np.array([r[1:3] for r in rows if r[0] == d])
        assert sub[0, 0] == 0.0 and sub[0, 1] == 0.0
        sys_ = ShearSystem(1.0, d, 1.0)
        rate = growth_rate(sys_, sys_.peak_wave_vector(), exact=True)
        late = sub[:, 0] * rate >= 5.0
        slopes[d] = np.polyfit(sub[late, 0], np.log(sub[late, 1]), 1)[0]
        assert slopes[d] == pytest.approx(2 * rate, rel=0.01)
    assert slopes[1.2] < slopes[0.8]


def test_friction_force_column_and_warnings(capsys):
    code, out, err = run(["friction-dynamics", "--d", "1.0", "--n-t", "3", "--grid-n", "6"], capsys)
    assert code == 0
    assert "warning (d=1.0)" in err
    _, _, rows = table(out)
    assert all(math.isfinite(r[4]) for r in rows)


def test_pendry_force(capsys):
    code, out, _ = run(["pendry-force", "--sweep", "d", "--values", "0.5,1,2", "--v", "0.5"], capsys)
    assert code == 0
    _, header, rows = table(out)
    assert header == ["d", "F_per_area", "F_per_area_double"]
    for d, F, F2 in rows:
        assert F == pytest.approx(pendry_force(ShearSystem(1.0, d, 0.5)), rel=1e-14)
        assert F2 == pytest.approx(F, rel=1e-6)


def test_drag_force_rows_sorted(capsys):
    code, out, _ = run(["drag-force", "--values", "0.05,0,0.02", "--tol", "1e-6"], capsys)
    assert code == 0
    _, header, rows = table(out)
    assert header == ["v0", "F_x", "abs_error", "status"]
    assert [r[0] for r in rows] == [0.0, 0.02, 0.05]
    assert rows[0][1] == 0.0
    assert all(r[3] == "ok" for r in rows)
    assert 0 < rows[1][1] < rows[2][1]


def test_drag_nonconvergence_exit_code(capsys):
    code, out, _ = run(["drag-force", "--values", "0.5", "--tol", "1e-15"], capsys)
    assert code == EXIT_NONCONVERGED
    _, _, rows = table(out)
    assert rows[0][3].startswith("nonconverged")


@pytest.mark.parametrize(
    "argv,field",
    [
        (["drag-force", "--z0", "-1"], "z0"),
        (["drag-force", "--sweep", "T"], "sweep"),
        (["spectra", "--R", "0"], "R"),
        (["spectra", "--deltas", "1e-4,1e-3"], "deltas"),
        (["friction-dynamics", "--v", "0"], "v"),
        (["pendry-force", "--d", "abc"], "d"),
        (["kk-check", "--omega-test", "200"], "omega_test"),
        (["kk-check", "--tol", "0"], "tol"),
    ],
)
def test_config_errors_name_the_field(argv, field, capsys):
    code, out, err = run(argv, capsys)
    assert code == EXIT_CONFIG
    assert f"field '{field}'" in err
    assert out == ""


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("omega = 2.0\nR = 0.5\n\n[spectra]\ndeltas = 1e-3\n")
    code, out, _ = run(["spectra", "--config", str(cfg)], capsys)
    assert code == 0
    meta, _, rows = table(out)
    assert "# omega = 2.0" in meta and "# R = 0.5" in meta
    assert rows[0][0] == 1e-3 and rows[0][2] == pytest.approx(16 * math.sin(1.0))
    code, out, _ = run(["spectra", "--config", str(cfg), "--omega", "1.0"], capsys)
    meta, _, rows = table(out)
    assert "# omega = 1.0" in meta
    assert rows[0][2] == pytest.approx(4 * math.sin(0.5))


def test_config_file_problems(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("nonsense_key = 1\n")
    code, _, err = run(["spectra", "--config", str(bad)], capsys)
    assert code == EXIT_CONFIG and "nonsense_key" in err
    code, _, err = run(["spectra", "--config", str(tmp_path / "missing.ini")], capsys)
    assert code == EXIT_CONFIG


def test_threads_give_identical_output(capsys):
    args = ["pendry-force", "--values", "0.3,0.6,0.9", "--check", "0"]
    _, serial, _ = run(args, capsys)
    _, parallel, _ = run(args + ["--threads", "2"], capsys)
    strip = lambda s: [line for line in s.splitlines() if not line.startswith("# threads")]  # noqa: E731
    assert strip(serial) == strip(parallel)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fluctem", "kk-check", "--model", "plasma"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "omega_test,residual" in proc.stdout


def test_unit_helpers():
    assert reduced_frequency(3.0, 1.5) == 2.0
    # c / omega_ref for 1 eV is about 197 nm
    assert reduced_length(197.327e-9, 1.0) == pytest.approx(1.0, rel=1e-4)
