import json
import subprocess
import sys

import numpy as np
import pytest

from kerrkld import cli, config as cfgmod


def read_table(path):
    header, rows, cols = [], [], None
    for line in open(path):
        line = line.rstrip("\n")
        if line.startswith("#"):
            header.append(line)
        elif cols is None:
            cols = line.split(",")
        else:
            rows.append(line.split(","))
    return header, cols, rows


def header_value(header, key):
    for line in header:
        if line.startswith(f"# {key} = "):
            return line.split(" = ", 1)[1]
    raise KeyError(key)


def test_series_file_layout(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["series", "--epsilon", "0.1", "--pulses", "300", "--output", str(out)]) == 0
    header, cols, rows = read_table(out)
    assert cols == ["n", "k1"]
    assert len(rows) == 301
    for key in cfgmod.KEYS:
        header_value(header, key)
    assert header_value(header, "pulses") == "300"
    vals = np.array([float(r[1]) for r in rows])
    assert vals.min() >= 0 and vals.max() <= 1


def test_series_round_trip_precision(tmp_path):
    out = tmp_path / "s.csv"
    cli.main(["series", "--epsilon", "0.1", "--pulses", "50", "--output", str(out)])
    from kerrkld.qmap import ModelParams, run_indicators

    ref = run_indicators(ModelParams(epsilon=0.1, n_pulses=50), ["k1"]).series["k1"].values
    _, _, rows = read_table(out)
    np.testing.assert_array_equal([float(r[1]) for r in rows], ref)


def test_series_zero_perturbation(tmp_path):
    out = tmp_path / "s.csv"
    cli.main(["series", "--delta_epsilon", "0", "--pulses", "100", "--output", str(out)])
    _, _, rows = read_table(out)
    assert all(float(r[1]) == 0.0 for r in rows)


def test_leakage_is_warning_only(tmp_path, caplog):
    out = tmp_path / "s.csv"
    assert cli.main(["series", "--epsilon", "0.7", "--pulses", "100", "--output", str(out)]) == 0
    assert "leakage" in caplog.text
    assert out.exists()


def test_config_precedence(tmp_path):
    conf = tmp_path / "run.cfg"
    conf.write_text("# test config\nepsilon = 0.3\ndim = 40\npulses=20\n")
    out = tmp_path / "a.csv"
    cli.main(["series", "--config", str(conf), "--output", str(out)])
    header, _, rows = read_table(out)
    assert header_value(header, "epsilon") == "0.3"
    assert header_value(header, "dim") == "40"
    assert len(rows) == 21
    cli.main(["series", "--config", str(conf), "--epsilon", "0.4", "--output", str(out)])
    header, _, _ = read_table(out)
    assert header_value(header, "epsilon") == "0.4"
    assert header_value(header, "dim") == "40"


def test_hyphenated_flag_alias(tmp_path):
    out = tmp_path / "a.csv"
    cli.main(["series", "--delta-epsilon", "0.002", "--pulses", "5", "--output", str(out)])
    header, _, _ = read_table(out)
    assert header_value(header, "delta_epsilon") == "0.002"


@pytest.mark.parametrize(
    "argv,field",
    [
        (["series", "--dim", "1"], "dim"),
        (["series", "--chi", "-1"], "chi"),
        (["series", "--indicator", "bogus"], "indicator"),
        (["series", "--indicator", "kq"], "q"),
        (["series", "--pulses", "ten"], "pulses"),
        (["spectrum", "--normalization", "peak"], "normalization"),
        (["bifurcation", "--eps_min", "0.8", "--eps_max", "0.2"], "eps_max"),
        (["lyapunov", "--iterations", "10"], "iterations"),
    ],
)
def test_validation_errors(argv, field, caplog):
    assert cli.main(argv) == 1
    assert field in caplog.text


def test_unknown_config_key(tmp_path):
    conf = tmp_path / "bad.cfg"
    conf.write_text("epsilonn = 0.3\n")
    assert cli.main(["series", "--config", str(conf)]) == 1


def test_io_failure_exit_code(tmp_path):
    assert cli.main(["series", "--pulses", "5", "--output", str(tmp_path / "no" / "x.csv")]) == 2
    assert cli.main(["series", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_kld_indicator_runtime_error(tmp_path):
    assert cli.main(["series", "--indicator", "kld", "--pulses", "3", "--dim", "8",
                     "--output", str(tmp_path / "x.csv")]) == 2


def test_spectrum_of_constant_input(tmp_path):
    series = tmp_path / "const.csv"
    series.write_text("n,k1\n" + "".join(f"{n},0.25\n" for n in range(64)))
    out = tmp_path / "spec.csv"
    rc = cli.main(["spectrum", "--input", str(series), "--remove_mean", "false", "--output", str(out)])
    assert rc == 0
    header, cols, rows = read_table(out)
    assert cols == ["frequency", "power"]
    power = np.array([float(r[1]) for r in rows])
    assert power[0] == 1.0 and np.all(power[1:] < 1e-20)
    assert any(line.startswith("# peak 1,0,") for line in header)


def test_spectrum_footer(tmp_path):
    out = tmp_path / "spec.csv"
    rc = cli.main(["spectrum", "--epsilon", "0.1", "--indicator", "k2", "--pulses", "2000",
                   "--window_start", "500", "--output", str(out), "--json", "true"])
    assert rc == 0
    header, _, rows = read_table(out)
    assert len(rows) == 1501 // 2 + 1
    peaks = [line for line in header if line.startswith("# peak ")]
    assert 1 <= len(peaks) <= 10
    conc = float(header_value(header, "concentration_k5"))
    assert 0 < conc <= 1
    side = json.loads((tmp_path / "spec.csv.json").read_text())
    assert side["summary"]["concentration_k5"] == conc


def test_spectrum_window_outside_series(tmp_path):
    assert cli.main(["spectrum", "--pulses", "100", "--window_end", "500"]) == 1


def test_bifurcation_rows(tmp_path):
    out = tmp_path / "b.csv"
    cli.main(["bifurcation", "--n_eps", "1", "--eps_min", "0.46", "--samples", "25", "--output", str(out)])
    _, cols, rows = read_table(out)
    assert cols == ["epsilon", "re_alpha", "im_alpha"]
    assert len(rows) == 25
    cli.main(["bifurcation", "--n_eps", "9", "--samples", "12", "--transient", "50", "--output", str(out)])
    _, _, rows = read_table(out)
    assert len(rows) == 9 * 12
    eps = [float(r[0]) for r in rows]
    assert eps == sorted(eps) and eps[0] == 0.25 and eps[-1] == 0.75


def test_lyapunov_sweep_file_and_determinism(tmp_path, monkeypatch):
    args = ["lyapunov", "--n_eps", "7", "--eps_min", "0.1", "--eps_max", "0.7", "--iterations", "3000"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--output", str(a)]) == 0
    monkeypatch.setenv("KERRKLD_THREADS", "3")
    assert cli.main(args + ["--output", str(b)]) == 0
    strip = lambda f: [ln for ln in f.read_text().splitlines() if not ln.startswith("# output =")]
    assert strip(a) and strip(a) == strip(b)
    _, cols, rows = read_table(a)
    assert cols == ["epsilon", "exponent", "flag"]
    assert len(rows) == 7


def test_lyapunov_zero_kick(tmp_path):
    out = tmp_path / "z.csv"
    cli.main(["lyapunov", "--n_eps", "1", "--eps_min", "0", "--alpha0", "1", "--output", str(out)])
    _, _, rows = read_table(out)
    assert float(rows[0][1]) <= 1e-3 and rows[0][2] == "regular"


def test_selftest_pass_and_fail(capsys):
    assert cli.main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 6
    assert cli.main(["selftest", "--corrupt-tolerance"]) != 0
    assert "FAIL" in capsys.readouterr().out


def test_presets(tmp_path):
    prefix = tmp_path / "f2"
    assert cli.main(["fig2", "--pulses", "200", "--output", str(prefix)]) == 0
    header, cols, rows = read_table(str(prefix) + "_series.csv")
    assert header_value(header, "epsilon") == "0.1" and cols == ["n", "k1"]
    assert not (tmp_path / "f2_spectrum.csv").exists()

    prefix = tmp_path / "f6"
    assert cli.main(["fig6", "--pulses", "2000", "--output", str(prefix)]) == 0
    header, cols, _ = read_table(str(prefix) + "_series.csv")
    assert header_value(header, "epsilon") == "0.36" and cols == ["n", "k2"]
    header, _, rows = read_table(str(prefix) + "_spectrum.csv")
    assert header_value(header, "window_start") == "1500"
    assert len(rows) == 501 // 2 + 1

    out = tmp_path / "fig1.csv"
    assert cli.main(["fig1", "--n_eps", "5", "--samples", "4", "--output", str(out)]) == 0
    _, _, rows = read_table(out)
    assert len(rows) == 20


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "kerrkld", "series", "--pulses", "3", "--dim", "8"],
        capture_output=True, text=True,
    )
    assert res.returncode == 0
    assert res.stdout.startswith("# kerrkld")
