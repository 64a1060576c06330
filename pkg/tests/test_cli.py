import numpy as np
import pytest

from shockwave_lab.cli import main
from shockwave_lab.config import ConfigError, parse_config

MINIMAL = """\
# minimal two-shock experiment
gas.gamma = 2.0
riemann.v_minus = 2.0
riemann.u_minus = 0.0
riemann.v_m = 1.0          # constructive form
riemann.v_plus = 2.0
composite.beta = 40.0
time.T = 50.0
"""

SINGLE_SHOCK_RUN = """\
gas.gamma = 2.0
riemann.v_minus = 2.0
riemann.u_minus = 0.0
riemann.v_m = 1.0
riemann.v_plus = 2.0
riemann.single_family = 1
perturbation.1.target = v
perturbation.1.amplitude = 0.02
perturbation.1.center = -2.0
perturbation.1.width = 1.0
grid.dx = 0.1
time.T = 0.2
time.record_dt = 0.1
time.snapshot_times = 0.2
"""


def _write(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_parse_minimal_defaults(tmp_path):
    cfg = parse_config(_write(tmp_path, MINIMAL))
    assert cfg.gas.a == 1.0 and cfg.gas.alpha == 0.0
    assert cfg.scheme.cfl_hyperbolic == 0.4
    assert cfg.scheme.cfl_viscous == 0.4
    assert cfg.time.record_dt == pytest.approx(50.0 / 200.0)
    assert cfg.out_dir == "out"


def test_parse_gamma_invariant(tmp_path):
    path = _write(tmp_path, MINIMAL.replace("gas.gamma = 2.0", "gas.gamma = 0.9"))
    with pytest.raises(ConfigError, match="gamma must exceed 1"):
        parse_config(path)


def test_parse_unknown_key(tmp_path):
    path = _write(tmp_path, MINIMAL + "gas.typo = 3\n")
    with pytest.raises(ConfigError, match="unknown config key"):
        parse_config(path)


def test_parse_missing_key(tmp_path):
    path = _write(tmp_path, "gas.gamma = 2.0\n")
    with pytest.raises(ConfigError, match="missing required key"):
        parse_config(path)


def test_parse_duplicate_key(tmp_path):
    path = _write(tmp_path, MINIMAL + "gas.gamma = 2.0\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(path)


def test_parse_ss_violation_detected_early(tmp_path):
    text = """\
gas.gamma = 2.0
riemann.v_minus = 2.0
riemann.u_minus = 0.0
riemann.v_plus = 2.0
riemann.u_plus = 1.0
composite.beta = 40.0
time.T = 1.0
"""
    with pytest.raises(ConfigError, match="SS region"):
        parse_config(_write(tmp_path, text))


def test_constructive_roundtrip(tmp_path, gas, two_shock):
    cfg = parse_config(_write(tmp_path, MINIMAL))
    ts = cfg.riemann.resolve(cfg.gas)
    assert ts.mid.v == pytest.approx(two_shock.mid.v, rel=1e-12)
    assert ts.right.u == pytest.approx(two_shock.right.u, rel=1e-12)


def test_cmd_riemann_prints_canonical(tmp_path, capsys):
    code = main(["riemann", "--config", _write(tmp_path, MINIMAL),
                 "--out", str(tmp_path / "out")])
    assert code == 0
    out = capsys.readouterr().out
    values = {}
    for line in out.strip().splitlines():
        key, val = line.split("=")
        values[key.strip()] = float(val)
    assert values["v_m"] == pytest.approx(1.0, abs=1e-6)
    assert values["u_m"] == pytest.approx(-0.866025, abs=1e-6)
    assert values["s1"] == pytest.approx(-0.866025, abs=1e-6)
    assert values["s2"] == pytest.approx(0.866025, abs=1e-6)


def test_cmd_shifts_zero_perturbation(tmp_path, capsys):
    code = main(["shifts", "--config", _write(tmp_path, MINIMAL),
                 "--out", str(tmp_path / "out")])
    assert code == 0
    out = capsys.readouterr().out
    values = dict(line.split("=") for line in out.strip().splitlines())
    assert abs(float(values["beta1 "])) <= 1e-12
    assert abs(float(values["beta2 "])) <= 1e-12


def test_cmd_simulate_outputs(tmp_path, capsys):
    out_dir = tmp_path / "run"
    code = main(["simulate", "--config", _write(tmp_path, SINGLE_SHOCK_RUN),
                 "--out", str(out_dir)])
    assert code == 0
    diag = (out_dir / "diag.csv").read_text().splitlines()
    assert diag[0] == ("t,sup_v,sup_u,l2_phi,h1_phi,h2_phi,l2_psi,h1_psi,"
                       "l2_Psi,l2_W,E0,E1,min_f,ineq_violation")
    assert len(diag) == 4  # records at t = 0, 0.1, 0.2
    snap = (out_dir / "snap_t0.2.csv").read_text().splitlines()
    assert snap[0] == "x,v,u,V,U,h,H,W"


def test_cmd_simulate_deterministic(tmp_path):
    cfg_path = _write(tmp_path, SINGLE_SHOCK_RUN)
    outs = []
    for tag in ("a", "b"):
        out_dir = tmp_path / tag
        assert main(["simulate", "--config", cfg_path, "--out", str(out_dir)]) == 0
        outs.append((out_dir / "diag.csv").read_bytes())
    assert outs[0] == outs[1]


def test_csv_seventeen_digit_roundtrip(tmp_path):
    vals = [1.0 / 3.0, np.pi, 2.0 ** -52, 1.4433756729740645]
    for v in vals:
        assert float("%.17g" % v) == v


def test_cmd_verify_unknown_suite(capsys):
    assert main(["verify", "--suite", "nonsense"]) == 2
    assert "usage error" in capsys.readouterr().err


def test_cmd_verify_named_suite(capsys):
    assert main(["verify", "--suite", "shifts"]) == 0
    out = capsys.readouterr().out
    lines = [l for l in out.strip().splitlines() if l]
    assert any(l.startswith("shifts.zero_mass_residual,") for l in lines)
    assert all(l.endswith(",PASS") for l in lines)


def test_perturbation_validation():
    from shockwave_lab.config import Perturbation
    with pytest.raises(ConfigError, match="width"):
        Perturbation("v", 0.1, 0.0, -1.0)
    with pytest.raises(ConfigError, match="target"):
        Perturbation("rho", 0.1, 0.0, 1.0)


def test_grid_and_scheme_validation():
    from shockwave_lab import Grid1D, SchemeConfig
    with pytest.raises(ValueError):
        Grid1D(0.0, 1.0, 8)
    with pytest.raises(ValueError):
        SchemeConfig(cfl_hyperbolic=1.5)


def test_missing_config_is_usage_error(capsys):
    with pytest.raises(SystemExit):
        main(["simulate"])


def test_bad_config_returns_error(tmp_path, capsys):
    path = _write(tmp_path, "gas.gamma = 0.5\nriemann.v_minus = 2.0\n")
    assert main(["riemann", "--config", path]) == 1
    assert "config error" in capsys.readouterr().err
