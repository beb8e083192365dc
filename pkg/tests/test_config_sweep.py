import numpy as np
import pytest

from nessq.config import Axis, ConfigError, SweepSpec, bundled_configs, load, parse_text
from nessq.sweep import run_sweep, to_csv, to_json

BASE = """
[fluid]
kind = two_qubit
lam = 0.05
gamma_0 = 1e-3
T_A = 0.2
T_S = 0.05

[schedule]
epsilon_over_lambda = 10
tau = 2000
"""


def test_bundled_configs_load():
    names = bundled_configs()
    assert {"qutrit_v_example", "two_qubit_fig3", "two_qubit_fig5", "single_bath"} <= set(names)
    for name in names:
        load(name)


def test_axis_values():
    assert np.allclose(Axis("T_A", "linear", 0.1, 0.3, 3).values(), [0.1, 0.2, 0.3])
    assert np.allclose(Axis("T_A", "log", 0.1, 0.4, 3).values(), [0.1, 0.2, 0.4])
    with pytest.raises(ConfigError):
        Axis("T_A", "linear", 0.1, 0.3, 1)
    with pytest.raises(ConfigError):
        Axis("T_A", "log", 0.0, 0.3, 3)
    with pytest.raises(ConfigError):
        Axis("T_A", "cubic", 0.1, 0.3, 3)


def test_epsilon_over_lambda_resolves():
    cfg = parse_text(BASE)
    assert cfg.run.epsilon() == pytest.approx(0.5)
    s = cfg.run.cycle_schedule()
    assert s.tau == 2000.0
    moved = cfg.run.with_values({"epsilon": 0.1})
    assert moved.epsilon() == 0.1 and "epsilon_over_lambda" not in moved.schedule


@pytest.mark.parametrize("text", [
    "[fluid]\nkind = trimer\n",
    "no sections at all",
    BASE.replace("T_S = 0.05", "T_S = cold"),
    BASE.replace("T_S = 0.05", "T_X = 0.05"),
    BASE + "\n[sweep]\naxis1 = omega_e, log, 0.1, 1, 3\n",
    BASE + "\n[sweep]\naxis1 = T_A, log, 0.1, 1\n",
    BASE + "\n[sweep]\naxis1 = T_A, log, 0.1, 1, 3\ntarget = movie\n",
    BASE + "\n[output]\nformat = xlsx\n",
    BASE.replace("tau = 2000", "depth = 3"),
    "[fluid]\nkind = qutrit_v\nomega_e = 0.5\n\n[schedule]\nepsilon_over_lambda = 3\ntau = 1\n",
])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        cfg = parse_text(text)
        cfg.run.cycle_schedule()


def test_missing_tau_is_a_config_error():
    cfg = parse_text(BASE.replace("tau = 2000", ""))
    with pytest.raises(ConfigError):
        cfg.run.cycle_schedule()


def test_grid_order_is_row_major():
    cfg = parse_text(BASE + "\n[sweep]\naxis1 = T_A, linear, 0.1, 0.2, 2\n"
                            "axis2 = T_S, linear, 0.01, 0.03, 3\n")
    pts = cfg.sweep.points()
    assert len(pts) == 6
    assert [p["T_A"] for p in pts] == [0.1, 0.1, 0.1, 0.2, 0.2, 0.2]
    assert [p["T_S"] for p in pts][:3] == pytest.approx([0.01, 0.02, 0.03])


def test_sweep_rows_and_failures_recorded():
    text = BASE + "\n[sweep]\naxis1 = epsilon_over_lambda, log, 1e-3, 10, 5\n"
    rows = run_sweep(parse_text(text).sweep)
    assert len(rows) == 5
    # at eps/lambda = 1e-3 the swap takes longer than the period
    assert rows[0]["error"].startswith("ScheduleError")
    assert rows[0]["operating_flag"] is False
    assert rows[-1]["error"] == "" and rows[-1]["operating_flag"]
    assert list(rows[0]) == ["epsilon_over_lambda", "W", "Q_d_H", "Q_r_H", "Q_C",
                             "ergotropy_oss", "eta", "eta_over_eta_sc", "power",
                             "operating_flag", "error"]


def test_sweep_parallel_matches_serial_bytes():
    text = BASE + "\n[sweep]\naxis1 = T_A, linear, 0.1, 0.4, 4\n"
    spec = parse_text(text).sweep
    serial = to_csv(run_sweep(spec, workers=1))
    parallel = to_csv(run_sweep(spec, workers=3))
    assert serial == parallel
    assert serial == to_csv(run_sweep(spec, workers=1))


def test_ness_sweep_columns():
    text = BASE + "\n[sweep]\ntarget = ness\naxis1 = T_S, linear, 0.05, 0.3, 3\n"
    rows = run_sweep(parse_text(text).sweep)
    assert [r["T_S"] for r in rows] == pytest.approx([0.05, 0.175, 0.3])
    for r in rows:
        assert r["population_deviation"] < 1e-10
        assert r["E_NESS_kernel"] == pytest.approx(r["E_NESS_closed_form"], rel=1e-8, abs=1e-15)
    # T_S above T_A: no gradient, no ergotropy
    assert not rows[-1]["active"]


def test_ness_sweep_rejects_schedule_axis():
    with pytest.raises(ConfigError):
        SweepSpec(parse_text(BASE).run, (Axis("tau", "log", 1, 10, 2),), target="ness")


def test_json_rendering_handles_nan():
    text = BASE + "\n[sweep]\naxis1 = epsilon_over_lambda, log, 1e-3, 1e-2, 2\n"
    out = to_json(run_sweep(parse_text(text).sweep))
    assert "NaN" not in out and "null" in out
