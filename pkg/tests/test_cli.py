"""End-to-end tests of the config-driven command line front end."""
import json

import numpy as np
import pytest

from eulerlab import ConfigError, convergence_study, linear_problem
from eulerlab.cli import (
    load_config,
    main,
    read_report_csv,
    run_check,
    run_config,
)


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload, indent=2))
    return path


def _base_config(**extra):
    cfg = {
        "problem": {
            "name": "linear-test",
            "params": {"rate": 1.0},
            "a": 0.0,
            "b": 1.0,
            "xi": 1.0,
        }
    }
    cfg.update(extra)
    return cfg


CONV = {
    "n_list": [8, 16, 32],
    "delta_list": [0.0, 0.1],
    "kind": "hashed",
    "mc_tries": 3,
    "factor": 20,
    "base_seed": 5,
    "csv": "rates.csv",
}


def test_missing_config_file_is_a_config_error(tmp_path, capsys):
    assert main(["convergence", str(tmp_path / "nope.json")]) == 2
    assert "cannot read config file" in capsys.readouterr().err


def test_invalid_json_reports_line_and_column(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "problem": [,]\n}')
    with pytest.raises(ConfigError, match=r"line 2, column 15"):
        load_config(path)


def test_field_errors_carry_dotted_paths(tmp_path):
    cases = [
        ({}, "problem"),
        (_base_config(convergence={"n_list": [8, "x"]}), "convergence.n_list[1]"),
        (_base_config(convergence={"n_list": [16, 8]}), "convergence.n_list[1]"),
        (_base_config(convergence={"delta_list": [0.0, 1.5]}), "convergence.delta_list[1]"),
        (_base_config(convergence={"fit_range": "widest"}), "convergence.fit_range"),
        (_base_config(convergence={"perturb_xi": "yes"}), "convergence.perturb_xi"),
        (_base_config(convergence={"kind": "gaussian"}), "convergence.kind"),
        (_base_config(check={"alpha": 1.0, "beta": 1.0}), "check.R"),
        (_base_config(solve={}), "solve.n"),
    ]
    for payload, needle in cases:
        path = _write(tmp_path, "cfg.json", payload)
        with pytest.raises(ConfigError) as exc_info:
            load_config(path)
        assert needle in str(exc_info.value)


def test_config_accepts_vector_initial_values(tmp_path):
    payload = _base_config()
    payload["problem"]["xi"] = [1.0, 2.0]
    config = load_config(_write(tmp_path, "cfg.json", payload))
    assert config.xi == (1.0, 2.0)


def test_fit_range_stable_is_accepted(tmp_path):
    payload = _base_config(convergence=dict(CONV, fit_range="stable"))
    config = load_config(_write(tmp_path, "cfg.json", payload))
    assert config.convergence.fit_range == "stable"


def test_convergence_run_writes_csv_and_svg(tmp_path, capsys):
    path = _write(tmp_path, "cfg.json", _base_config(convergence=CONV))
    assert main(["convergence", str(path), "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "slope delta=0:" in out
    assert "slope delta=0.1:" in out
    assert (tmp_path / "rates.csv").exists()
    assert (tmp_path / "rates.svg").exists()

    # the CSV rows round-trip the library's own numbers exactly
    rows = read_report_csv(tmp_path / "rates.csv")
    problem = linear_problem(1.0, 0.0, 1.0, 1.0)
    expected = []
    for delta in (0.0, 0.1):
        report = convergence_study(
            problem, [8, 16, 32], delta, kind="hashed", mc_tries=3, factor=20, base_seed=5
        )
        expected.extend(report.rows)
    assert rows == expected


def test_no_plot_skips_the_svg(tmp_path):
    path = _write(tmp_path, "cfg.json", _base_config(convergence=CONV))
    out_dir = tmp_path / "out"
    assert main(["convergence", str(path), "--out-dir", str(out_dir), "--no-plot"]) == 0
    assert (out_dir / "rates.csv").exists()
    assert not (out_dir / "rates.svg").exists()


def test_runs_are_reproducible_byte_for_byte(tmp_path):
    path = _write(tmp_path, "cfg.json", _base_config(convergence=CONV))
    d1, d2 = tmp_path / "run1", tmp_path / "run2"
    assert main(["convergence", str(path), "--out-dir", str(d1), "--no-plot", "--quiet"]) == 0
    assert main(["convergence", str(path), "--out-dir", str(d2), "--no-plot", "--quiet"]) == 0
    assert (d1 / "rates.csv").read_bytes() == (d2 / "rates.csv").read_bytes()


def test_seed_override_changes_the_noisy_series(tmp_path):
    path = _write(tmp_path, "cfg.json", _base_config(convergence=CONV))
    d1, d2 = tmp_path / "s1", tmp_path / "s2"
    assert main(["convergence", str(path), "--out-dir", str(d1), "--no-plot", "--quiet", "--seed", "1"]) == 0
    assert main(["convergence", str(path), "--out-dir", str(d2), "--no-plot", "--quiet", "--seed", "2"]) == 0
    assert (d1 / "rates.csv").read_bytes() != (d2 / "rates.csv").read_bytes()


def test_quiet_silences_stdout(tmp_path, capsys):
    path = _write(tmp_path, "cfg.json", _base_config(convergence=CONV))
    assert main(["convergence", str(path), "--out-dir", str(tmp_path), "--no-plot", "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_solve_writes_the_trajectory(tmp_path):
    payload = _base_config(solve={"n": 16, "delta": 0.0, "csv": "traj.csv"})
    path = _write(tmp_path, "cfg.json", payload)
    assert main(["solve", str(path), "--out-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "traj.csv").read_text().splitlines()
    assert lines[0] == "t,y_0"
    assert len(lines) == 18  # header + 17 nodes

    from eulerlab import euler_solve

    traj = euler_solve(linear_problem(1.0, 0.0, 1.0, 1.0), 16)
    got = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.array_equal(got[:, 0], traj.nodes)
    assert np.array_equal(got[:, 1:], traj.states)


def test_noisy_solve_differs_from_exact(tmp_path):
    exact = _base_config(solve={"n": 32, "delta": 0.0, "csv": "e.csv"})
    noisy = _base_config(solve={"n": 32, "delta": 0.25, "kind": "hashed", "seed": 9, "csv": "n.csv"})
    assert main(["solve", str(_write(tmp_path, "e.json", exact)), "--out-dir", str(tmp_path), "--quiet"]) == 0
    assert main(["solve", str(_write(tmp_path, "n.json", noisy)), "--out-dir", str(tmp_path), "--quiet"]) == 0
    assert (tmp_path / "e.csv").read_text() != (tmp_path / "n.csv").read_text()


def test_check_prints_the_three_estimates(tmp_path, capsys):
    payload = _base_config(check={"R": 3.0, "alpha": 1.0, "beta": 1.0, "samples": 1000})
    path = _write(tmp_path, "cfg.json", payload)
    assert main(["check", str(path)]) == 0
    out = capsys.readouterr().out
    assert "K_hat:" in out and "H_hat:" in out and "L_hat:" in out


def test_run_check_returns_the_estimate(tmp_path):
    payload = _base_config(check={"R": 3.0, "alpha": 1.0, "beta": 1.0, "samples": 1000})
    config = load_config(_write(tmp_path, "cfg.json", payload))
    est = run_check(config, quiet=True)
    assert est.H_hat == pytest.approx(1.0, abs=1e-9)


def test_subcommand_requires_its_section(tmp_path, capsys):
    path = _write(tmp_path, "cfg.json", _base_config())
    assert main(["convergence", str(path)]) == 2
    assert "convergence" in capsys.readouterr().err


def test_bad_problem_parameters_exit_2(tmp_path, capsys):
    payload = {
        "problem": {
            "name": "additive",
            "params": {"A": 1.0, "B1": 1.0, "B2": -1.0, "alpha": 1.0, "rho1": 1.0, "rho2": 1.0},
            "a": 0.0,
            "b": 1.0,
            "xi": 1.0,
        },
        "solve": {"n": 8},
    }
    path = _write(tmp_path, "cfg.json", payload)
    assert main(["solve", str(path)]) == 2
    assert "B1" in capsys.readouterr().err


def test_unknown_problem_name_rejected_at_parse_time(tmp_path):
    payload = _base_config()
    payload["problem"]["name"] = "heat-equation"
    with pytest.raises(ConfigError, match="heat-equation"):
        load_config(_write(tmp_path, "cfg.json", payload))


def test_report_reader_rejects_foreign_tables(tmp_path):
    bad = tmp_path / "other.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ConfigError, match="header"):
        read_report_csv(bad)


def test_run_config_requires_a_convergence_section(tmp_path):
    config = load_config(_write(tmp_path, "cfg.json", _base_config()))
    with pytest.raises(ConfigError):
        run_config(config, out_dir=tmp_path)
