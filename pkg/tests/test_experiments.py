"""Unit tests for reference meshes, sup-norm errors, and rate studies."""
import math

import numpy as np
import pytest

from eulerlab import (
    ConfigError,
    ConvergenceReport,
    FitError,
    ParameterError,
    StudyRow,
    Trajectory,
    bound_ratio_check,
    convergence_study,
    euler_solve,
    fit_rate,
    linear_problem,
    make_problem,
    reference_solution,
    sup_error,
    worst_case_error,
)
from eulerlab.experiments import EPS, _pre_plateau, _stable_suffix


def _pl(a, b, states_1d):
    states = np.asarray(states_1d, dtype=np.float64).reshape(-1, 1)
    n = states.shape[0] - 1
    h = (b - a) / n
    nodes = a + h * np.arange(n + 1)
    nodes[-1] = b
    slopes = np.diff(states, axis=0) / h
    return Trajectory(a=a, b=b, h=h, nodes=nodes, states=states, slopes=slopes)


def test_reference_solution_refines_the_mesh():
    problem = linear_problem(1.0)
    ref = reference_solution(problem, 8, factor=50)
    assert ref.n == 400
    with pytest.raises(ParameterError):
        reference_solution(problem, 0, factor=50)
    with pytest.raises(ParameterError):
        reference_solution(problem, 8, factor=0)


def test_reference_solution_resource_guard():
    problem = linear_problem(1.0)
    with pytest.raises(ConfigError):
        reference_solution(problem, 2**14, factor=10**5)


def test_sup_error_of_a_trajectory_with_itself_is_zero():
    traj = euler_solve(linear_problem(1.0), 64)
    assert sup_error(traj, traj) == 0.0


def test_sup_error_known_value():
    # flat zero vs a hat function peaking at the middle knot
    flat = _pl(0.0, 1.0, [0.0, 0.0, 0.0, 0.0, 0.0])
    hat = _pl(0.0, 1.0, [0.0, 0.25, 0.5, 0.25, 0.0])
    assert sup_error(hat, flat) == 0.5
    assert sup_error(flat, hat) == 0.5


def test_sup_error_sees_maxima_between_the_coarse_knots():
    # coarse mesh knots all agree; the gap is at the fine mesh's knots
    coarse = _pl(0.0, 1.0, [0.0, 0.0])
    fine = _pl(0.0, 1.0, [0.0, -0.125, 1.0, 0.0])  # peak at t=2/3
    assert sup_error(coarse, fine) == 1.0


def test_sup_error_rejects_mismatched_trajectories():
    t1 = euler_solve(linear_problem(1.0, 0.0, 1.0, 1.0), 8)
    t2 = euler_solve(linear_problem(1.0, 0.0, 2.0, 1.0), 8)
    with pytest.raises(ParameterError):
        sup_error(t1, t2)
    t3 = euler_solve(
        make_problem(lambda t, y: -y, 0.0, 1.0, [1.0, 1.0], growth_const=1.0), 8
    )
    with pytest.raises(ParameterError):
        sup_error(t1, t3)


def test_sup_error_vector_norms():
    # components (0.6, 0.8) at the end knot: Euclidean distance 1
    za = _pl(0.0, 1.0, [0.0, 0.0])
    a = Trajectory(
        a=0.0,
        b=1.0,
        h=1.0,
        nodes=np.array([0.0, 1.0]),
        states=np.array([[0.0, 0.0], [0.6, 0.8]]),
        slopes=np.array([[0.6, 0.8]]),
    )
    b = Trajectory(
        a=0.0,
        b=1.0,
        h=1.0,
        nodes=np.array([0.0, 1.0]),
        states=np.zeros((2, 2)),
        slopes=np.zeros((1, 2)),
    )
    assert sup_error(a, b) == pytest.approx(1.0, abs=1e-15)
    assert za.d == 1  # the scalar twin exercises the compiled path instead


def test_worst_case_error_validates_mc_tries():
    problem = linear_problem(1.0)
    for bad in (0, -1, True, 2.5):
        with pytest.raises(ParameterError):
            worst_case_error(problem, 8, 0.1, mc_tries=bad, factor=10)


def test_worst_case_error_is_monotone_in_mc_tries():
    problem = linear_problem(1.0, 0.0, 1.0, 1.0)
    ref = reference_solution(problem, 32, factor=100)
    small, errs_small = worst_case_error(
        problem, 32, 0.2, mc_tries=8, base_seed=3, reference=ref
    )
    large, errs_large = worst_case_error(
        problem, 32, 0.2, mc_tries=32, base_seed=3, reference=ref
    )
    # seed sets nest, so the sampled maximum can only grow
    assert large >= small
    assert errs_large[:8] == errs_small
    assert len(errs_large) == 32


def test_worst_case_error_accepts_matching_reference_only():
    problem = linear_problem(1.0, 0.0, 1.0, 1.0)
    ref = reference_solution(problem, 16, factor=100)
    auto, _ = worst_case_error(problem, 16, 0.1, mc_tries=4, base_seed=1, factor=100)
    manual, _ = worst_case_error(
        problem, 16, 0.1, mc_tries=4, base_seed=1, reference=ref
    )
    assert auto == manual
    other = euler_solve(linear_problem(1.0, 0.0, 2.0, 1.0), 1600)
    with pytest.raises(ParameterError):
        worst_case_error(problem, 16, 0.1, mc_tries=4, reference=other)


def test_convergence_study_validates_inputs():
    problem = linear_problem(1.0)
    with pytest.raises(ParameterError):
        convergence_study(problem, [], 0.0)
    with pytest.raises(ParameterError):
        convergence_study(problem, [16, 8], 0.0)
    with pytest.raises(ParameterError):
        convergence_study(problem, [16, 16], 0.0)
    with pytest.raises(ParameterError):
        convergence_study(problem, [16, True], 0.0)
    with pytest.raises(ParameterError):
        convergence_study(problem, [8, 16], 0.0, fit_range="widest")


def test_exact_study_runs_one_replica_per_mesh():
    problem = linear_problem(1.0, 0.0, 1.0, 1.0)
    report = convergence_study(problem, [8, 16, 32], 0.0, mc_tries=50, factor=50)
    assert all(row.mc_tries == 1 for row in report.rows)
    assert [row.n for row in report.rows] == [8, 16, 32]
    assert report.slope == pytest.approx(1.0, abs=0.1)
    assert report.n_range_used == (8, 16, 32)
    assert report.fit_range == "full"


def test_study_is_deterministic_for_fixed_base_seed():
    problem = linear_problem(1.0, 0.0, 1.0, 1.0)
    kwargs = dict(kind="hashed", mc_tries=5, factor=50, base_seed=13)
    r1 = convergence_study(problem, [8, 16], 0.1, **kwargs)
    r2 = convergence_study(problem, [8, 16], 0.1, **kwargs)
    assert r1.rows == r2.rows
    assert r1.slope == r2.slope


def test_error_floor_is_clamped_and_reported():
    # g == 0 from xi = 0: every error is exactly zero, clamped to EPS
    problem = linear_problem(0.0, 0.0, 1.0, 0.0)
    report = convergence_study(problem, [4, 8, 16], 0.0, factor=20)
    assert report.clamped_n == (4, 8, 16)
    assert all(row.err_max == EPS for row in report.rows)
    assert report.slope == pytest.approx(0.0, abs=1e-12)


def test_fit_rate_recovers_exact_power_laws():
    rows = [StudyRow(n, 1.0 / n, 0.0, n**-2.0, n**-2.0, 1) for n in (8, 16, 32, 64)]
    slope, intercept = fit_rate(rows)
    assert slope == pytest.approx(2.0, abs=1e-12)
    assert intercept == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(FitError):
        fit_rate(rows[:1])
    with pytest.raises(FitError):
        fit_rate([rows[0], rows[0]])


def test_pre_plateau_keeps_the_improving_prefix():
    rows = [
        StudyRow(8, 0.125, 0.1, 1.0, 1.0, 1),
        StudyRow(16, 0.0625, 0.1, 0.5, 0.5, 1),
        StudyRow(32, 0.03125, 0.1, 0.49, 0.49, 1),
        StudyRow(64, 0.015625, 0.1, 0.1, 0.1, 1),
    ]
    kept = _pre_plateau(rows)
    assert [r.n for r in kept] == [8, 16]


def test_stable_suffix_drops_rows_beyond_the_error_scale():
    rows = [
        StudyRow(8, 0.125, 0.0, 5.0, 5.0, 1),
        StudyRow(16, 0.0625, 0.0, 0.5, 0.5, 1),
        StudyRow(32, 0.03125, 0.0, 3.0, 3.0, 1),
        StudyRow(64, 0.015625, 0.0, 0.2, 0.2, 1),
        StudyRow(128, 0.0078125, 0.0, 0.1, 0.1, 1),
    ]
    kept = _stable_suffix(rows, 2.0)
    assert [r.n for r in kept] == [64, 128]
    assert _stable_suffix(rows, 10.0) == rows


def test_fit_subranges_fall_back_to_full_when_degenerate():
    # errors never improve by 5%: pre-plateau keeps 1 row, falls back
    problem = linear_problem(0.0, 0.0, 1.0, 0.0)
    report = convergence_study(problem, [4, 8, 16], 0.0, factor=20, fit_range="pre-plateau")
    assert report.n_range_used == (4, 8, 16)


def test_bound_ratio_check_formula():
    rows = (
        StudyRow(10, 0.1, 0.5, 0.3, 0.3, 1),
        StudyRow(100, 0.01, 0.5, 0.2, 0.2, 1),
    )
    report = ConvergenceReport(
        rows=rows,
        slope=1.0,
        intercept=0.0,
        n_range_used=(10, 100),
        clamped_n=(),
        kind="hashed",
        base_seed=0,
        factor=1000,
        fit_range="full",
    )
    ratios, spread = bound_ratio_check(report, alpha=1.0, beta=0.5, delta=0.5)
    for row, ratio in zip(rows, ratios):
        h = row.h
        denom = h**1.0 + h**0.5 + math.sqrt(h) + 0.5
        assert ratio == pytest.approx(row.err_max / denom, rel=1e-15)
    assert spread == pytest.approx(max(ratios) / min(ratios), rel=1e-15)
    empty = ConvergenceReport(
        rows=(),
        slope=0.0,
        intercept=0.0,
        n_range_used=(),
        clamped_n=(),
        kind="hashed",
        base_seed=0,
        factor=1000,
        fit_range="full",
    )
    with pytest.raises(ParameterError):
        bound_ratio_check(empty, alpha=1.0, beta=0.5, delta=0.5)
