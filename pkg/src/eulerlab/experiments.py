"""Convergence experiments: reference meshes, sup-norm errors, rate fits.

The protocol: solve on n steps, solve again on factor*n steps under
exact information as the stand-in for the unknown solution, take the
supremum distance of the two piecewise-linear trajectories, repeat over
Monte Carlo draws of the corruption and keep the largest error, then
regress -log10(err_max) on log10(n). The worst case over the corruption
class is approximated by a sampled maximum over seeds, which can only
underestimate the true supremum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .core import OdeProblem, Trajectory, euler_solve, euler_solve_noisy
from .errors import ConfigError, FitError, IntegrationError, ParameterError
from .noise import make_oracle

EPS = float(np.finfo(np.float64).eps)

MAX_REFERENCE_STEPS = 10**8


class StudyRow(NamedTuple):
    n: int
    h: float
    delta: float
    err_max: float
    err_mean: float
    mc_tries: int


@dataclass(frozen=True)
class ConvergenceReport:
    """One study: error rows over an n grid plus the fitted rate.

    ``slope`` and ``intercept`` are the least-squares coefficients of
    -log10(err_max) against log10(n) over ``n_range_used``. Rows whose
    error was clamped up to machine epsilon before the logs are listed
    in ``clamped_n``. The sampling provenance (kind, base_seed, factor,
    fit_range) rides along so a report is self-describing.
    """

    rows: tuple[StudyRow, ...]
    slope: float
    intercept: float
    n_range_used: tuple[int, ...]
    clamped_n: tuple[int, ...]
    kind: str
    base_seed: int
    factor: int
    fit_range: str


def reference_solution(problem: OdeProblem, n: int, factor: int = 1000) -> Trajectory:
    """Exact-information Euler on a mesh ``factor`` times finer.

    Stands in for the true solution when no closed form exists. Guarded
    at 1e8 total steps; refine deliberately, not accidentally.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ParameterError(f"step count n must be a positive integer, got {n!r}")
    if not isinstance(factor, (int, np.integer)) or isinstance(factor, bool) or factor < 1:
        raise ParameterError(f"factor must be a positive integer, got {factor!r}")
    total = int(n) * int(factor)
    if total > MAX_REFERENCE_STEPS:
        raise ConfigError(
            f"reference mesh needs n*factor = {total} steps, above the "
            f"{MAX_REFERENCE_STEPS} resource guard"
        )
    return euler_solve(problem, total)


def _check_comparable(approx: Trajectory, reference: Trajectory) -> None:
    if approx.a != reference.a or approx.b != reference.b:
        raise ParameterError(
            f"trajectories live on different intervals: "
            f"[{approx.a}, {approx.b}] vs [{reference.a}, {reference.b}]"
        )
    if approx.d != reference.d:
        raise ParameterError(
            f"trajectories have different dimensions: {approx.d} vs {reference.d}"
        )


def sup_error(approx: Trajectory, reference: Trajectory) -> float:
    """Exact supremum of ||approx(t) - reference(t)|| over [a, b].

    The difference of two piecewise-linear functions is piecewise affine
    on the union of their meshes and the norm of an affine function is
    convex on each segment, so the supremum sits at a knot of one of the
    two trajectories. Evaluating both interpolants on the union of knot
    sets is therefore exact, not a discretization.
    """
    _check_comparable(approx, reference)
    if approx.d == 1 and _kernels.NUMBA_AVAILABLE:
        return float(
            _kernels.sup_error_uniform_1d(
                approx.a,
                approx.h,
                approx.nodes,
                np.ascontiguousarray(approx.states[:, 0]),
                np.ascontiguousarray(approx.slopes[:, 0]),
                reference.h,
                reference.nodes,
                np.ascontiguousarray(reference.states[:, 0]),
                np.ascontiguousarray(reference.slopes[:, 0]),
            )
        )
    ts = np.union1d(approx.nodes, reference.nodes)
    diff = approx.at_many(ts) - reference.at_many(ts)
    return float(np.linalg.norm(diff, axis=1).max())


def worst_case_error(
    problem: OdeProblem,
    n: int,
    delta: float,
    kind: str = "hashed",
    mc_tries: int = 200,
    base_seed: int = 0,
    factor: int = 1000,
    perturb_xi: bool = True,
    reference: Trajectory | None = None,
) -> tuple[float, list[float]]:
    """Sampled worst-case error over corruption draws at one mesh size.

    Replica i uses oracle seed ``base_seed XOR i``, so seed sets nest as
    mc_tries grows and the maximum is monotone in it. Returns the
    maximum and the per-replica errors in replica order.
    """
    if not isinstance(mc_tries, (int, np.integer)) or isinstance(mc_tries, bool) or mc_tries < 1:
        raise ParameterError(f"mc_tries must be a positive integer, got {mc_tries!r}")
    if reference is None:
        reference = reference_solution(problem, n, factor)
    elif reference.a != problem.a or reference.b != problem.b or reference.d != problem.d:
        raise ParameterError("supplied reference does not match the problem's interval")
    errs: list[float] = []
    for i in range(1, int(mc_tries) + 1):
        oracle = make_oracle(problem, kind, delta, base_seed ^ i, perturb_xi=perturb_xi)
        try:
            traj = euler_solve_noisy(problem, n, oracle)
        except IntegrationError as exc:
            raise IntegrationError(
                exc.step, exc.t, exc.y, message=f"replica {i}: {exc}"
            ) from exc
        errs.append(sup_error(traj, reference))
    return max(errs), errs


def _clamp_errors(err_max: float, err_mean: float) -> tuple[float, float, bool]:
    clamped = err_max < EPS or err_mean < EPS
    err_max = max(err_max, EPS)
    err_mean = min(max(err_mean, EPS), err_max)
    return err_max, err_mean, clamped


def _pre_plateau(rows: Sequence[StudyRow]) -> list[StudyRow]:
    """Rows before err_max first fails to drop by >= 5% per refinement."""
    keep = [rows[0]]
    for prev, row in zip(rows, rows[1:]):
        if row.err_max <= 0.95 * prev.err_max:
            keep.append(row)
        else:
            break
    return keep


def _stable_suffix(rows: Sequence[StudyRow], scale: float) -> list[StudyRow]:
    """Rows after the last one whose error exceeds the problem's error scale.

    Every error bound here has the shape C*(1+||xi||)*decay, so a row
    with err_max above 1+||xi|| is outside the regime the bounds speak
    about; at coarse h the scheme can be violently unstable (large
    h * local expansion rate) and such rows say nothing about the rate.
    """
    start = 0
    for i, row in enumerate(rows):
        if row.err_max > scale:
            start = i + 1
    return list(rows[start:])


def convergence_study(
    problem: OdeProblem,
    n_list: Sequence[int],
    delta: float,
    kind: str = "hashed",
    mc_tries: int = 200,
    factor: int = 1000,
    base_seed: int = 0,
    fit_range: str = "full",
    perturb_xi: bool = True,
) -> ConvergenceReport:
    """One row of worst-case errors per n, plus the fitted rate.

    delta = 0 forces mc_tries to 1: the corruption class degenerates to
    a single element, so replicas would all repeat one run. fit_range
    picks the regression rows: "full" fits every row; "pre-plateau"
    stops before the error stops improving (useful once the
    h-independent delta term dominates); "stable" drops leading rows
    with err_max > 1+||xi||, where the coarse mesh is outside the
    regime any of the error bounds describe. A sub-range with fewer
    than 2 rows falls back to the full fit.
    """
    if len(n_list) == 0:
        raise ParameterError("n_list must not be empty")
    cleaned: list[int] = []
    for n in n_list:
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
            raise ParameterError(f"n_list entries must be positive integers, got {n!r}")
        cleaned.append(int(n))
    if any(n2 <= n1 for n1, n2 in zip(cleaned, cleaned[1:])):
        raise ParameterError(f"n_list must be strictly increasing, got {cleaned}")
    if fit_range not in ("full", "pre-plateau", "stable"):
        raise ParameterError(
            f"fit_range must be 'full', 'pre-plateau', or 'stable', got {fit_range!r}"
        )

    delta = float(delta)
    tries = 1 if delta == 0.0 else int(mc_tries)

    rows: list[StudyRow] = []
    clamped_n: list[int] = []
    for n in cleaned:
        h = (problem.b - problem.a) / n
        err_max, errs = worst_case_error(
            problem,
            n,
            delta,
            kind=kind,
            mc_tries=tries,
            base_seed=base_seed,
            factor=factor,
            perturb_xi=perturb_xi,
        )
        err_max, err_mean, was_clamped = _clamp_errors(err_max, float(np.mean(errs)))
        if was_clamped:
            clamped_n.append(n)
        rows.append(StudyRow(n, h, delta, err_max, err_mean, tries))

    if fit_range == "pre-plateau":
        fit_rows = _pre_plateau(rows)
    elif fit_range == "stable":
        scale = 1.0 + float(np.linalg.norm(problem.xi))
        fit_rows = _stable_suffix(rows, scale)
    else:
        fit_rows = list(rows)
    if len(fit_rows) < 2:
        fit_rows = rows
    slope, intercept = fit_rate(fit_rows)
    return ConvergenceReport(
        rows=tuple(rows),
        slope=slope,
        intercept=intercept,
        n_range_used=tuple(r.n for r in fit_rows),
        clamped_n=tuple(clamped_n),
        kind=kind,
        base_seed=int(base_seed),
        factor=int(factor),
        fit_range=fit_range,
    )


def fit_rate(rows: Iterable) -> tuple[float, float]:
    """Least squares of -log10(err_max) on log10(n) over report rows.

    Accepts StudyRow tuples or anything indexable the same way. Errors
    are clamped up to machine epsilon before the logs.
    """
    ns: list[int] = []
    errs: list[float] = []
    for row in rows:
        ns.append(int(row[0]))
        errs.append(max(float(row[3]), EPS))
    if len(set(ns)) < 2:
        raise FitError(
            f"rate fit needs at least 2 rows with distinct n, got {len(set(ns))}"
        )
    x = np.log10(np.asarray(ns, dtype=np.float64))
    y = -np.log10(np.asarray(errs, dtype=np.float64))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def bound_ratio_check(
    report: ConvergenceReport, alpha: float, beta: float, delta: float
) -> tuple[list[float], float]:
    """Ratios of observed errors to the theoretical envelope per row.

    r_n = err_max / (h^alpha + h^beta + 1(delta>0) * (h^(1/2) + delta)).
    A bounded max/min spread across a range of n is evidence the
    envelope holds with one uniform constant.
    """
    if not report.rows:
        raise ParameterError("report has no rows")
    delta = float(delta)
    ratios: list[float] = []
    for row in report.rows:
        h = row.h
        denom = h**alpha + h**beta
        if delta > 0.0:
            denom += math.sqrt(h) + delta
        ratios.append(row.err_max / denom)
    return ratios, max(ratios) / min(ratios)
