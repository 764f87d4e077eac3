"""Batch front-end: config-driven studies, CSV tables, SVG rate plots.

One JSON file describes one reproducible experiment:

    {
      "problem": {
        "name": "additive",                  // additive | multiplicative | linear-test
        "params": {"A": 2.0, "B1": -2.0, "B2": -0.5,
                    "alpha": 1.0, "rho1": 1.0, "rho2": 0.75},
        "a": 0.0, "b": 10.0, "xi": 3.0
      },
      "convergence": {
        "n_list": [64, 128, ...],            // default 2^4 .. 2^14
        "delta_list": [0.0, 0.001, 0.01, 0.1],
        "kind": "hashed",                    // zero | constant | hashed | adversarial-sign
        "mc_tries": 200, "factor": 1000, "base_seed": 0,
        "fit_range": "full",                 // or "pre-plateau" / "stable"
        "perturb_xi": true,
        "csv": "rates.csv", "svg": "rates.svg"
      },
      "check": {"R": 5.0, "alpha": 1.0, "beta": 0.75,
                 "samples": 10000, "seed": 0},
      "solve": {"n": 1024, "delta": 0.0, "kind": "hashed", "seed": 0,
                 "csv": "trajectory.csv"}
    }

Subcommands read the section they need; extra sections are allowed. The
CSV is the artifact of record; plotting failures only warn.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .core import OdeProblem, Trajectory, euler_solve, euler_solve_noisy
from .errors import ConfigError, EulerLabError, ParameterError
from .experiments import ConvergenceReport, StudyRow, convergence_study
from .noise import KINDS, make_oracle
from .problems import PROBLEM_NAMES, build_problem, estimate_assumptions

_DEFAULT_N_LIST = [2**k for k in range(4, 15)]


@dataclass(frozen=True)
class ConvergenceSection:
    n_list: tuple[int, ...]
    delta_list: tuple[float, ...]
    kind: str = "hashed"
    mc_tries: int = 200
    factor: int = 1000
    base_seed: int = 0
    fit_range: str = "full"
    perturb_xi: bool = True
    csv: str = "convergence.csv"
    svg: str | None = None


@dataclass(frozen=True)
class CheckSection:
    R: float
    alpha: float
    beta: float
    samples: int = 10000
    seed: int = 0


@dataclass(frozen=True)
class SolveSection:
    n: int
    delta: float = 0.0
    kind: str = "hashed"
    seed: int = 0
    csv: str = "trajectory.csv"


@dataclass(frozen=True)
class ExperimentConfig:
    problem_name: str
    problem_params: dict
    a: float
    b: float
    xi: tuple[float, ...]
    convergence: ConvergenceSection | None = None
    check: CheckSection | None = None
    solve: SolveSection | None = None

    def build_problem(self) -> OdeProblem:
        return build_problem(
            self.problem_name, dict(self.problem_params), self.a, self.b, list(self.xi)
        )


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _get(obj: dict, field: str, path: str, required: bool = True, default=None):
    if field not in obj:
        if required:
            raise ConfigError("required field is missing", field=f"{path}.{field}")
        return default
    return obj[field]


def _get_number(obj: dict, field: str, path: str, required=True, default=None) -> float:
    v = _get(obj, field, path, required, default)
    if v is default and not required:
        return default
    if not _is_number(v):
        raise ConfigError(f"expected a number, got {v!r}", field=f"{path}.{field}")
    return float(v)


def _get_int(obj: dict, field: str, path: str, required=True, default=None) -> int:
    v = _get(obj, field, path, required, default)
    if v is default and not required:
        return default
    if not _is_int(v):
        raise ConfigError(f"expected an integer, got {v!r}", field=f"{path}.{field}")
    return int(v)


def _get_str(obj: dict, field: str, path: str, required=True, default=None) -> str:
    v = _get(obj, field, path, required, default)
    if v is default and not required:
        return default
    if not isinstance(v, str):
        raise ConfigError(f"expected a string, got {v!r}", field=f"{path}.{field}")
    return v


def _parse_convergence(section: dict) -> ConvergenceSection:
    path = "convergence"
    if not isinstance(section, dict):
        raise ConfigError("expected an object", field=path)
    raw_n = _get(section, "n_list", path, required=False, default=_DEFAULT_N_LIST)
    if not isinstance(raw_n, list) or not raw_n:
        raise ConfigError("expected a non-empty list", field=f"{path}.n_list")
    n_list = []
    for i, v in enumerate(raw_n):
        if not _is_int(v) or v < 1:
            raise ConfigError(
                f"expected a positive integer, got {v!r}", field=f"{path}.n_list[{i}]"
            )
        if n_list and v <= n_list[-1]:
            raise ConfigError(
                f"entries must be strictly increasing, got {v} after {n_list[-1]}",
                field=f"{path}.n_list[{i}]",
            )
        n_list.append(v)

    raw_d = _get(section, "delta_list", path, required=False, default=[0.0])
    if not isinstance(raw_d, list) or not raw_d:
        raise ConfigError("expected a non-empty list", field=f"{path}.delta_list")
    delta_list = []
    for i, v in enumerate(raw_d):
        if not _is_number(v) or not (0.0 <= v <= 1.0):
            raise ConfigError(
                f"expected a number in [0, 1], got {v!r}",
                field=f"{path}.delta_list[{i}]",
            )
        delta_list.append(float(v))

    kind = _get_str(section, "kind", path, required=False, default="hashed")
    if kind not in KINDS:
        raise ConfigError(
            f"unknown kind {kind!r}; valid kinds: {KINDS}", field=f"{path}.kind"
        )
    mc_tries = _get_int(section, "mc_tries", path, required=False, default=200)
    if mc_tries < 1:
        raise ConfigError("must be >= 1", field=f"{path}.mc_tries")
    factor = _get_int(section, "factor", path, required=False, default=1000)
    if factor < 1:
        raise ConfigError("must be >= 1", field=f"{path}.factor")
    base_seed = _get_int(section, "base_seed", path, required=False, default=0)
    fit_range = _get_str(section, "fit_range", path, required=False, default="full")
    if fit_range not in ("full", "pre-plateau", "stable"):
        raise ConfigError(
            f"expected 'full', 'pre-plateau', or 'stable', got {fit_range!r}",
            field=f"{path}.fit_range",
        )
    perturb_xi = _get(section, "perturb_xi", path, required=False, default=True)
    if not isinstance(perturb_xi, bool):
        raise ConfigError("expected a boolean", field=f"{path}.perturb_xi")
    csv_path = _get_str(section, "csv", path, required=False, default="convergence.csv")
    svg_path = _get_str(section, "svg", path, required=False, default=None)
    if svg_path is None:
        svg_path = str(Path(csv_path).with_suffix(".svg"))
    return ConvergenceSection(
        n_list=tuple(n_list),
        delta_list=tuple(delta_list),
        kind=kind,
        mc_tries=mc_tries,
        factor=factor,
        base_seed=base_seed,
        fit_range=fit_range,
        perturb_xi=perturb_xi,
        csv=csv_path,
        svg=svg_path,
    )


def _parse_check(section: dict) -> CheckSection:
    path = "check"
    if not isinstance(section, dict):
        raise ConfigError("expected an object", field=path)
    R = _get_number(section, "R", path)
    alpha = _get_number(section, "alpha", path)
    beta = _get_number(section, "beta", path)
    samples = _get_int(section, "samples", path, required=False, default=10000)
    seed = _get_int(section, "seed", path, required=False, default=0)
    if R <= 0.0:
        raise ConfigError("must be > 0", field=f"{path}.R")
    return CheckSection(R=R, alpha=alpha, beta=beta, samples=samples, seed=seed)


def _parse_solve(section: dict) -> SolveSection:
    path = "solve"
    if not isinstance(section, dict):
        raise ConfigError("expected an object", field=path)
    n = _get_int(section, "n", path)
    if n < 1:
        raise ConfigError("must be >= 1", field=f"{path}.n")
    delta = _get_number(section, "delta", path, required=False, default=0.0)
    if not (0.0 <= delta <= 1.0):
        raise ConfigError("must lie in [0, 1]", field=f"{path}.delta")
    kind = _get_str(section, "kind", path, required=False, default="hashed")
    if kind not in KINDS:
        raise ConfigError(
            f"unknown kind {kind!r}; valid kinds: {KINDS}", field=f"{path}.kind"
        )
    seed = _get_int(section, "seed", path, required=False, default=0)
    csv_path = _get_str(section, "csv", path, required=False, default="trajectory.csv")
    return SolveSection(n=n, delta=delta, kind=kind, seed=seed, csv=csv_path)


def load_config(path) -> ExperimentConfig:
    """Parse and validate one experiment config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    try:
        root = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(root, dict):
        raise ConfigError("top-level value must be an object")

    prob = _get(root, "problem", "", required=True)
    if not isinstance(prob, dict):
        raise ConfigError("expected an object", field="problem")
    name = _get_str(prob, "name", "problem")
    if name not in PROBLEM_NAMES:
        raise ConfigError(
            f"unknown problem {name!r}; valid names: {PROBLEM_NAMES}",
            field="problem.name",
        )
    params = _get(prob, "params", "problem", required=False, default={})
    if not isinstance(params, dict):
        raise ConfigError("expected an object", field="problem.params")
    a = _get_number(prob, "a", "problem")
    b = _get_number(prob, "b", "problem")
    if not a < b:
        raise ConfigError(f"need a < b, got a={a}, b={b}", field="problem")
    raw_xi = _get(prob, "xi", "problem")
    if _is_number(raw_xi):
        xi = (float(raw_xi),)
    elif isinstance(raw_xi, list) and raw_xi and all(_is_number(v) for v in raw_xi):
        xi = tuple(float(v) for v in raw_xi)
    else:
        raise ConfigError(
            f"expected a number or non-empty list of numbers, got {raw_xi!r}",
            field="problem.xi",
        )

    convergence = check = solve = None
    if "convergence" in root:
        convergence = _parse_convergence(root["convergence"])
    if "check" in root:
        check = _parse_check(root["check"])
    if "solve" in root:
        solve = _parse_solve(root["solve"])
    return ExperimentConfig(
        problem_name=name,
        problem_params=params,
        a=a,
        b=b,
        xi=xi,
        convergence=convergence,
        check=check,
        solve=solve,
    )


def _fmt(x: float) -> str:
    """Full double precision: 17 significant digits round-trip exactly."""
    return format(float(x), ".17g")


def write_report_csv(path, reports: list[ConvergenceReport]) -> None:
    """All series in one table; the delta column separates them."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "h", "delta", "err_max", "err_mean", "mc_tries"])
        for report in reports:
            for row in report.rows:
                writer.writerow(
                    [
                        row.n,
                        _fmt(row.h),
                        _fmt(row.delta),
                        _fmt(row.err_max),
                        _fmt(row.err_mean),
                        row.mc_tries,
                    ]
                )


def read_report_csv(path) -> list[StudyRow]:
    """Inverse of write_report_csv, for round-trip checks and reuse."""
    rows: list[StudyRow] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["n", "h", "delta", "err_max", "err_mean", "mc_tries"]:
            raise ConfigError(f"unexpected CSV header: {header}")
        for rec in reader:
            rows.append(
                StudyRow(
                    int(rec[0]),
                    float(rec[1]),
                    float(rec[2]),
                    float(rec[3]),
                    float(rec[4]),
                    int(rec[5]),
                )
            )
    return rows


def write_trajectory_csv(path, traj: Trajectory) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + [f"y_{j}" for j in range(traj.d)])
        for k in range(traj.n + 1):
            writer.writerow([_fmt(traj.nodes[k])] + [_fmt(v) for v in traj.states[k]])


def _plot_reports(path, reports: list[ConvergenceReport], title: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for report in reports:
        delta = report.rows[0].delta
        x = np.log10([row.n for row in report.rows])
        y = -np.log10([row.err_max for row in report.rows])
        (line,) = ax.plot(
            x, y, "o-", label=f"delta={delta:g} (slope {report.slope:.3f})"
        )
        xs = np.array([x.min(), x.max()])
        ax.plot(
            xs,
            report.slope * xs + report.intercept,
            "--",
            color=line.get_color(),
            alpha=0.6,
        )
    ax.set_xlabel("log10(n)")
    ax.set_ylabel("-log10(err_max)")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _resolve(out_dir: Path, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() else out_dir / p


def run_config(
    config: ExperimentConfig,
    out_dir=".",
    plot: bool = True,
    quiet: bool = False,
    stdout=None,
) -> list[ConvergenceReport]:
    """Run every delta series of the config's convergence section.

    Writes the CSV (and the SVG unless disabled) only after all series
    completed, so failed runs leave no partial artifacts. Returns the
    reports, one per delta.
    """
    stdout = stdout or sys.stdout
    if config.convergence is None:
        raise ConfigError("config has no 'convergence' section")
    section = config.convergence
    problem = config.build_problem()

    reports = []
    for delta in section.delta_list:
        reports.append(
            convergence_study(
                problem,
                list(section.n_list),
                delta,
                kind=section.kind,
                mc_tries=section.mc_tries,
                factor=section.factor,
                base_seed=section.base_seed,
                fit_range=section.fit_range,
                perturb_xi=section.perturb_xi,
            )
        )

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = _resolve(out_dir, section.csv)
    write_report_csv(csv_path, reports)
    if not quiet:
        for report in reports:
            print(
                f"slope delta={report.rows[0].delta:g}: {report.slope:.6f}",
                file=stdout,
            )
        print(f"wrote {csv_path}", file=stdout)
    if plot:
        svg_path = _resolve(out_dir, section.svg)
        try:
            _plot_reports(svg_path, reports, config.problem_name)
            if not quiet:
                print(f"wrote {svg_path}", file=stdout)
        except Exception as exc:  # CSV is the artifact of record
            print(f"warning: SVG plot failed: {exc}", file=sys.stderr)
    return reports


def run_check(config: ExperimentConfig, quiet: bool = False, stdout=None):
    stdout = stdout or sys.stdout
    if config.check is None:
        raise ConfigError("config has no 'check' section")
    section = config.check
    problem = config.build_problem()
    est = estimate_assumptions(
        problem,
        section.R,
        section.alpha,
        section.beta,
        section.samples,
        section.seed,
    )
    if not quiet:
        print(
            f"assumption estimates for {config.problem_name} on B_0({est.R:g}), "
            f"{est.samples} samples, alpha={est.alpha:g}, beta={est.beta:g}",
            file=stdout,
        )
        print(f"K_hat: {est.K_hat:.9g}", file=stdout)
        print(f"H_hat: {est.H_hat:.9g}", file=stdout)
        print(f"L_hat: {est.L_hat:.9g}", file=stdout)
    return est


def run_solve(
    config: ExperimentConfig, out_dir=".", quiet: bool = False, stdout=None
) -> Trajectory:
    stdout = stdout or sys.stdout
    if config.solve is None:
        raise ConfigError("config has no 'solve' section")
    section = config.solve
    problem = config.build_problem()
    if section.delta > 0.0:
        oracle = make_oracle(problem, section.kind, section.delta, section.seed)
        traj = euler_solve_noisy(problem, section.n, oracle)
    else:
        traj = euler_solve(problem, section.n)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = _resolve(out_dir, section.csv)
    write_trajectory_csv(csv_path, traj)
    if not quiet:
        print(f"wrote {csv_path}", file=stdout)
    return traj


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", type=Path, help="experiment config (JSON)")
    common.add_argument(
        "--out-dir", type=Path, default=Path("."), help="directory for output files"
    )
    common.add_argument(
        "--no-plot", action="store_true", help="skip the SVG plot (CSV only)"
    )
    common.add_argument(
        "--seed", type=int, default=None, help="override the config's seed"
    )
    common.add_argument(
        "--quiet", action="store_true", help="suppress informational output"
    )

    parser = argparse.ArgumentParser(
        prog="eulerlab",
        description="Euler-scheme convergence experiments under exact and "
        "noisy right-hand-side oracles",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser(
        "convergence",
        parents=[common],
        help="run the convergence studies and write CSV/SVG",
    )
    sub.add_parser(
        "check",
        parents=[common],
        help="estimate assumption constants on a ball",
    )
    sub.add_parser(
        "solve",
        parents=[common],
        help="integrate once and dump the trajectory as CSV",
    )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.command == "convergence":
            if config.convergence is None:
                raise ConfigError("config has no 'convergence' section")
            if args.seed is not None:
                config = replace(
                    config,
                    convergence=replace(config.convergence, base_seed=args.seed),
                )
            run_config(
                config,
                out_dir=args.out_dir,
                plot=not args.no_plot,
                quiet=args.quiet,
            )
        elif args.command == "check":
            if config.check is None:
                raise ConfigError("config has no 'check' section")
            if args.seed is not None:
                config = replace(config, check=replace(config.check, seed=args.seed))
            run_check(config, quiet=args.quiet)
        else:
            if config.solve is None:
                raise ConfigError("config has no 'solve' section")
            if args.seed is not None:
                config = replace(config, solve=replace(config.solve, seed=args.seed))
            run_solve(config, out_dir=args.out_dir, quiet=args.quiet)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EulerLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
