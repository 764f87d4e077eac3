"""Benchmark right-hand-side families and assumption-constant estimators.

Two scalar families exercise the irregular regime the scheme is built
for: an additive one mixing a smooth oscillatory term with dissipative
signed-power terms, and a multiplicative one whose time factor is merely
Hölder continuous. Both are continuous but not Lipschitz at x = 0, odd
in x, and exactly zero at x = 0 (sgn(0) = 0 and |0|^p = 0 by
convention, which removes the origin singularity without branching).

The estimators probe the structural assumptions numerically: linear
growth, one-sided Lipschitz, and (alpha, beta)-Hölder constants are
estimated as maxima of the defining ratios over seeded quasi-random
pairs. They are sampled lower bounds for the true constants; they
validate class membership qualitatively and certify nothing.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import norm as _norm
from scipy.stats import qmc as _qmc

from . import _kernels
from .core import Array, OdeProblem, RhsFunction
from .errors import EvaluationError, ParameterError


def _require_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 < value <= 1.0):
        raise ParameterError(f"{name} must lie in (0, 1], got {value}")
    return value


@dataclass(frozen=True)
class AdditiveParams:
    """Coefficients of A|t|^alpha x sin(x^2+1) + B1 sgn(x)|x|^rho1 + B2 sgn(x)|x|^rho2.

    B1, B2 <= 0 so every power term is dissipative; with positive
    coefficients the family leaves the class the error bounds cover, so
    such values are rejected rather than silently accepted.
    """

    A: float
    B1: float
    B2: float
    alpha: float
    rho1: float
    rho2: float

    def __post_init__(self):
        for name in ("A", "B1", "B2"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if self.B1 > 0.0 or self.B2 > 0.0:
            raise ParameterError(
                f"B1 and B2 must be <= 0, got B1={self.B1}, B2={self.B2}"
            )
        object.__setattr__(self, "alpha", _require_unit_interval("alpha", self.alpha))
        object.__setattr__(self, "rho1", _require_unit_interval("rho1", self.rho1))
        object.__setattr__(self, "rho2", _require_unit_interval("rho2", self.rho2))


@dataclass(frozen=True, eq=False)
class MultiplicativeParams:
    """Data of gamma(t) * (-sgn(x)|x|^rho) * f(x).

    The callables come with declared analytic facts that the builder
    spot-checks on grids: gamma >= 0 with (gamma_alpha)-Hölder constant
    gamma_L, and 0 <= f <= f_bound with Lipschitz constant f_lip.
    ``kernel_par`` marks instances whose pieces match the compiled
    family formula, unlocking the jitted fast path.
    """

    gamma: Callable[[float], float]
    rho: float
    f: Callable[[float], float]
    gamma_alpha: float
    gamma_L: float
    f_bound: float
    f_lip: float
    kernel_par: tuple[float, float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "rho", _require_unit_interval("rho", self.rho))
        object.__setattr__(
            self, "gamma_alpha", _require_unit_interval("gamma_alpha", self.gamma_alpha)
        )
        for name in ("gamma_L", "f_bound", "f_lip"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v >= 0.0):
                raise ParameterError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class AssumptionEstimate:
    """Sampled estimates of the class constants on the ball B_0(R).

    Maxima of the defining ratios over the sampled pairs, hence lower
    bounds for the true constants. K_hat and L_hat are >= 0 by
    construction; H_hat may be negative (dissipative drifts).
    """

    R: float
    K_hat: float
    H_hat: float
    L_hat: float
    samples: int
    alpha: float
    beta: float


def _family_scalar(family: int, par: Array) -> Callable[[float, float], float]:
    rhs = _kernels.family_rhs

    def scalar(t: float, x: float) -> float:
        return rhs(family, t, x, par)

    return scalar


def _family_rhs_function(
    family: int, par: Array, growth_const: float | None
) -> RhsFunction:
    scalar = _family_scalar(family, par)
    sweep_kernel = _kernels.euler_sweep

    def eval_rhs(t: float, y: Array) -> Array:
        return np.array([scalar(t, float(y[0]))])

    def sweep(a: float, h: float, n: int, y0: float):
        return sweep_kernel(family, a, h, n, y0, par)

    return RhsFunction(
        eval=eval_rhs,
        dim=1,
        growth_const=growth_const,
        scalar=scalar,
        sweep=sweep,
    )


def _as_scalar_xi(xi) -> Array:
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    if xi.shape != (1,):
        raise ParameterError(
            f"this family is scalar (d=1); got initial value of shape {xi.shape}"
        )
    return xi


def additive_problem(
    params: AdditiveParams,
    a: float,
    b: float,
    xi,
    growth_const: float | None = None,
) -> OdeProblem:
    """Scalar problem with rhs A|t|^alpha x sin(x^2+1) + sum_i Bi sgn(x)|x|^rhoi.

    Unless overridden, the declared growth constant is the analytic one:
    |A| T^alpha + |B1| + |B2| with T = max(|a|, |b|), using |x|^p <= 1+|x|.
    """
    if not isinstance(params, AdditiveParams):
        raise ParameterError(f"expected AdditiveParams, got {type(params).__name__}")
    xi = _as_scalar_xi(xi)
    par = np.array(
        [params.A, params.B1, params.B2, params.alpha, params.rho1, params.rho2]
    )
    if growth_const is None:
        t_max = max(abs(float(a)), abs(float(b)))
        growth_const = (
            abs(params.A) * t_max ** params.alpha + abs(params.B1) + abs(params.B2)
        )
    rhs = _family_rhs_function(_kernels.ADDITIVE, par, growth_const)
    return OdeProblem(a=float(a), b=float(b), xi=xi, rhs=rhs, d=1)


def multiplicative_instance(
    scale: float = 0.3,
    rho: float = 2.0 / 3.0,
    gamma_exponent: float = 2.0 / 3.0,
) -> MultiplicativeParams:
    """The concrete family member scale*|sin(pi t + 1)|^e * (-sgn(x)|x|^rho) * |cos(x)|.

    gamma(t) = scale*|sin(pi t + 1)|^e is e-Hölder with constant
    scale*pi^e (chain the 1-Lipschitz sine with | |u|^e - |v|^e | <=
    |u - v|^e); f = |cos| is bounded by 1 and 1-Lipschitz.
    """
    scale = float(scale)
    if not (math.isfinite(scale) and scale >= 0.0):
        raise ParameterError(f"scale must be finite and >= 0, got {scale}")
    rho = _require_unit_interval("rho", rho)
    gamma_exponent = _require_unit_interval("gamma_exponent", gamma_exponent)
    pow_abs = _kernels.pow_abs

    def gamma(t: float) -> float:
        return scale * pow_abs(math.sin(math.pi * t + 1.0), gamma_exponent)

    def f(x: float) -> float:
        return abs(math.cos(abs(x)))

    return MultiplicativeParams(
        gamma=gamma,
        rho=rho,
        f=f,
        gamma_alpha=gamma_exponent,
        gamma_L=scale * math.pi ** gamma_exponent,
        f_bound=1.0,
        f_lip=1.0,
        kernel_par=(scale, rho, gamma_exponent),
    )


def multiplicative_problem(
    params: MultiplicativeParams,
    a: float,
    b: float,
    xi,
    growth_const: float | None = None,
) -> OdeProblem:
    """Scalar problem with rhs gamma(t) * (-sgn(x)|x|^rho) * f(x).

    Declared facts are spot-checked on grids: gamma >= 0 on [a, b] and
    0 <= f <= f_bound on a state range around xi. The default growth
    constant is f_bound * sup gamma, with the grid supremum padded by
    the declared Hölder modulus over half a grid cell.
    """
    if not isinstance(params, MultiplicativeParams):
        raise ParameterError(
            f"expected MultiplicativeParams, got {type(params).__name__}"
        )
    xi = _as_scalar_xi(xi)
    a = float(a)
    b = float(b)

    t_grid = np.linspace(a, b, 513)
    gamma_vals = np.array([params.gamma(float(t)) for t in t_grid])
    if not np.all(np.isfinite(gamma_vals)):
        raise ParameterError("gamma is not finite on the time grid")
    if gamma_vals.min() < 0.0:
        t_bad = float(t_grid[int(gamma_vals.argmin())])
        raise ParameterError(f"gamma must be >= 0; gamma({t_bad}) = {gamma_vals.min()}")

    x_span = max(10.0, 2.0 * (1.0 + abs(float(xi[0]))))
    x_grid = np.linspace(-x_span, x_span, 513)
    f_vals = np.array([params.f(float(x)) for x in x_grid])
    if not np.all(np.isfinite(f_vals)):
        raise ParameterError("f is not finite on the state grid")
    if f_vals.min() < 0.0 or f_vals.max() > params.f_bound:
        raise ParameterError(
            f"f must satisfy 0 <= f <= {params.f_bound}; observed range "
            f"[{f_vals.min()}, {f_vals.max()}]"
        )

    if growth_const is None:
        half_cell = 0.5 * (b - a) / (len(t_grid) - 1)
        sup_gamma = float(gamma_vals.max()) + params.gamma_L * half_cell ** params.gamma_alpha
        growth_const = params.f_bound * sup_gamma

    if params.kernel_par is not None:
        par = np.array(params.kernel_par)
        rhs = _family_rhs_function(_kernels.MULTIPLICATIVE, par, growth_const)
    else:
        gamma_fn = params.gamma
        f_fn = params.f
        rho = params.rho
        pow_abs = _kernels.pow_abs
        sign = _kernels.sign

        def scalar(t: float, x: float) -> float:
            return gamma_fn(t) * (-sign(x) * pow_abs(x, rho)) * f_fn(x)

        def eval_rhs(t: float, y: Array) -> Array:
            return np.array([scalar(t, float(y[0]))])

        rhs = RhsFunction(
            eval=eval_rhs, dim=1, growth_const=growth_const, scalar=scalar
        )
    return OdeProblem(a=a, b=b, xi=xi, rhs=rhs, d=1)


def linear_problem(
    rate: float = 1.0,
    a: float = 0.0,
    b: float = 1.0,
    xi=1.0,
) -> OdeProblem:
    """g(t, x) = rate * x; the smooth control case with known solution."""
    rate = float(rate)
    if not math.isfinite(rate):
        raise ParameterError(f"rate must be finite, got {rate}")
    xi = _as_scalar_xi(xi)
    par = np.array([rate])
    rhs = _family_rhs_function(_kernels.LINEAR, par, growth_const=abs(rate))
    return OdeProblem(a=float(a), b=float(b), xi=xi, rhs=rhs, d=1)


PROBLEM_NAMES = ("additive", "multiplicative", "linear-test")


def build_problem(name: str, params: dict, a: float, b: float, xi) -> OdeProblem:
    """Construct a registered problem from plain config data."""
    if name == "additive":
        try:
            p = AdditiveParams(**params)
        except TypeError as exc:
            raise ParameterError(f"bad additive parameters: {exc}") from None
        return additive_problem(p, a, b, xi)
    if name == "multiplicative":
        try:
            p = multiplicative_instance(**params)
        except TypeError as exc:
            raise ParameterError(f"bad multiplicative parameters: {exc}") from None
        return multiplicative_problem(p, a, b, xi)
    if name == "linear-test":
        try:
            return linear_problem(a=a, b=b, xi=xi, **params)
        except TypeError as exc:
            raise ParameterError(f"bad linear-test parameters: {exc}") from None
    raise ParameterError(f"unknown problem {name!r}; valid names: {PROBLEM_NAMES}")


def _ball_point(R: float, u_radius: float, u_dir: Array) -> Array:
    """Map unit-cube coordinates to a point of B_0(R), uniformly."""
    d = u_dir.shape[0]
    if d == 1:
        sign = 1.0 if u_dir[0] >= 0.5 else -1.0
        return np.array([R * u_radius * sign])
    g = _norm.ppf(np.clip(u_dir, 1e-15, 1.0 - 1e-15))
    nrm = float(np.linalg.norm(g))
    if nrm == 0.0:  # pragma: no cover
        g = np.zeros(d)
        g[0] = 1.0
        nrm = 1.0
    return (R * u_radius ** (1.0 / d) / nrm) * g


def _sphere_dir(u_dir: Array) -> Array:
    d = u_dir.shape[0]
    if d == 1:
        return np.array([1.0 if u_dir[0] >= 0.5 else -1.0])
    g = _norm.ppf(np.clip(u_dir, 1e-15, 1.0 - 1e-15))
    nrm = float(np.linalg.norm(g))
    if nrm == 0.0:  # pragma: no cover
        g = np.zeros(d)
        g[0] = 1.0
        nrm = 1.0
    return g / nrm


def estimate_assumptions(
    problem: OdeProblem,
    R: float,
    alpha: float,
    beta: float,
    samples: int,
    seed: int,
) -> AssumptionEstimate:
    """Estimate linear-growth, one-sided-Lipschitz, and Hölder constants.

    Over seeded quasi-random pairs (t, t', y, y') with y, y' in B_0(R):

        K_hat = max ||g(t,y)|| / (1 + ||y||)
        H_hat = max <y-y', g(t,y)-g(t,y')> / ||y-y'||^2   (same t)
        L_hat = max ||g(t,y)-g(t',y')|| / (|t-t'|^alpha + ||y-y'||^beta)

    Odd sample indices refine the near-diagonal band ||y-y'|| in
    [1e-6, 1e-2] where Hölder ratios peak; plain quadruples and the
    refinement interleave so estimates grow monotonically along one
    nested sequence. H_hat skips pairs with ||y-y'|| < 1e-10.
    """
    R = float(R)
    if not (R > 0.0 and math.isfinite(R)):
        raise ParameterError(f"ball radius R must be positive, got {R}")
    alpha = _require_unit_interval("alpha", alpha)
    if not (0.0 < float(beta) and math.isfinite(float(beta))):
        raise ParameterError(f"beta must be positive, got {beta}")
    beta = float(beta)
    if samples < 1000:
        raise ParameterError(f"need samples >= 1000, got {samples}")
    samples = int(samples)

    a, b, d = problem.a, problem.b, problem.d
    span = b - a
    scalar = problem.rhs.scalar if d == 1 else None
    eval_rhs = problem.rhs.eval

    def g_at(t: float, y: Array) -> Array:
        if scalar is not None:
            v = np.array([scalar(t, float(y[0]))])
        else:
            v = np.asarray(eval_rhs(t, y), dtype=np.float64)
        if not np.all(np.isfinite(v)):
            raise EvaluationError(f"rhs not finite at (t={t!r}, y={y!r})")
        return v

    sobol_dim = 4 + 2 * d
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        engine = _qmc.Sobol(d=sobol_dim, scramble=True, seed=seed)
        cube = engine.random(samples)

    r_hi = min(1e-2, R)
    r_lo = min(1e-6, r_hi)
    log_lo, log_hi = math.log10(r_lo), math.log10(r_hi)

    K_hat = 0.0
    H_hat = -math.inf
    L_hat = 0.0

    for i in range(samples):
        u = cube[i]
        t1 = a + span * u[0]
        y1 = _ball_point(R, u[2], u[3 : 3 + d])
        g11 = g_at(t1, y1)
        K_hat = max(K_hat, float(np.linalg.norm(g11)) / (1.0 + float(np.linalg.norm(y1))))

        if i % 2 == 0:
            t2 = a + span * u[1]
            y2 = _ball_point(R, u[3 + d], u[4 + d : 4 + 2 * d])
        else:
            t2 = t1
            r = 10.0 ** (log_lo + (log_hi - log_lo) * u[1])
            y2 = y1 + r * _sphere_dir(u[4 + d : 4 + 2 * d])
            if float(np.linalg.norm(y2)) > R:
                y2 = y1 - r * _sphere_dir(u[4 + d : 4 + 2 * d])
            if float(np.linalg.norm(y2)) > R:  # pragma: no cover - tiny-ball corner
                y2 = y2 * (R / float(np.linalg.norm(y2)))

        g22 = g_at(t2, y2)
        K_hat = max(K_hat, float(np.linalg.norm(g22)) / (1.0 + float(np.linalg.norm(y2))))

        dy = y1 - y2
        ny = float(np.linalg.norm(dy))

        if t2 == t1:
            g12 = g22
        else:
            g12 = g_at(t1, y2)
            K_hat = max(
                K_hat, float(np.linalg.norm(g12)) / (1.0 + float(np.linalg.norm(y2)))
            )
            denom = abs(t1 - t2) ** alpha + ny**beta
            if denom > 0.0:
                L_hat = max(
                    L_hat, float(np.linalg.norm(g11 - g22)) / denom
                )

        # same-t ratios: one-sided Lipschitz and the pure-state Hölder term
        if ny >= 1e-10:
            H_hat = max(H_hat, float(np.dot(dy, g11 - g12)) / ny**2)
        if ny > 0.0:
            L_hat = max(L_hat, float(np.linalg.norm(g11 - g12)) / ny**beta)

    return AssumptionEstimate(
        R=R,
        K_hat=K_hat,
        H_hat=H_hat,
        L_hat=L_hat,
        samples=samples,
        alpha=alpha,
        beta=beta,
    )
