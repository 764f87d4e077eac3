"""Problems, trajectories, and the exact and noisy explicit Euler schemes.

The scheme on a uniform mesh t_k = a + k*h, h = (b - a)/n is

    y_0 = xi,    y_{k+1} = y_k + h * g(t_k, y_k),

and its output is read as the piecewise-linear interpolant through the
nodes with the slopes actually used on each step. Under a corrupted
oracle the recursion is the same with g replaced by g + delta_g and xi
replaced by a point of the delta-ball around it; storing the slopes in
the trajectory lets the interpolant reuse the corrupted values without
querying the oracle again.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np

from .errors import IntegrationError, ParameterError

if TYPE_CHECKING:  # pragma: no cover
    from .noise import NoisyOracle

Array = np.ndarray

# sweep hook: (a, h, n, y0) -> (states, slopes, first bad step or -1)
SweepFn = Callable[[float, float, int, float], tuple[Array, Array, int]]


@dataclass(frozen=True, eq=False)
class RhsFunction:
    """Right-hand side g of an initial-value problem z' = g(t, z).

    ``eval`` must be a genuine function: deterministic in (t, y), output
    of length ``dim`` for every input. ``growth_const`` is an optional
    declared K with ||g(t, y)|| <= K(1 + ||y||) on [a, b] x R^d; when
    present the solvers assert the node bounds it implies.

    ``scalar`` and ``sweep`` are optional d=1 fast paths. ``scalar``
    must agree with ``eval`` bitwise; ``sweep`` must run the whole Euler
    recursion exactly as the generic loop would.
    """

    eval: Callable[[float, Array], Array]
    dim: int
    growth_const: float | None = None
    scalar: Callable[[float, float], float] | None = None
    sweep: SweepFn | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ParameterError(f"rhs dimension must be positive, got {self.dim}")
        if self.growth_const is not None and not (
            math.isfinite(self.growth_const) and self.growth_const >= 0.0
        ):
            raise ParameterError(
                f"growth constant must be finite and >= 0, got {self.growth_const}"
            )


@dataclass(frozen=True, eq=False)
class OdeProblem:
    """Initial-value problem z'(t) = g(t, z(t)) on [a, b], z(a) = xi."""

    a: float
    b: float
    xi: Array
    rhs: RhsFunction
    d: int

    def __post_init__(self):
        a = float(self.a)
        b = float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ParameterError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not a < b:
            raise ParameterError(f"need a < b, got a={a}, b={b}")
        xi = np.atleast_1d(np.asarray(self.xi, dtype=np.float64))
        if xi.ndim != 1:
            raise ParameterError(f"initial value must be a vector, got shape {xi.shape}")
        if not np.all(np.isfinite(xi)):
            raise ParameterError("initial value must be finite")
        if self.d != xi.shape[0]:
            raise ParameterError(
                f"dimension mismatch: d={self.d} but len(xi)={xi.shape[0]}"
            )
        if self.rhs.dim != self.d:
            raise ParameterError(
                f"dimension mismatch: rhs.dim={self.rhs.dim} but d={self.d}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "xi", xi)


def make_problem(
    f: Callable[[float, Array], Array],
    a: float,
    b: float,
    xi,
    growth_const: float | None = None,
) -> OdeProblem:
    """Wrap a plain callable as an OdeProblem; d is taken from xi."""
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    d = xi.shape[0]

    def eval_rhs(t: float, y: Array) -> Array:
        return np.asarray(f(t, y), dtype=np.float64).reshape(d)

    rhs = RhsFunction(eval=eval_rhs, dim=d, growth_const=growth_const)
    return OdeProblem(a=float(a), b=float(b), xi=xi, rhs=rhs, d=d)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Euler output: nodes t_k, states y_k, and the slopes used per step.

    The associated continuous approximation is the piecewise-linear
    function l(t) = y_k + (t - t_k) * s_k on [t_k, t_{k+1}].
    """

    a: float
    b: float
    h: float
    nodes: Array  # (n+1,)
    states: Array  # (n+1, d)
    slopes: Array  # (n, d)

    @property
    def n(self) -> int:
        return self.slopes.shape[0]

    @property
    def d(self) -> int:
        return self.states.shape[1]

    def at(self, t: float) -> Array:
        return interpolate(self, t)

    def at_many(self, ts) -> Array:
        """Interpolant values at many times; rows follow ``ts``."""
        ts = np.asarray(ts, dtype=np.float64)
        if ts.ndim != 1:
            raise ParameterError(f"expected a 1-d array of times, got shape {ts.shape}")
        if ts.size and (ts.min() < self.a or ts.max() > self.b):
            raise ParameterError(
                f"evaluation times must lie in [{self.a}, {self.b}]"
            )
        n = self.n
        idx = np.searchsorted(self.nodes, ts, side="right") - 1
        np.clip(idx, 0, n - 1, out=idx)
        out = self.states[idx] + (ts - self.nodes[idx])[:, None] * self.slopes[idx]
        # exact node hits return the stored states bit for bit
        hit_left = ts == self.nodes[idx]
        if hit_left.any():
            out[hit_left] = self.states[idx[hit_left]]
        hit_right = ts == self.nodes[idx + 1]
        if hit_right.any():
            out[hit_right] = self.states[idx[hit_right] + 1]
        return out


def _build_nodes(a: float, b: float, h: float, n: int) -> Array:
    nodes = a + h * np.arange(n + 1, dtype=np.float64)
    nodes[-1] = b
    return nodes


def interpolate(traj: Trajectory, t: float) -> Array:
    """Value of the piecewise-linear interpolant at one time in [a, b]."""
    t = float(t)
    if not (traj.a <= t <= traj.b):
        raise ParameterError(f"t={t} outside the trajectory interval [{traj.a}, {traj.b}]")
    nodes = traj.nodes
    k = int(np.searchsorted(nodes, t, side="right")) - 1
    if k < 0:
        k = 0
    elif k > traj.n - 1:
        k = traj.n - 1
    if t == nodes[k]:
        return traj.states[k].copy()
    if t == nodes[k + 1]:
        return traj.states[k + 1].copy()
    return traj.states[k] + (t - nodes[k]) * traj.slopes[k]


def _validate_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ParameterError(f"step count n must be a positive integer, got {n!r}")
    return int(n)


def _check_node_bound(problem: OdeProblem, states: Array, noisy: bool) -> None:
    """Assert the a-priori node bound implied by a declared growth constant.

    Exact scheme: ||y_k|| <= e^{K(b-a)} (1 + ||xi||).
    Corrupted scheme (delta <= 1): ||y_k|| <= 2 e^{(b-a)(K+1)} (1 + ||xi||).
    Compared in log space; the bound itself can overflow a float.
    """
    K = problem.rhs.growth_const
    if K is None:
        return
    max_norm = float(np.linalg.norm(states, axis=1).max())
    if max_norm == 0.0:
        return
    span = problem.b - problem.a
    log_xi = math.log1p(float(np.linalg.norm(problem.xi)))
    if noisy:
        log_bound = math.log(2.0) + span * (K + 1.0) + log_xi
    else:
        log_bound = K * span + log_xi
    if math.log(max_norm) > log_bound + 1e-12:
        raise ParameterError(
            f"node norm {max_norm!r} exceeds the guaranteed bound for declared "
            f"growth constant K={K}; the declared constant does not hold"
        )


def euler_solve(problem: OdeProblem, n: int) -> Trajectory:
    """Explicit Euler under exact information; exactly n rhs evaluations."""
    n = _validate_n(n)
    a, b = problem.a, problem.b
    h = (b - a) / n
    d = problem.d
    rhs = problem.rhs

    if rhs.sweep is not None and d == 1:
        flat_states, flat_slopes, bad = rhs.sweep(a, h, n, float(problem.xi[0]))
        if bad >= 0:
            raise IntegrationError(bad, a + bad * h, flat_states[bad])
        states = flat_states.reshape(n + 1, 1)
        slopes = flat_slopes.reshape(n, 1)
    else:
        states = np.empty((n + 1, d), dtype=np.float64)
        slopes = np.empty((n, d), dtype=np.float64)
        y = problem.xi.copy()
        states[0] = y
        for k in range(n):
            t = a + k * h
            s = np.asarray(rhs.eval(t, y), dtype=np.float64)
            if s.shape != (d,):
                raise ParameterError(
                    f"rhs returned shape {s.shape}, expected ({d},)"
                )
            if not np.all(np.isfinite(s)):
                raise IntegrationError(k, t, y.copy())
            slopes[k] = s
            y = y + h * s
            states[k + 1] = y

    _check_node_bound(problem, states, noisy=False)
    return Trajectory(a=a, b=b, h=h, nodes=_build_nodes(a, b, h, n), states=states, slopes=slopes)


def euler_solve_noisy(problem: OdeProblem, n: int, oracle: "NoisyOracle") -> Trajectory:
    """Explicit Euler driven by a corrupted oracle.

    States start at the oracle's perturbed initial value and advance with
    the corrupted slopes, which are also what the trajectory stores. At
    precision zero the corruption class collapses to {(xi, g)}, so the
    run short-circuits to the exact scheme and equality is bitwise.
    """
    n = _validate_n(n)
    if oracle.base is not problem.rhs:
        raise ParameterError("oracle was not built over this problem's rhs")

    delta = oracle.corruption.delta
    if delta == 0.0:
        if not np.array_equal(oracle.xi_tilde, problem.xi):
            raise ParameterError("zero-precision oracle carries a shifted initial value")
        return euler_solve(problem, n)

    a, b = problem.a, problem.b
    h = (b - a) / n
    d = problem.d
    xi_t = np.atleast_1d(np.asarray(oracle.xi_tilde, dtype=np.float64))
    if xi_t.shape != (d,):
        raise ParameterError(f"oracle initial value has shape {xi_t.shape}, expected ({d},)")

    scalar_tilde = oracle.scalar_tilde if d == 1 else None
    states = np.empty((n + 1, d), dtype=np.float64)
    slopes = np.empty((n, d), dtype=np.float64)

    if scalar_tilde is not None:
        y = float(xi_t[0])
        states[0, 0] = y
        for k in range(n):
            t = a + k * h
            s = scalar_tilde(t, y)
            if not math.isfinite(s):
                raise IntegrationError(k, t, y)
            slopes[k, 0] = s
            y = y + h * s
            states[k + 1, 0] = y
    else:
        y = xi_t.copy()
        states[0] = y
        for k in range(n):
            t = a + k * h
            s = oracle.eval_tilde(t, y)
            if not np.all(np.isfinite(s)):
                raise IntegrationError(k, t, y.copy())
            slopes[k] = s
            y = y + h * s
            states[k + 1] = y

    _check_node_bound(problem, states, noisy=True)
    return Trajectory(a=a, b=b, h=h, nodes=_build_nodes(a, b, h, n), states=states, slopes=slopes)
