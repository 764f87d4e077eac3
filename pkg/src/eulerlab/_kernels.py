"""Compiled kernels for the scalar benchmark families.

Everything here is optional speed: the generic solver and error scan in
:mod:`eulerlab.core` and :mod:`eulerlab.experiments` work on plain
callables. But convergence studies drive reference meshes three orders of
magnitude finer than the coarsest approximation, so the built-in scalar
families route through these jitted loops instead. The Python-level
right-hand sides wrap the same kernels, which keeps slow-path and
fast-path evaluations bitwise identical.

Falls back to pure Python (no-op decorator) when numba is missing.
"""
from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        return wrap


# family tags understood by family_rhs / euler_sweep
LINEAR = 0
ADDITIVE = 1
MULTIPLICATIVE = 2


@njit(cache=True, nogil=True)
def pow_abs(x: float, p: float) -> float:
    """|x|**p with the convention 0**p == 0 for every p.

    exp(p*log|x|) keeps fractional powers of tiny bases away from the
    libm corner cases of ``**`` and never emits complex results.
    """
    if x == 0.0:
        return 0.0
    return math.exp(p * math.log(abs(x)))


@njit(cache=True, nogil=True)
def sign(x: float) -> float:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


@njit(cache=True, nogil=True)
def family_rhs(family: int, t: float, x: float, par: np.ndarray) -> float:
    """Scalar right-hand side of one built-in family.

    LINEAR: par = (rate,)
    ADDITIVE: par = (A, B1, B2, alpha, rho1, rho2)
        A |t|^alpha x sin(x^2+1) + B1 sgn(x)|x|^rho1 + B2 sgn(x)|x|^rho2
    MULTIPLICATIVE: par = (scale, rho, gamma_exp)
        scale |sin(pi t + 1)|^gamma_exp * (-sgn(x)|x|^rho) * |cos(|x|)|
    """
    if family == LINEAR:
        return par[0] * x
    elif family == ADDITIVE:
        s = sign(x)
        return (
            par[0] * pow_abs(t, par[3]) * x * math.sin(x * x + 1.0)
            + par[1] * s * pow_abs(x, par[4])
            + par[2] * s * pow_abs(x, par[5])
        )
    else:
        gam = par[0] * pow_abs(math.sin(math.pi * t + 1.0), par[2])
        # abs() inside cos keeps the factor bitwise even in x
        return gam * (-sign(x) * pow_abs(x, par[1])) * abs(math.cos(abs(x)))


@njit(cache=True, nogil=True)
def euler_sweep(
    family: int, a: float, h: float, n: int, y0: float, par: np.ndarray
):
    """Full explicit Euler pass for one built-in scalar family.

    Returns ``(states, slopes, bad_step)`` where ``bad_step`` is the index
    of the first non-finite slope, or -1 on a clean run. States past a bad
    step are unspecified.
    """
    states = np.empty(n + 1)
    slopes = np.empty(n)
    y = y0
    states[0] = y
    for k in range(n):
        t = a + k * h
        s = family_rhs(family, t, y, par)
        if not math.isfinite(s):
            return states, slopes, k
        slopes[k] = s
        y = y + h * s
        states[k + 1] = y
    return states, slopes, -1


@njit(cache=True, nogil=True)
def _eval_pl(
    tau: float,
    a: float,
    h: float,
    n: int,
    knots: np.ndarray,
    states: np.ndarray,
    slopes: np.ndarray,
) -> float:
    """One point of a piecewise-linear interpolant on a uniform mesh."""
    k = int((tau - a) / h)
    if k < 0:
        k = 0
    elif k > n - 1:
        k = n - 1
    # snap exact knot hits to the stored states; the cell index from the
    # division above can be off by one ulp of rounding
    if tau == knots[k]:
        return states[k]
    if tau == knots[k + 1]:
        return states[k + 1]
    return states[k] + (tau - knots[k]) * slopes[k]


@njit(cache=True, nogil=True)
def sup_error_uniform_1d(
    a: float,
    h1: float,
    knots1: np.ndarray,
    states1: np.ndarray,
    slopes1: np.ndarray,
    h2: float,
    knots2: np.ndarray,
    states2: np.ndarray,
    slopes2: np.ndarray,
) -> float:
    """Supremum distance of two scalar interpolants on a shared interval.

    The difference of two piecewise-linear functions is piecewise linear
    on the union of their meshes, so its maximum absolute value is
    attained at a knot of one of the two. Scanning both knot sets is
    therefore exact, not a sampling approximation.
    """
    n1 = slopes1.shape[0]
    n2 = slopes2.shape[0]
    m = 0.0
    for j in range(knots2.shape[0]):
        tau = knots2[j]
        v = _eval_pl(tau, a, h1, n1, knots1, states1, slopes1)
        e = abs(v - states2[j])
        if e > m:
            m = e
    for i in range(knots1.shape[0]):
        tau = knots1[i]
        v = _eval_pl(tau, a, h2, n2, knots2, states2, slopes2)
        e = abs(states1[i] - v)
        if e > m:
            m = e
    return m
