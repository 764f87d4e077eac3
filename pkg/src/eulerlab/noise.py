"""Corrupted information oracles.

A corruption is any function delta_g with ||delta_g(t, y)|| <= delta * (1 + ||y||);
the noisy scheme only ever sees g + delta_g and a perturbed initial value
from the closed delta-ball around xi. Everything here is built from
per-point hashing rather than stream RNG draws: a corruption must be a
well-defined function of (t, y), and consuming generator state inside the
integration loop would make repeated queries disagree.

The concrete kinds are one artifact's choice of members of the class;
they are not canonical. ``adversarial-sign`` opposes the drift with the
largest magnitude the bound allows, as a deterministic stand-in for the
worst case that random draws tend to underestimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _bits
from .core import Array, OdeProblem, RhsFunction
from .errors import ParameterError

KINDS = ("zero", "constant", "hashed", "adversarial-sign")


def _validate_delta(delta: float) -> float:
    delta = float(delta)
    if not (0.0 <= delta <= 1.0) or not math.isfinite(delta):
        raise ParameterError(f"precision delta must lie in [0, 1], got {delta}")
    return delta


def _validate_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    return int(seed)


def _unit_vector(seed: int, d: int) -> Array:
    """Seed-derived direction on the unit sphere; d=1 gives exactly +-1."""
    h = _bits.mix64(seed ^ 0xD1B54A32D192ED03)
    if d == 1:
        return np.array([1.0 if h & 1 else -1.0])
    coords = np.empty(d)
    for i in range(0, d, 2):
        g1, g2 = _bits.gauss(_bits.derive_seed(h, i))
        coords[i] = g1
        if i + 1 < d:
            coords[i + 1] = g2
    norm = float(np.linalg.norm(coords))
    if norm == 0.0:  # pragma: no cover - needs an astronomically unlikely hash
        coords[0] = 1.0
        return coords
    out = coords / norm
    # keep the norm strictly <= 1 against rounding in the division
    out *= 1.0 - 4e-16
    return out


@dataclass(frozen=True, eq=False)
class CorruptingFunction:
    """One member of the corruption class at precision ``delta``.

    ``eval`` is deterministic in (t, y) for the fixed seed, and every
    evaluation is checked against the class bound before it is returned.
    ``scalar`` is the d=1 form when available, bitwise-consistent with
    ``eval`` on length-1 states.
    """

    delta: float
    kind: str
    seed: int
    eval: Callable[[float, Array], Array]
    scalar: Callable[[float, float], float] | None = None


def _checked_scalar(raw: Callable[[float, float], float], delta: float):
    def eval_scalar(t: float, y: float) -> float:
        v = raw(t, y)
        limit = delta * (1.0 + abs(y))
        if not abs(v) <= limit:
            raise AssertionError(
                f"corruption bound violated: |{v!r}| > {limit!r} at (t={t!r}, y={y!r})"
            )
        return v

    return eval_scalar


def _checked_vector(raw: Callable[[float, Array], Array], delta: float):
    def eval_vector(t: float, y: Array) -> Array:
        y = np.asarray(y, dtype=np.float64)
        v = raw(t, y)
        limit = delta * (1.0 + float(np.linalg.norm(y)))
        if not float(np.linalg.norm(v)) <= limit:
            raise AssertionError(
                f"corruption bound violated: ||{v!r}|| > {limit!r} at (t={t!r}, y={y!r})"
            )
        return v

    return eval_vector


def make_corruption(
    kind: str,
    delta: float,
    seed: int,
    base: RhsFunction | None = None,
) -> CorruptingFunction:
    """Build one corrupting function.

    zero: identically 0.
    constant: delta*(1+||y||) times a fixed seed-derived unit vector.
    hashed: magnitude fraction in [0,1) and direction both derived by
        hashing (seed, t, y); distinct points decorrelate, repeated
        queries agree.
    adversarial-sign: -delta*(1+|y|)*sign(g(t,y)); d=1 only and needs
        the base rhs it opposes.
    """
    delta = _validate_delta(delta)
    seed = _validate_seed(seed)
    if kind not in KINDS:
        raise ParameterError(f"unknown corruption kind {kind!r}; valid kinds: {KINDS}")

    if kind == "zero":

        def raw_scalar(t: float, y: float) -> float:
            return 0.0

        def raw_vector(t: float, y: Array) -> Array:
            return np.zeros(y.shape[0])

    elif kind == "constant":
        direction_cache: dict[int, Array] = {}

        def _direction(d: int) -> Array:
            u = direction_cache.get(d)
            if u is None:
                u = _unit_vector(seed, d)
                direction_cache[d] = u
            return u

        def raw_scalar(t: float, y: float) -> float:
            return delta * (1.0 + abs(y)) * float(_direction(1)[0])

        def raw_vector(t: float, y: Array) -> Array:
            if y.shape[0] == 1:
                return np.array([raw_scalar(t, float(y[0]))])
            return delta * (1.0 + float(np.linalg.norm(y))) * _direction(y.shape[0])

    elif kind == "hashed":

        def raw_scalar(t: float, y: float) -> float:
            h = _bits.hash_point(seed, t, (y,))
            frac = _bits.unit_open(h)
            sign = 1.0 if h & 1 else -1.0
            return delta * (1.0 + abs(y)) * frac * sign

        def raw_vector(t: float, y: Array) -> Array:
            d = y.shape[0]
            if d == 1:
                return np.array([raw_scalar(t, float(y[0]))])
            h = _bits.hash_point(seed, t, y)
            frac = _bits.unit_open(h)
            coords = np.empty(d)
            for i in range(0, d, 2):
                g1, g2 = _bits.gauss(_bits.derive_seed(h, i + 7))
                coords[i] = g1
                if i + 1 < d:
                    coords[i + 1] = g2
            norm = float(np.linalg.norm(coords))
            if norm == 0.0:  # pragma: no cover
                return np.zeros(d)
            scale = delta * (1.0 + float(np.linalg.norm(y))) * frac
            return coords * ((scale / norm) * (1.0 - 4e-16))

    else:  # adversarial-sign
        if base is None:
            raise ParameterError(
                "adversarial-sign corruption needs the base rhs it opposes"
            )
        if base.dim != 1:
            raise ParameterError(
                f"adversarial-sign corruption is defined for d=1 only, got d={base.dim}"
            )
        base_scalar = base.scalar
        base_eval = base.eval

        def raw_scalar(t: float, y: float) -> float:
            if base_scalar is not None:
                g = base_scalar(t, y)
            else:
                g = float(base_eval(t, np.array([y]))[0])
            if g > 0.0:
                return -delta * (1.0 + abs(y))
            if g < 0.0:
                return delta * (1.0 + abs(y))
            return 0.0

        def raw_vector(t: float, y: Array) -> Array:
            if y.shape[0] != 1:
                raise ParameterError(
                    "adversarial-sign corruption is defined for d=1 only"
                )
            return np.array([raw_scalar(t, float(y[0]))])

    return CorruptingFunction(
        delta=delta,
        kind=kind,
        seed=seed,
        eval=_checked_vector(raw_vector, delta),
        scalar=_checked_scalar(raw_scalar, delta),
    )


def perturb_initial(xi, delta: float, seed: int) -> Array:
    """A point of the closed delta-ball around xi, deterministic per seed."""
    delta = _validate_delta(delta)
    seed = _validate_seed(seed)
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    if delta == 0.0:
        return xi.copy()
    d = xi.shape[0]
    h = _bits.mix64(seed ^ 0xA0761D6478BD642F)
    radius = _bits.unit_open(h)
    if d == 1:
        sign = 1.0 if h & 1 else -1.0
        return xi + delta * (sign * radius)
    direction = _unit_vector(_bits.derive_seed(h, 3), d)
    # uniform in the ball, not on the sphere
    v = direction * radius ** (1.0 / d)
    return xi + delta * v


@dataclass(frozen=True, eq=False)
class NoisyOracle:
    """Bundle of corrupted rhs and perturbed initial value.

    Queries see g_tilde = base + corruption; the initial value satisfies
    ||xi_tilde - xi|| <= delta.
    """

    base: RhsFunction
    corruption: CorruptingFunction
    xi_tilde: Array

    def eval_tilde(self, t: float, y: Array) -> Array:
        y = np.asarray(y, dtype=np.float64)
        return np.asarray(self.base.eval(t, y), dtype=np.float64) + self.corruption.eval(t, y)

    @property
    def scalar_tilde(self) -> Callable[[float, float], float] | None:
        base_scalar = self.base.scalar
        corr_scalar = self.corruption.scalar
        if base_scalar is None or corr_scalar is None:
            return None

        def g_tilde(t: float, y: float) -> float:
            return base_scalar(t, y) + corr_scalar(t, y)

        return g_tilde


def make_oracle(
    problem: OdeProblem,
    kind: str,
    delta: float,
    seed: int,
    perturb_xi: bool = True,
) -> NoisyOracle:
    """Noisy oracle over a problem's rhs at precision delta.

    The seed splits deterministically into a corruption seed and an
    initial-value seed. ``perturb_xi=False`` keeps xi_tilde = xi, for
    studies that corrupt only the rhs.
    """
    delta = _validate_delta(delta)
    seed = _validate_seed(seed)
    corruption = make_corruption(
        kind, delta, _bits.derive_seed(seed, 1), base=problem.rhs
    )
    if perturb_xi:
        xi_tilde = perturb_initial(problem.xi, delta, _bits.derive_seed(seed, 2))
    else:
        xi_tilde = problem.xi.copy()
    return NoisyOracle(base=problem.rhs, corruption=corruption, xi_tilde=xi_tilde)
