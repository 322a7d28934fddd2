"""Parameters, states and closed-form functions of the scalar NOD-SIS model.

The model couples the infected fraction ``p`` of a population with its
opinion ``x`` about infection risk::

    dp/dt = beta_bar (1 + x) (1 - p) p - delta p
    tau_x dx/dt = -x + tanh(u(p, x) x),   u(p, x) = k_p p + k_x x^2 + u0

Everything here is a pure function of immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import DegenerateParameterError, DomainError

# f1/f2 are only evaluated on the open interval (-1 + EDGE_EPS, 1 - EDGE_EPS).
EDGE_EPS = 1e-9
_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class ModelParams:
    """Constants of the scalar model.

    Validation is eager. The standing assumption ``u0 < 1`` and
    ``k_p + u0 > 1`` is *reported* through :attr:`assumption1_holds` but not
    enforced, since positive invariance of the trapping region does not need it.
    """

    beta_bar: float
    delta: float
    k_p: float
    k_x: float
    u0: float
    tau_x: float = 1.0

    def __post_init__(self):
        for name in ("beta_bar", "delta", "k_p", "k_x", "u0", "tau_x"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        for name in ("beta_bar", "delta", "tau_x"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("k_p", "k_x", "u0"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @property
    def assumption1_holds(self) -> bool:
        return self.u0 < 1 and self.k_p + self.u0 > 1

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class State:
    """A point ``(p, x)`` of the trapping region ``[0, 1] x [-1, 1]``."""

    p: float
    x: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0) or not (-1.0 <= self.x <= 1.0):
            raise DomainError(f"state ({self.p!r}, {self.x!r}) lies outside [0,1]x[-1,1]")

    def as_array(self) -> np.ndarray:
        return np.array([self.p, self.x], dtype=float)


@dataclass(frozen=True)
class Derivative:
    dp: float
    dx: float

    def max_norm(self) -> float:
        return max(abs(self.dp), abs(self.dx))


@dataclass(frozen=True)
class Jacobian2x2:
    j11: float
    j12: float
    j21: float
    j22: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.j11, self.j12], [self.j21, self.j22]], dtype=float)

    @cached_property
    def eigenvalues(self) -> tuple[complex, complex]:
        ev = np.linalg.eigvals(self.matrix).astype(complex)
        ev = sorted(ev, key=lambda z: (z.real, z.imag))
        return complex(ev[0]), complex(ev[1])


def urgency(p, x, params: ModelParams):
    """Net urgency ``k_p p + k_x x^2 + u0``; works on scalars and arrays."""
    return params.k_p * p + params.k_x * x * x + params.u0


def _sech2(y):
    t = np.tanh(y)
    return 1.0 - t * t


def field_arrays(p, x, params: ModelParams):
    """Vector field on raw floats or broadcastable arrays, returns ``(dp, dx)``.

    This is the single implementation of the scalar dynamics; the integrator
    and :func:`nodsis_vector_field` both call it.
    """
    dp = params.beta_bar * (1.0 + x) * (1.0 - p) * p - params.delta * p
    dx = (-x + np.tanh(urgency(p, x, params) * x)) / params.tau_x
    return dp, dx


def nodsis_vector_field(s: State, params: ModelParams) -> Derivative:
    dp, dx = field_arrays(s.p, s.x, params)
    return Derivative(float(dp), float(dx))


def sis_vector_field(p, params: ModelParams, alpha: float = 1.0):
    """Opinion-free SIS baseline ``beta_bar alpha (1 - p) p - delta p``."""
    if alpha <= 0:
        raise ValueError("contact rate alpha must be > 0")
    return params.beta_bar * alpha * (1.0 - p) * p - params.delta * p


def _atanh_ratio(x):
    # arctanh(x)/x with the removable singularity at 0 handled by its series
    x = np.asarray(x, dtype=float)
    x2 = x * x
    series = 1.0 + x2 / 3.0 + x2 * x2 / 5.0
    small = np.abs(x) < _SERIES_CUTOFF
    safe = np.where(small, 0.5, x)
    direct = np.arctanh(safe) / safe
    return np.where(small, series, direct)


def _check_open_interval(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(np.abs(x) > 1.0 - EDGE_EPS):
        raise DomainError("f1/f2 are defined on (-1, 1) only; got |x| >= 1 - 1e-9")
    return x


def _maybe_scalar(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def f1(x, params: ModelParams):
    """p-coordinate of the x-nullcline, ``(arctanh(x)/x - k_x x^2 - u0) / k_p``.

    Its roots are the opinion levels of the opinionated infection-free
    equilibria.
    """
    if params.k_p == 0:
        raise DegenerateParameterError("f1 is undefined for k_p = 0")
    x = _check_open_interval(x)
    out = (_atanh_ratio(x) - params.k_x * x * x - params.u0) / params.k_p
    return _maybe_scalar(out)


def f2(x, params: ModelParams):
    """``f1(x) + delta / (beta_bar (1 + x)) - 1``; roots give opinionated endemic equilibria."""
    x = _check_open_interval(x)
    out = np.asarray(f1(x, params)) + params.delta / (params.beta_bar * (1.0 + x)) - 1.0
    return _maybe_scalar(out)


def endemic_p(x, params: ModelParams):
    """p-nullcline ``1 - delta / (beta_bar (1 + x))`` (the non-trivial branch)."""
    return 1.0 - params.delta / (params.beta_bar * (1.0 + x))


def jacobian_arrays(p, x, params: ModelParams):
    """Closed-form Jacobian entries ``(j11, j12, j21, j22)`` on scalars or arrays."""
    u = urgency(p, x, params)
    s2 = _sech2(u * x)
    inv_tau = 1.0 / params.tau_x
    j11 = params.beta_bar * (1.0 + x) * (1.0 - 2.0 * p) - params.delta
    j12 = params.beta_bar * (1.0 - p) * p
    j21 = inv_tau * params.k_p * x * s2
    j22 = inv_tau * (-1.0 + (2.0 * params.k_x * x * x + u) * s2)
    return j11, j12, j21, j22


def analytic_jacobian(s: State, params: ModelParams) -> Jacobian2x2:
    return Jacobian2x2(*(float(v) for v in jacobian_arrays(s.p, s.x, params)))


__all__ = [
    "EDGE_EPS",
    "ModelParams",
    "State",
    "Derivative",
    "Jacobian2x2",
    "urgency",
    "field_arrays",
    "nodsis_vector_field",
    "sis_vector_field",
    "f1",
    "f2",
    "endemic_p",
    "jacobian_arrays",
    "analytic_jacobian",
]
