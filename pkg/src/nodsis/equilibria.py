"""Equilibria of the scalar model, their stability, and the regime thresholds.

Fixed points other than the two indifferent ones (x = 0) lie where the
x-nullcline ``p = f1(x)`` meets either ``p = 0`` (opinionated infection-free
points, roots of f1) or the endemic p-nullcline (opinionated endemic points,
roots of f2). Both root sets are located by a sign-change scan plus bisection.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import (
    AssumptionViolation,
    NearBifurcationError,
    NotAnEquilibriumError,
    RegimeError,
    ThresholdUndefinedError,
)
from .model import (
    ModelParams,
    State,
    _atanh_ratio,
    analytic_jacobian,
    endemic_p,
    f2,
    field_arrays,
)
from .roots import DEDUP_TOL, grid_minimum, opinion_grid, scan_roots

ZERO_TOL = 1e-8  # "= 0" in the class labels
MARGINAL_BAND = 1e-9
RESIDUAL_TOL = 1e-10
P_FEASIBLE_TOL = 1e-12
WEAK_PEER_PRESSURE = 1.0 / 3.0


class EquilibriumClass(str, enum.Enum):
    IIFE = "IIFE"
    IEE = "IEE"
    OEE_PLUS = "OEE_PLUS"
    OEE_MINUS = "OEE_MINUS"
    OIFE_PLUS = "OIFE_PLUS"
    OIFE_MINUS = "OIFE_MINUS"


class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


class Regime(str, enum.Enum):
    PRE_TRANSCRITICAL = "PRE_TRANSCRITICAL"
    SIS_LIKE = "SIS_LIKE"
    COEXISTENCE = "COEXISTENCE"
    BISTABLE_OPINIONATED = "BISTABLE_OPINIONATED"


@dataclass(frozen=True)
class Equilibrium:
    state: State
    eq_class: EquilibriumClass
    eigenvalues: tuple[complex, complex]
    stability: Stability
    residual: float

    @property
    def p(self) -> float:
        return self.state.p

    @property
    def x(self) -> float:
        return self.state.x


@dataclass(frozen=True)
class Thresholds:
    delta: float
    beta_star: float | None
    beta_0: float | None


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    thresholds: Thresholds
    equilibria: list[Equilibrium] = field(default_factory=list)
    f2_root_count: int = 0


class InfectionOrdering(NamedTuple):
    p_minus: float
    p_ee: float
    p_plus: float


def stability_from_eigenvalues(eigenvalues) -> Stability:
    re = max(complex(ev).real for ev in eigenvalues)
    if re < -MARGINAL_BAND:
        return Stability.STABLE
    if re > MARGINAL_BAND:
        return Stability.UNSTABLE
    return Stability.MARGINAL


def residual(p: float, x: float, params: ModelParams) -> float:
    dp, dx = field_arrays(p, x, params)
    return max(abs(float(dp)), abs(float(dx)))


def classify_stability(eq: Equilibrium) -> Stability:
    """Stability verdict from the linearisation eigenvalues."""
    if not eq.residual < RESIDUAL_TOL:
        raise NotAnEquilibriumError(
            f"residual {eq.residual:.3e} at ({eq.p}, {eq.x}) exceeds {RESIDUAL_TOL:g}"
        )
    return stability_from_eigenvalues(eq.eigenvalues)


def class_from_state(p: float, x: float) -> EquilibriumClass:
    """Sign-based label of a fixed point."""
    if abs(x) <= ZERO_TOL:
        return EquilibriumClass.IIFE if abs(p) <= ZERO_TOL else EquilibriumClass.IEE
    if abs(p) <= ZERO_TOL:
        return EquilibriumClass.OIFE_PLUS if x > 0 else EquilibriumClass.OIFE_MINUS
    return EquilibriumClass.OEE_PLUS if x > 0 else EquilibriumClass.OEE_MINUS


def make_equilibrium(p: float, x: float, eq_class: EquilibriumClass, params: ModelParams) -> Equilibrium:
    state = State(p, x)
    ev = analytic_jacobian(state, params).eigenvalues
    return Equilibrium(state, eq_class, ev, stability_from_eigenvalues(ev), residual(p, x, params))


# The x-nullcline scaled by k_p, so that k_p = 0 needs no special case:
# k_p * f1(x) = arctanh(x)/x - k_x x^2 - u0.
def _opinion_balance(params: ModelParams):
    def g(x):
        x = np.asarray(x, dtype=float)
        out = _atanh_ratio(x) - params.k_x * x * x - params.u0
        return float(out) if out.ndim == 0 else out

    return g


def _scaled_f2(params: ModelParams):
    g = _opinion_balance(params)

    def h(x):
        x_arr = np.asarray(x, dtype=float)
        out = np.asarray(g(x_arr)) + params.k_p * (params.delta / (params.beta_bar * (1.0 + x_arr)) - 1.0)
        return float(out) if out.ndim == 0 else out

    return h


def iee_infection(params: ModelParams) -> float:
    """Infection level ``1 - delta / beta_bar`` of the indifferent endemic point, correctly rounded."""
    return float(1 - Fraction(params.delta) / Fraction(params.beta_bar))


def oife_opinions(params: ModelParams) -> list[float]:
    """Opinion levels of the opinionated infection-free equilibria (roots of f1)."""
    return [x for x in scan_roots(_opinion_balance(params)) if abs(x) > ZERO_TOL]


def oee_candidates(params: ModelParams) -> list[float]:
    """All roots of f2 on (-1, 1), irrespective of feasibility of their p-coordinate."""
    return scan_roots(_scaled_f2(params))


def find_equilibria(params: ModelParams) -> list[Equilibrium]:
    """Every fixed point in the trapping region, sorted by ``(x, p)``.

    Opinionated endemic points are named OEE_PLUS/OEE_MINUS by root order
    (larger/smaller opinion) whenever exactly two of them are feasible, and
    by the sign of x otherwise. Opinionated infection-free points are named
    by sign.
    """
    found: list[tuple[float, float, EquilibriumClass]] = [(0.0, 0.0, EquilibriumClass.IIFE)]
    if params.beta_bar > params.delta:
        found.append((iee_infection(params), 0.0, EquilibriumClass.IEE))

    for x in oife_opinions(params):
        found.append((0.0, x, EquilibriumClass.OIFE_PLUS if x > 0 else EquilibriumClass.OIFE_MINUS))

    endemic = []
    for x in oee_candidates(params):
        if abs(x) <= ZERO_TOL:
            continue  # coincides with the IEE
        p = float(endemic_p(x, params))
        if p < -P_FEASIBLE_TOL or p > 1.0 + P_FEASIBLE_TOL:
            continue
        p = min(max(p, 0.0), 1.0)
        if p <= ZERO_TOL:
            continue  # coincides with an OIFE
        endemic.append((p, x))
    if len(endemic) == 2:
        (pm, xm), (pp, xp) = sorted(endemic, key=lambda t: t[1])
        found += [(pm, xm, EquilibriumClass.OEE_MINUS), (pp, xp, EquilibriumClass.OEE_PLUS)]
    else:
        found += [(p, x, class_from_state(p, x)) for p, x in endemic]

    unique: list[tuple[float, float, EquilibriumClass]] = []
    for p, x, c in found:
        if all(max(abs(p - q), abs(x - y)) > DEDUP_TOL for q, y, _ in unique):
            unique.append((p, x, c))
    unique.sort(key=lambda t: (t[1], t[0]))
    return [make_equilibrium(p, x, c, params) for p, x, c in unique]


def beta_star(params: ModelParams) -> float:
    """Second transcritical threshold ``delta k_p / (k_p + u0 - 1)``.

    Evaluated in exact rational arithmetic on the float inputs so the
    result is correctly rounded (0.3 * 0.7 / 0.4 gives 0.525, not 0.525 + 1 ulp).
    """
    d, kp, u0 = Fraction(params.delta), Fraction(params.k_p), Fraction(params.u0)
    denom = kp + u0 - 1
    if denom <= 0:
        raise ThresholdUndefinedError(
            f"beta_star undefined: k_p + u0 - 1 = {float(denom):.6g} <= 0 (needs k_p + u0 > 1)"
        )
    return float(d * kp / denom)


def min_f2(params: ModelParams) -> tuple[float, float]:
    """Global minimiser and minimum of f2 on (-1, 1)."""
    return grid_minimum(lambda x: f2(x, params))


# Outer search limit when beta_star is undefined (k_p + u0 <= 1).
_BETA0_CAP_FACTOR = 1e6


def find_beta0(params: ModelParams, tol: float = 1e-10) -> float | None:
    """Fold value of beta_bar at which the pair of opinionated endemic points is born.

    ``params.beta_bar`` is ignored. Returns ``None`` when min f2 does not cross
    zero for beta_bar between delta and beta_star.
    """
    if params.k_x >= WEAK_PEER_PRESSURE:
        raise RegimeError("find_beta0 needs k_x < 1/3 (convex f2)")
    if params.u0 >= 1:
        raise AssumptionViolation("find_beta0 needs u0 < 1")
    if params.k_p <= 0:
        raise RegimeError("find_beta0 needs k_p > 0")
    try:
        upper = beta_star(params)
    except ThresholdUndefinedError:
        upper = params.delta * _BETA0_CAP_FACTOR
    lower = params.delta

    def m(b):
        return min_f2(params.with_(beta_bar=b))[1]

    m_lo, m_hi = m(lower), m(upper)
    if not (m_lo > 0 and m_hi <= 0):
        return None
    while upper - lower > tol:
        mid = 0.5 * (lower + upper)
        if m(mid) > 0:
            lower = mid
        else:
            upper = mid
    return 0.5 * (lower + upper)


def _near(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-9 * max(1.0, abs(b))


def regime(params: ModelParams) -> RegimeReport:
    """Classify the parameter point into one of the four weak-peer-pressure regions."""
    if not params.assumption1_holds:
        raise AssumptionViolation(
            f"standing assumption u0 < 1, k_p + u0 > 1 fails (u0={params.u0}, k_p + u0={params.k_p + params.u0}); "
            "regime labels are only established under it"
        )
    if params.k_x >= WEAK_PEER_PRESSURE:
        raise RegimeError("regime labels require weak peer pressure k_x < 1/3")
    bstar = beta_star(params)
    b = params.beta_bar
    if _near(b, params.delta) or _near(b, bstar):
        raise NearBifurcationError(f"beta_bar={b} sits on a transcritical value")

    eqs = find_equilibria(params)
    if any(e.stability is Stability.MARGINAL for e in eqs):
        raise NearBifurcationError("a marginally stable equilibrium is present")
    n_roots = len(oee_candidates(params))
    thresholds = Thresholds(params.delta, bstar, find_beta0(params))

    if b < params.delta:
        label = Regime.PRE_TRANSCRITICAL
    elif n_roots == 0:
        label = Regime.SIS_LIKE
    elif n_roots == 2:
        label = Regime.COEXISTENCE if b < bstar else Regime.BISTABLE_OPINIONATED
    else:
        raise NearBifurcationError(f"f2 has {n_roots} sign changes; too close to the fold")
    return RegimeReport(label, thresholds, eqs, n_roots)


def infection_ordering(params: ModelParams) -> InfectionOrdering:
    """Endemic infection levels ``p_minus <= p_EE <= p_plus`` of the bistable regime."""
    report = regime(params)
    if report.regime is not Regime.BISTABLE_OPINIONATED:
        raise RegimeError(f"infection ordering needs BISTABLE_OPINIONATED, got {report.regime.value}")
    by_class = {e.eq_class: e for e in report.equilibria}
    minus, plus = by_class[EquilibriumClass.OEE_MINUS], by_class[EquilibriumClass.OEE_PLUS]
    p_ee = iee_infection(params)
    p_minus = float(endemic_p(minus.x, params))
    p_plus = float(endemic_p(plus.x, params))
    for p_val, x_val in ((p_minus, minus.x), (p_plus, plus.x)):
        if np.sign(p_val - p_ee) != np.sign(x_val):
            raise RegimeError("sign(p - p_EE) != sign(x) at an opinionated endemic point")
    if not p_minus <= p_ee <= p_plus:
        raise RegimeError("infection ordering violated")
    return InfectionOrdering(p_minus, p_ee, p_plus)


def nearest_equilibrium(p: float, x: float, equilibria, radius: float) -> Equilibrium | None:
    best, best_d = None, math.inf
    for e in equilibria:
        d = math.hypot(e.p - p, e.x - x)
        if d < best_d:
            best, best_d = e, d
    return best if best_d <= radius else None
