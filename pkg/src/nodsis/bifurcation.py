"""One-parameter bifurcation diagrams assembled from equilibria on a grid.

Branches are graphs over the swept parameter, so a dense grid plus
nearest-neighbour linking is enough; there is no arclength continuation.
Events found on the grid are refined by bisection on a scalar condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .equilibria import (
    Equilibrium,
    EquilibriumClass,
    Stability,
    _opinion_balance,
    find_equilibria,
)
from .errors import BranchLinkingError
from .model import ModelParams, f2
from .roots import golden_section, opinion_grid

JUMP_TOL = 0.05
REFINE_TOL = 1e-8
PARAMETERS = ("beta_bar", "delta", "k_p", "k_x", "u0", "tau_x")
INDIFFERENT = (EquilibriumClass.IIFE, EquilibriumClass.IEE)


def default_grid() -> np.ndarray:
    return np.linspace(0.01, 0.99, 400)


@dataclass(frozen=True)
class SweepConfig:
    base: ModelParams
    parameter: str = "beta_bar"
    values: np.ndarray = field(default_factory=default_grid)

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}; choose from {PARAMETERS}")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("sweep grid must be a non-empty 1-D sequence")
        if np.any(np.diff(vals) <= 0):
            raise ValueError("sweep grid must be strictly increasing")
        object.__setattr__(self, "values", vals)
        for v in (vals[0], vals[-1]):
            self.params_at(float(v))  # raises if the grid leaves the valid domain

    def params_at(self, value: float) -> ModelParams:
        return self.base.with_(**{self.parameter: value})


class BranchPoint(NamedTuple):
    value: float
    p: float
    x: float
    stability: Stability
    max_real: float


@dataclass
class Branch:
    eq_class: EquilibriumClass
    points: list[BranchPoint] = field(default_factory=list)
    first_index: int = 0

    @property
    def last_index(self) -> int:
        return self.first_index + len(self.points) - 1

    def at(self, i: int) -> BranchPoint | None:
        if self.first_index <= i <= self.last_index:
            return self.points[i - self.first_index]
        return None


@dataclass(frozen=True)
class BifurcationEvent:
    value: float
    kind: str  # "transcritical" | "fold"
    classes: tuple[EquilibriumClass, EquilibriumClass]
    cell: tuple[float, float]


@dataclass
class BifurcationDiagram:
    parameter: str
    values: np.ndarray
    branches: list[Branch]
    detected_bifurcations: list[BifurcationEvent]


def _point(value: float, e: Equilibrium) -> BranchPoint:
    return BranchPoint(value, e.p, e.x, e.stability, max(z.real for z in e.eigenvalues))


def _dist(a, b) -> float:
    return math.hypot(a.p - b.p, a.x - b.x)


def _link(branches: list[Branch], open_idx: list[int], eqs: list[Equilibrium], i: int, value: float):
    """Attach this grid column's equilibria to open branches; returns the new open list."""
    still_open: list[int] = []
    claimed: set[int] = set()
    for cls in EquilibriumClass:
        cands = [j for j, e in enumerate(eqs) if e.eq_class is cls]
        opens = [b for b in open_idx if branches[b].eq_class is cls]
        near = {b: [j for j in cands if _dist(branches[b].points[-1], eqs[j]) <= JUMP_TOL] for b in opens}
        for b, js in near.items():
            rivals = [c for c in opens if c != b and set(near[c]) & set(js)]
            if len(js) > 1 or rivals:
                raise BranchLinkingError(
                    f"ambiguous {cls.value} continuation in grid cell "
                    f"[{branches[b].points[-1].value:.10g}, {value:.10g}] (indices {i - 1}, {i})"
                )
            if js:
                branches[b].points.append(_point(value, eqs[js[0]]))
                claimed.add(js[0])
                still_open.append(b)
        for j in cands:
            if j not in claimed:
                branches.append(Branch(cls, [_point(value, eqs[j])], i))
                still_open.append(len(branches) - 1)
    return still_open


def _track(cfg: SweepConfig, cls: EquilibriumClass, guess: tuple[float, float], value: float):
    eqs = [e for e in find_equilibria(cfg.params_at(value)) if e.eq_class is cls]
    if not eqs:
        return None
    return min(eqs, key=lambda e: math.hypot(e.p - guess[0], e.x - guess[1]))


def _refine_transcritical(cfg: SweepConfig, branch: Branch, i0: int, i1: int) -> float:
    """Bisect on the sign of the leading eigenvalue real part of ``branch``."""
    a, b = float(cfg.values[i0]), float(cfg.values[i1])
    pa, pb = branch.at(i0), branch.at(i1)
    sa = pa.max_real
    for _ in range(200):
        if b - a <= REFINE_TOL:
            break
        mid = 0.5 * (a + b)
        t = (mid - pa.value) / (pb.value - pa.value)
        guess = (pa.p + t * (pb.p - pa.p), pa.x + t * (pb.x - pa.x))
        e = _track(cfg, branch.eq_class, guess, mid)
        if e is None:
            break
        sm = max(z.real for z in e.eigenvalues)
        if (sm > 0) == (sa > 0):
            a, sa = mid, sm
        else:
            b = mid
    return 0.5 * (a + b)


def _local_min(f, center: float, half_width: float) -> float:
    grid = opinion_grid()
    window = grid[np.abs(grid - center) <= half_width]
    if window.size < 3:
        window = grid
    vals = np.asarray(f(window))
    k = int(np.argmin(vals))
    lo, hi = float(window[max(k - 1, 0)]), float(window[min(k + 1, window.size - 1)])
    return min(float(vals[k]), f(golden_section(f, lo, hi)))


def _refine_fold(cfg: SweepConfig, cls: EquilibriumClass, x_birth: float, spread: float, i_absent: int, i_present: int) -> float:
    """Bisect on the sign of the local minimum of the nullcline function."""
    oee = cls in (EquilibriumClass.OEE_PLUS, EquilibriumClass.OEE_MINUS)

    def m(value):
        params = cfg.params_at(value)
        f = (lambda x: f2(x, params)) if oee else _opinion_balance(params)
        return _local_min(f, x_birth, max(0.1, 2.0 * spread))

    a, b = float(cfg.values[i_absent]), float(cfg.values[i_present])
    ma = m(a)
    while abs(b - a) > REFINE_TOL:
        mid = 0.5 * (a + b)
        if (m(mid) > 0) == (ma > 0):
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _flips(branch: Branch, i0: int, i1: int) -> bool:
    a, b = branch.at(i0), branch.at(i1)
    return a is not None and b is not None and a.stability is not b.stability


def _detect(cfg: SweepConfig, branches: list[Branch]) -> list[BifurcationEvent]:
    vals = cfg.values
    n = len(vals)
    events: list[BifurcationEvent] = []
    used: set[int] = set()

    # a branch pair born (or dying) together in one cell is a fold
    for edge in ("start", "end"):
        groups: dict[int, list[int]] = {}
        for k, br in enumerate(branches):
            i = br.first_index if edge == "start" else br.last_index
            if (edge == "start" and i > 0) or (edge == "end" and i < n - 1):
                groups.setdefault(i, []).append(k)
        for i, ks in sorted(groups.items()):
            ks = [k for k in ks if branches[k].eq_class not in INDIFFERENT]
            while len(ks) >= 2:
                k1, k2 = ks.pop(0), ks.pop(0)
                b1, b2 = branches[k1], branches[k2]
                i_absent, i_present = (i - 1, i) if edge == "start" else (i + 1, i)
                q1, q2 = b1.at(i_present), b2.at(i_present)
                x_birth, spread = 0.5 * (q1.x + q2.x), abs(q1.x - q2.x)
                value = _refine_fold(cfg, b1.eq_class, x_birth, spread, i_absent, i_present)
                cell = tuple(sorted((float(vals[i_absent]), float(vals[i_present]))))
                events.append(BifurcationEvent(value, "fold", (b1.eq_class, b2.eq_class), cell))
                used.update((k1, k2))

    # a branch emerging from (or merging into) another one with a stability flip
    for k, br in enumerate(branches):
        if k in used:
            continue
        for edge in ("start", "end"):
            i = br.first_index if edge == "start" else br.last_index
            if (edge == "start" and i == 0) or (edge == "end" and i == n - 1):
                continue
            j = i - 1 if edge == "start" else i + 1
            here = br.at(i)
            for c, other in enumerate(branches):
                if c == k or other.at(i) is None or other.at(j) is None:
                    continue
                if _dist(here, other.at(i)) <= JUMP_TOL and _flips(other, j, i):
                    lo, hi = min(i, j), max(i, j)
                    value = _refine_transcritical(cfg, other, lo, hi)
                    events.append(
                        BifurcationEvent(value, "transcritical", (other.eq_class, br.eq_class), (float(vals[lo]), float(vals[hi])))
                    )
                    break

    # two coexisting branches crossing with exchange of stability
    for k1 in range(len(branches)):
        for k2 in range(k1 + 1, len(branches)):
            b1, b2 = branches[k1], branches[k2]
            lo = max(b1.first_index, b2.first_index)
            hi = min(b1.last_index, b2.last_index)
            for i in range(lo, hi):
                a1, a2, c1, c2 = b1.at(i), b2.at(i), b1.at(i + 1), b2.at(i + 1)
                crossed = np.any(np.sign([a1.p - a2.p, a1.x - a2.x]) * np.sign([c1.p - c2.p, c1.x - c2.x]) < 0)
                close = min(_dist(a1, a2), _dist(c1, c2)) <= JUMP_TOL
                if crossed and close and _flips(b1, i, i + 1) and _flips(b2, i, i + 1):
                    track = b1 if b1.eq_class in INDIFFERENT else b2
                    value = _refine_transcritical(cfg, track, i, i + 1)
                    pair = (b1.eq_class, b2.eq_class) if track is b1 else (b2.eq_class, b1.eq_class)
                    events.append(BifurcationEvent(value, "transcritical", pair, (float(vals[i]), float(vals[i + 1]))))

    events.sort(key=lambda ev: ev.value)
    return events


def sweep(cfg: SweepConfig) -> BifurcationDiagram:
    """Equilibrium branches with stability, plus transcritical and fold events."""
    branches: list[Branch] = []
    open_idx: list[int] = []
    for i, v in enumerate(cfg.values):
        eqs = find_equilibria(cfg.params_at(float(v)))
        open_idx = _link(branches, open_idx, eqs, i, float(v))
    return BifurcationDiagram(cfg.parameter, cfg.values, branches, _detect(cfg, branches))


BRANCH_COLUMNS = ("parameter", "class", "p", "x", "stability")
EVENT_COLUMNS = ("parameter", "type", "classes", "cell_lo", "cell_hi")


def export_diagram(d: BifurcationDiagram) -> tuple[list[tuple], list[tuple]]:
    """Flat branch-point and event records, ordered by class then parameter."""
    rows = []
    for k, br in enumerate(d.branches):
        for pt in br.points:
            rows.append((pt.value, br.eq_class.value, pt.p, pt.x, pt.stability.value))
    rows.sort(key=lambda r: (r[1], r[0], r[3], r[2]))
    events = [
        (ev.value, ev.kind, "/".join(c.value for c in ev.classes), ev.cell[0], ev.cell[1])
        for ev in d.detected_bifurcations
    ]
    return rows, events
