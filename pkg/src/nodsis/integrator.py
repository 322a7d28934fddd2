"""Fixed-step RK4 integration with trapping-region clamping and convergence detection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .equilibria import Equilibrium, EquilibriumClass, find_equilibria, nearest_equilibrium
from .errors import InvariantViolationError, NotApplicableError
from .model import ModelParams, State, field_arrays

CLAMP_TOL = 1e-6
MATCH_RADIUS = 1e-4
DEFAULT_SEED = 42
PRNG_NAME = "numpy.random.Generator(PCG64)"


@dataclass(frozen=True)
class IntegrationConfig:
    dt: float = 0.01
    t_end: float = 500.0
    convergence_tol: float = 1e-10
    record_stride: int = 10

    def __post_init__(self):
        if not (self.dt > 0 and self.t_end > 0 and self.convergence_tol > 0):
            raise ValueError("dt, t_end and convergence_tol must all be > 0")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class RunResult:
    """Raw output of :func:`rk4_run` for a batch of ``m`` initial conditions."""

    record_steps: np.ndarray  # (n_rec,)
    records: np.ndarray  # (n_rec, m, d), empty when not recording
    stop_step: np.ndarray  # (m,) step at which each row halted
    converged: np.ndarray  # (m,)
    final: np.ndarray  # (m, d)
    max_excursion: np.ndarray  # (m,)
    dt: float

    def row_path(self, j: int, initial: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Times and states of row ``j``, truncated at its halting step."""
        stop = int(self.stop_step[j])
        if len(self.record_steps):
            keep = self.record_steps <= stop
            steps = list(self.record_steps[keep])
            states = list(self.records[keep, j, :])
        else:
            steps, states = [0], [initial]
        if steps[-1] != stop:
            steps.append(stop)
            states.append(self.final[j])
        return np.asarray(steps, dtype=float) * self.dt, np.asarray(states)


def rk4_run(rhs, y0, lower, upper, cfg: IntegrationConfig, record: bool = True) -> RunResult:
    """Integrate ``dy/dt = rhs(y)`` row-wise for a batch ``y0`` of shape ``(m, d)``.

    Each row halts as soon as the max-norm of ``rhs`` drops below
    ``cfg.convergence_tol``. After every step, coordinates that left
    ``[lower, upper]`` by at most ``CLAMP_TOL`` are clamped back; larger
    excursions raise :class:`InvariantViolationError`.
    """
    y = np.array(y0, dtype=float, copy=True)
    if y.ndim != 2:
        raise ValueError("y0 must have shape (m, d)")
    m, d = y.shape
    lower = np.broadcast_to(np.asarray(lower, dtype=float), (d,))
    upper = np.broadcast_to(np.asarray(upper, dtype=float), (d,))
    dt = cfg.dt
    n_steps = cfg.n_steps
    stride = int(cfg.record_stride)

    active = np.ones(m, dtype=bool)
    converged = np.zeros(m, dtype=bool)
    stop_step = np.full(m, n_steps, dtype=np.int64)
    max_exc = np.zeros(m)
    rec_steps: list[int] = []
    recs: list[np.ndarray] = []

    for k in range(n_steps + 1):
        idx = np.flatnonzero(active)
        ya = y[idx]
        k1 = rhs(ya)
        done = np.max(np.abs(k1), axis=1) < cfg.convergence_tol
        if done.any():
            hit = idx[done]
            converged[hit] = True
            stop_step[hit] = k
            active[hit] = False
            keep = ~done
            idx, ya, k1 = idx[keep], ya[keep], k1[keep]
        if record and k % stride == 0:
            rec_steps.append(k)
            recs.append(y.copy())
        if k == n_steps or idx.size == 0:
            break
        k2 = rhs(ya + 0.5 * dt * k1)
        k3 = rhs(ya + 0.5 * dt * k2)
        k4 = rhs(ya + dt * k3)
        y_new = ya + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        exc = np.maximum(np.max(lower - y_new, axis=1), np.max(y_new - upper, axis=1))
        exc = np.maximum(exc, 0.0)
        if exc.max(initial=0.0) > CLAMP_TOL:
            bad = idx[int(np.argmax(exc))]
            raise InvariantViolationError(
                f"row {bad} left the trapping region by {exc.max():.3e} at t={(k + 1) * dt:g}; "
                "reduce dt"
            )
        max_exc[idx] = np.maximum(max_exc[idx], exc)
        y[idx] = np.clip(y_new, lower, upper)

    if record:
        records = np.stack(recs) if recs else np.empty((0, m, d))
    else:
        records = np.empty((0, m, d))
    return RunResult(
        record_steps=np.asarray(rec_steps, dtype=np.int64),
        records=records,
        stop_step=stop_step,
        converged=converged,
        final=y,
        max_excursion=max_exc,
        dt=dt,
    )


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n, 2) columns p, x
    converged: bool
    max_excursion: float
    limit: Equilibrium | None = None
    anomaly: bool = False  # converged but no known equilibrium within MATCH_RADIUS

    @property
    def p(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def initial(self) -> State:
        return State(*map(float, self.states[0]))

    @property
    def final(self) -> State:
        return State(*map(float, self.states[-1]))


def scalar_rhs(params: ModelParams):
    def rhs(y):
        dp, dx = field_arrays(y[:, 0], y[:, 1], params)
        return np.stack([dp, dx], axis=1)

    return rhs


def integrate_many(
    initials,
    params: ModelParams,
    cfg: IntegrationConfig | None = None,
    record: bool = True,
    equilibria: list[Equilibrium] | None = None,
) -> list[Trajectory]:
    """Integrate a batch of initial states ``(m, 2)`` in lock-step.

    With ``record=False`` each returned trajectory holds only its initial and
    final state.
    """
    cfg = cfg or IntegrationConfig()
    y0 = np.atleast_2d(np.asarray(initials, dtype=float))
    for p, x in y0:
        State(p, x)  # validates membership of the trapping region
    run = rk4_run(scalar_rhs(params), y0, [0.0, -1.0], [1.0, 1.0], cfg, record=record)
    eqs = find_equilibria(params) if equilibria is None else equilibria

    out = []
    for j in range(y0.shape[0]):
        if record:
            times, states = run.row_path(j, y0[j])
        else:
            times = np.array([0.0, run.stop_step[j] * cfg.dt]) if run.stop_step[j] else np.array([0.0])
            states = np.array([y0[j], run.final[j]]) if run.stop_step[j] else y0[j : j + 1].copy()
        limit, anomaly = None, False
        if run.converged[j]:
            limit = nearest_equilibrium(run.final[j, 0], run.final[j, 1], eqs, MATCH_RADIUS)
            anomaly = limit is None
        out.append(Trajectory(times, states, bool(run.converged[j]), float(run.max_excursion[j]), limit, anomaly))
    return out


def integrate(s0: State, params: ModelParams, cfg: IntegrationConfig | None = None, **kw) -> Trajectory:
    """Integrate one initial state; see :func:`integrate_many`."""
    return integrate_many([[s0.p, s0.x]], params, cfg, **kw)[0]


SIGN_ZERO_TOL = 1e-12


def check_sign_invariance(traj: Trajectory) -> bool:
    """True iff the opinion never takes the opposite sign of ``x(0)``.

    Samples with ``|x| < 1e-12`` are tolerated; only a later sample of the
    opposite sign counts as a violation.
    """
    x0 = traj.x[0]
    if x0 == 0:
        raise NotApplicableError("x(0) = 0: the line x = 0 is invariant, the check does not apply")
    xs = traj.x
    flipped = (np.abs(xs) >= SIGN_ZERO_TOL) & (np.sign(xs) != np.sign(x0))
    return not bool(flipped.any())


@dataclass(frozen=True)
class BasinSample:
    index: int
    initial: State
    limit_class: EquilibriumClass | None
    seed: int
    converged: bool
    final: State


def sample_interior(n: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """``n`` seeded uniform draws from the interior of the trapping region, shape ``(n, 2)``."""
    rng = np.random.default_rng(seed)
    p = rng.uniform(0.0, 1.0, n)
    x = rng.uniform(-1.0, 1.0, n)
    # uniform() is half-open; push exact lower-boundary hits inside
    p[p == 0.0] = np.nextafter(0.0, 1.0)
    x[x == -1.0] = np.nextafter(-1.0, 0.0)
    return np.column_stack([p, x])


def basin_experiment(
    params: ModelParams,
    n_samples: int = 100,
    seed: int = DEFAULT_SEED,
    cfg: IntegrationConfig | None = None,
) -> list[BasinSample]:
    """Limit class reached from ``n_samples`` random interior initial states.

    Samples that fail to converge, or converge away from every known
    equilibrium, are kept with ``limit_class=None``.
    """
    initials = sample_interior(n_samples, seed)
    trajs = integrate_many(initials, params, cfg, record=False)
    return [
        BasinSample(
            index=i,
            initial=State(*map(float, initials[i])),
            limit_class=t.limit.eq_class if t.limit is not None else None,
            seed=seed,
            converged=t.converged,
            final=t.final,
        )
        for i, t in enumerate(trajs)
    ]
