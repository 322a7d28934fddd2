"""NOD-SIS on a network of subpopulations.

Infection spreads over a non-negative contact graph ``A``; opinions are
exchanged over a signed communication graph ``A_hat`` whose negative edges
encode antagonism. For node j::

    dp_j = beta_bar (1 + x_j) (1 - p_j) sum_k a_jk p_k - delta_j p_j
    tau_x dx_j = -x_j + tanh(u_j sum_k ahat_jk x_k)
    u_j = k_p (1/d_j) sum_k |ahat_jk| p_k + k_x sum_k ahat_jk x_j^2 + u0,   d_j = sum_k a_jk

The urgency is implemented as written above by default. Two alternative
readings can be switched on: ``degree_from="communication"`` normalises by
``sum_k |ahat_jk|`` instead of the contact degree, and
``peer_term="neighbors"`` uses ``sum_k ahat_jk x_k^2`` for the peer-pressure
term.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ConfigError, NonConvergenceError
from .integrator import IntegrationConfig, rk4_run
from .model import ModelParams

SIGN_TOL = 1e-8
DEGREE_FROM = ("contact", "communication")
PEER_TERMS = ("own", "neighbors")


def _is_connected(adj: np.ndarray) -> bool:
    n_comp, _ = connected_components(np.abs(adj) > 0, directed=False)
    return n_comp == 1


@dataclass(frozen=True, eq=False)
class NetworkModel:
    A: np.ndarray
    A_hat: np.ndarray
    deltas: np.ndarray
    beta_bar: float
    k_p: float
    k_x: float
    u0: float
    tau_x: float = 1.0
    degree_from: str = "contact"
    peer_term: str = "own"
    check_connected: bool = True  # off only for decoupled test set-ups

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        Ah = np.array(self.A_hat, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or Ah.shape != A.shape:
            raise ValueError("A and A_hat must be square matrices of the same size")
        n = A.shape[0]
        deltas = np.broadcast_to(np.asarray(self.deltas, dtype=float), (n,)).copy()
        if not (np.allclose(A, A.T, rtol=0, atol=0) and np.allclose(Ah, Ah.T, rtol=0, atol=0)):
            raise ValueError("A and A_hat must be symmetric")
        if np.any(A < 0):
            raise ValueError("contact weights must be non-negative")
        if np.any(np.diag(A) != 1) or np.any(np.diag(Ah) != 1):
            raise ValueError("both graphs need unit self-loops (a_jj = ahat_jj = 1)")
        if self.check_connected and not (_is_connected(A) and _is_connected(Ah)):
            raise ValueError("both graphs must be connected (sign ignored for A_hat)")
        if np.any(deltas <= 0):
            raise ValueError("recovery rates must be > 0")
        ModelParams(self.beta_bar, float(deltas.min()), self.k_p, self.k_x, self.u0, self.tau_x)
        if self.degree_from not in DEGREE_FROM:
            raise ValueError(f"degree_from must be one of {DEGREE_FROM}")
        if self.peer_term not in PEER_TERMS:
            raise ValueError(f"peer_term must be one of {PEER_TERMS}")
        for name, arr in (("A", A), ("A_hat", Ah), ("deltas", deltas)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        degree = A.sum(axis=1) if self.degree_from == "contact" else np.abs(Ah).sum(axis=1)
        if np.any(degree <= 0):
            raise ValueError("every node needs a positive degree")
        object.__setattr__(self, "_degree", degree)
        object.__setattr__(self, "_abs_A_hat", np.abs(Ah))
        object.__setattr__(self, "_row_sum_hat", Ah.sum(axis=1))

    @classmethod
    def from_params(cls, A, A_hat, params: ModelParams, deltas=None, **variant) -> "NetworkModel":
        n = np.asarray(A).shape[0]
        deltas = np.full(n, params.delta) if deltas is None else deltas
        return cls(A, A_hat, deltas, params.beta_bar, params.k_p, params.k_x, params.u0, params.tau_x, **variant)

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True, eq=False)
class NetworkState:
    p: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float).reshape(-1)
        x = np.array(self.x, dtype=float).reshape(-1)
        if p.shape != x.shape:
            raise ValueError("p and x must have the same length")
        if np.any((p < 0) | (p > 1)) or np.any((x < -1) | (x > 1)):
            raise ValueError("network state outside [0,1]^n x [-1,1]^n")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "x", x)


def network_field_arrays(p, x, m: NetworkModel):
    """Vector field on arrays whose last axis indexes nodes."""
    contact = p @ m.A.T
    dp = m.beta_bar * (1.0 + x) * (1.0 - p) * contact - m.deltas * p
    info = (p @ m._abs_A_hat.T) / m._degree
    if m.peer_term == "own":
        peer = x * x * m._row_sum_hat
    else:
        peer = (x * x) @ m.A_hat.T
    u = m.k_p * info + m.k_x * peer + m.u0
    dx = (-x + np.tanh(u * (x @ m.A_hat.T))) / m.tau_x
    return dp, dx


def network_vector_field(s: NetworkState, m: NetworkModel) -> tuple[np.ndarray, np.ndarray]:
    if s.p.size != m.n:
        raise ValueError("state size does not match the model")
    return network_field_arrays(s.p, s.x, m)


@dataclass
class NetworkTrajectory:
    times: np.ndarray
    p: np.ndarray  # (T, n)
    x: np.ndarray  # (T, n)
    converged: bool
    max_excursion: float


@dataclass
class BaselineTrajectory:
    times: np.ndarray
    p: np.ndarray  # (T, n)
    converged: bool
    max_excursion: float

    @property
    def steady_state(self) -> np.ndarray:
        return self.p[-1]


def _rhs(m: NetworkModel):
    n = m.n

    def rhs(y):
        dp, dx = network_field_arrays(y[:, :n], y[:, n:], m)
        return np.concatenate([dp, dx], axis=1)

    return rhs


def network_integrate_many(initials: list[NetworkState], m: NetworkModel, cfg: IntegrationConfig | None = None) -> list[NetworkTrajectory]:
    cfg = cfg or IntegrationConfig()
    n = m.n
    y0 = np.array([np.concatenate([s.p, s.x]) for s in initials])
    if y0.shape[1] != 2 * n:
        raise ValueError("state size does not match the model")
    lower = np.concatenate([np.zeros(n), -np.ones(n)])
    upper = np.ones(2 * n)
    run = rk4_run(_rhs(m), y0, lower, upper, cfg)
    out = []
    for j in range(len(initials)):
        times, states = run.row_path(j, y0[j])
        out.append(NetworkTrajectory(times, states[:, :n], states[:, n:], bool(run.converged[j]), float(run.max_excursion[j])))
    return out


def network_integrate(s0: NetworkState, m: NetworkModel, cfg: IntegrationConfig | None = None) -> NetworkTrajectory:
    """RK4 with clamping and convergence halting over the 2n-dimensional state."""
    return network_integrate_many([s0], m, cfg)[0]


def network_sis_baseline(p0, m: NetworkModel, cfg: IntegrationConfig | None = None) -> BaselineTrajectory:
    """Standard network SIS: the same contact dynamics with every opinion frozen at 0."""
    cfg = cfg or IntegrationConfig()
    p0 = np.asarray(p0, dtype=float).reshape(1, -1)
    if p0.shape[1] != m.n or np.any((p0 < 0) | (p0 > 1)):
        raise ValueError("p0 must be a vector in [0,1]^n")

    def rhs(p):
        return m.beta_bar * (1.0 - p) * (p @ m.A.T) - m.deltas * p

    run = rk4_run(rhs, p0, 0.0, 1.0, cfg)
    times, states = run.row_path(0, p0[0])
    return BaselineTrajectory(times, states, bool(run.converged[0]), float(run.max_excursion[0]))


class Outcome(str, enum.Enum):
    AGREEMENT_AVERSE = "AGREEMENT_AVERSE"
    AGREEMENT_SEEKING = "AGREEMENT_SEEKING"
    DISSENSUS = "DISSENSUS"
    NEUTRAL = "NEUTRAL"


@dataclass(frozen=True, eq=False)
class ConsensusReport:
    sign_pattern: np.ndarray
    outcome: Outcome
    infection_vs_baseline: np.ndarray
    p_final: np.ndarray
    x_final: np.ndarray
    p_baseline: np.ndarray


def classify_signs(x_final) -> tuple[np.ndarray, Outcome]:
    x_final = np.asarray(x_final, dtype=float)
    signs = np.where(np.abs(x_final) < SIGN_TOL, 0, np.sign(x_final)).astype(int)
    present = set(signs[signs != 0].tolist())
    if present == {-1, 1}:
        return signs, Outcome.DISSENSUS
    if present == {-1}:
        return signs, Outcome.AGREEMENT_AVERSE
    if present == {1}:
        return signs, Outcome.AGREEMENT_SEEKING
    return signs, Outcome.NEUTRAL


def consensus_report(traj: NetworkTrajectory, m: NetworkModel, cfg: IntegrationConfig | None = None) -> ConsensusReport:
    """Sign pattern of the steady opinions and infection relative to network SIS from the same ``p(0)``."""
    if not traj.converged:
        raise NonConvergenceError("consensus report needs a converged trajectory")
    base = network_sis_baseline(traj.p[0], m, cfg)
    if not base.converged:
        raise NonConvergenceError("network SIS baseline did not converge")
    signs, outcome = classify_signs(traj.x[-1])
    return ConsensusReport(
        sign_pattern=signs,
        outcome=outcome,
        infection_vs_baseline=traj.p[-1] - base.steady_state,
        p_final=traj.p[-1].copy(),
        x_final=traj.x[-1].copy(),
        p_baseline=base.steady_state.copy(),
    )


def load_edge_list(path: str | os.PathLike) -> np.ndarray:
    """Read a symmetric weighted adjacency matrix from an edge-list file.

    Format: a header line ``n=<count>`` followed by lines ``j k w`` with
    0-indexed nodes. Self-loops default to weight 1 unless listed. Blank
    lines and ``#`` comments are ignored.
    """
    n = None
    weights: dict[tuple[int, int], float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if n is None:
                key, sep, val = line.partition("=")
                if key.strip() != "n" or not sep:
                    raise ConfigError(f"{path}:{lineno}: expected header 'n=<count>'")
                try:
                    n = int(val)
                except ValueError:
                    raise ConfigError(f"{path}:{lineno}: bad node count {val.strip()!r}") from None
                if n < 1:
                    raise ConfigError(f"{path}:{lineno}: node count must be >= 1")
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ConfigError(f"{path}:{lineno}: expected 'j k w', got {line!r}")
            try:
                j, k, w = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: cannot parse {line!r}") from None
            if not (0 <= j < n and 0 <= k < n):
                raise ConfigError(f"{path}:{lineno}: node id out of range 0..{n - 1}")
            key = (min(j, k), max(j, k))
            if key in weights and weights[key] != w:
                raise ConfigError(
                    f"{path}:{lineno}: edge {j} {k} weight {w} conflicts with earlier weight {weights[key]}"
                )
            weights[key] = w
    if n is None:
        raise ConfigError(f"{path}: missing 'n=<count>' header")
    adj = np.eye(n)
    for (j, k), w in weights.items():
        adj[j, k] = adj[k, j] = w
    return adj


def write_edge_list(adj, path: str | os.PathLike) -> None:
    adj = np.asarray(adj, dtype=float)
    n = adj.shape[0]
    lines = [f"n={n}"]
    for j in range(n):
        for k in range(j, n):
            w = adj[j, k]
            if (j == k and w != 1.0) or (j != k and w != 0.0):
                lines.append(f"{j} {k} {w:.17g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
