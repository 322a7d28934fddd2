"""Command-line front end: ``nodsis simulate|equilibria|bifurcate|basin|network``.

Results are written as CSV payload files plus ``metadata.ini``, an envelope
whose ``[metadata]`` block is followed by the fully resolved configuration.
Passing that file back with ``--config`` reproduces the payload exactly.

Exit codes: 0 success, 2 configuration error, 3 trapping-region violation,
4 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bifurcation import BRANCH_COLUMNS, EVENT_COLUMNS, export_diagram, sweep
from .config import PRESET_NOTES, PRESETS, ExperimentConfig, parse_file, resolve
from .equilibria import find_equilibria, regime
from .errors import ConfigError, InvariantViolationError, NodsisError, NonConvergenceError, RegimeError
from .integrator import PRNG_NAME, basin_experiment, check_sign_invariance, integrate_many, sample_interior
from .network import NetworkModel, NetworkState, consensus_report, load_edge_list, network_integrate, network_sis_baseline

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_NONCONVERGENCE = 0, 2, 3, 4


@dataclass
class ResultEnvelope:
    metadata: dict[str, object]
    config: ExperimentConfig
    payload: dict[str, tuple[tuple[str, ...], list[tuple]]] = field(default_factory=dict)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(getattr(v, "value", v))


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def envelope_text(env: ResultEnvelope) -> str:
    def meta(v):
        return repr(float(v)) if isinstance(v, (float, np.floating)) else _cell(v)

    lines = ["[metadata]"] + [f"{k} = {meta(v)}" for k, v in env.metadata.items()] + [""]
    return "\n".join(lines) + "\n" + env.config.to_text()


def _metadata(cfg: ExperimentConfig) -> dict[str, object]:
    return {
        "tool": "nodsis",
        "version": __version__,
        "command": cfg.command,
        "preset": cfg["run"]["preset"],
        "seed": cfg.seed,
        "prng": PRNG_NAME,
        "started_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _split_initials(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    p = rng.uniform(0.0, 1.0, n)
    mag = rng.uniform(0.0, 1.0, n)
    p[p == 0.0] = np.nextafter(0.0, 1.0)
    mag[mag == 0.0] = np.nextafter(0.0, 1.0)
    half = n // 2
    return np.column_stack([p, np.concatenate([-mag[:half], mag[half:]])])


def simulate_initials(cfg: ExperimentConfig) -> np.ndarray:
    ini = cfg["initial"]
    if ini["mode"] == "explicit":
        return np.column_stack([ini["p0"], ini["x0"]]).astype(float)
    if ini["mode"] == "random":
        return sample_interior(ini["n_runs"], cfg.seed)
    return _split_initials(ini["n_runs"], cfg.seed)


def run_simulate(cfg: ExperimentConfig) -> ResultEnvelope:
    params = cfg.model_params()
    initials = simulate_initials(cfg)
    try:
        trajs = integrate_many(initials, params, cfg.integration())
    except ValueError as exc:
        raise ConfigError(f"[initial]: {exc}") from None
    single = len(trajs) == 1
    rows, summary = [], []
    for r, tr in enumerate(trajs):
        for t, (p, x) in zip(tr.times, tr.states):
            rows.append((t, p, x) if single else (r, t, p, x))
        try:
            sign_ok = check_sign_invariance(tr)
        except NodsisError:
            sign_ok = None
        summary.append((
            r, tr.states[0, 0], tr.states[0, 1], tr.converged,
            tr.limit.eq_class.value if tr.limit else None,
            tr.states[-1, 0], tr.states[-1, 1], tr.max_excursion, sign_ok,
        ))
    env = ResultEnvelope(_metadata(cfg), cfg)
    env.metadata["runs"] = len(trajs)
    env.metadata["converged_runs"] = sum(t.converged for t in trajs)
    env.payload["trajectory.csv"] = (("t", "p", "x") if single else ("run", "t", "p", "x"), rows)
    env.payload["summary.csv"] = (
        ("run", "p0", "x0", "converged", "limit_class", "p_final", "x_final", "max_excursion", "sign_invariant"),
        summary,
    )
    return env


def run_equilibria(cfg: ExperimentConfig) -> ResultEnvelope:
    params = cfg.model_params()
    env = ResultEnvelope(_metadata(cfg), cfg)
    eqs = find_equilibria(params)
    label, bstar, beta0, warning = None, None, None, None
    try:
        report = regime(params)
        label = report.regime.value
        bstar, beta0 = report.thresholds.beta_star, report.thresholds.beta_0
    except RegimeError as exc:
        warning = str(exc)
    env.metadata.update(regime=label, delta=params.delta, beta_star=bstar, beta_0=beta0, warning=warning)
    rows = []
    for e in eqs:
        l1, l2 = e.eigenvalues
        rows.append((e.eq_class.value, e.p, e.x, l1.real, l1.imag, l2.real, l2.imag, e.stability.value, e.residual))
    env.payload["equilibria.csv"] = (
        ("class", "p", "x", "eig1_re", "eig1_im", "eig2_re", "eig2_im", "stability", "residual"),
        rows,
    )
    env.payload["regime.csv"] = (
        ("regime", "delta", "beta_star", "beta_0", "warning"),
        [(label, params.delta, bstar, beta0, warning)],
    )
    return env


def run_bifurcate(cfg: ExperimentConfig) -> ResultEnvelope:
    diagram = sweep(cfg.sweep_config())
    rows, events = export_diagram(diagram)
    env = ResultEnvelope(_metadata(cfg), cfg)
    env.metadata["branches"] = len(diagram.branches)
    env.metadata["events"] = len(events)
    env.payload["branches.csv"] = (BRANCH_COLUMNS, rows)
    env.payload["events.csv"] = (EVENT_COLUMNS, events)
    return env


def run_basin(cfg: ExperimentConfig) -> ResultEnvelope:
    samples = basin_experiment(cfg.model_params(), cfg["basin"]["n_samples"], cfg.seed, cfg.integration())
    env = ResultEnvelope(_metadata(cfg), cfg)
    env.metadata["non_converged"] = sum(not s.converged for s in samples)
    env.payload["basin.csv"] = (
        ("sample", "p0", "x0", "converged", "limit_class", "p_final", "x_final"),
        [
            (s.index, s.initial.p, s.initial.x, s.converged, s.limit_class.value if s.limit_class else None, s.final.p, s.final.x)
            for s in samples
        ],
    )
    return env


def network_model(cfg: ExperimentConfig) -> NetworkModel:
    net = cfg["network"]
    params = cfg.model_params()
    A = load_edge_list(net["contact"])
    A_hat = load_edge_list(net["communication"])
    deltas = net["deltas"] or None
    try:
        return NetworkModel.from_params(
            A, A_hat, params, deltas, degree_from=net["degree_from"], peer_term=net["peer_term"]
        )
    except ValueError as exc:
        raise ConfigError(f"[network]: {exc}") from None


def network_initial(cfg: ExperimentConfig, n: int) -> NetworkState:
    net = cfg["network"]
    if net["x0_sign"] == "explicit":
        if len(net["p0"]) != n:
            raise ConfigError(f"[network] p0/x0 need {n} entries")
        return NetworkState(net["p0"], net["x0"])
    rng = np.random.default_rng(cfg.seed)
    p0 = rng.uniform(0.01, 0.1, n)
    mag = rng.uniform(0.05, 0.3, n)
    sign = {"neg": -np.ones(n), "pos": np.ones(n), "mixed": np.where(np.arange(n) % 2 == 0, 1.0, -1.0)}[net["x0_sign"]]
    return NetworkState(p0, sign * mag)


def run_network(cfg: ExperimentConfig) -> ResultEnvelope:
    m = network_model(cfg)
    s0 = network_initial(cfg, m.n)
    icfg = cfg.integration()
    traj = network_integrate(s0, m, icfg)
    base = network_sis_baseline(s0.p, m, icfg)
    env = ResultEnvelope(_metadata(cfg), cfg)
    n = m.n
    pcols = tuple(f"p_{j}" for j in range(n))
    xcols = tuple(f"x_{j}" for j in range(n))
    env.payload["trajectory.csv"] = (
        ("t",) + pcols + xcols,
        [(t, *p, *x) for t, p, x in zip(traj.times, traj.p, traj.x)],
    )
    env.payload["baseline.csv"] = (("t",) + pcols, [(t, *p) for t, p in zip(base.times, base.p)])
    env.metadata["converged"] = traj.converged
    env.metadata["max_excursion"] = traj.max_excursion
    if not traj.converged:
        raise NonConvergenceError(f"network trajectory did not converge by t={icfg.t_end:g}")
    rep = consensus_report(traj, m, icfg)
    env.metadata["outcome"] = rep.outcome.value
    env.payload["consensus.csv"] = (
        ("node", "sign", "x_final", "p_final", "p_baseline", "difference"),
        [
            (j, int(rep.sign_pattern[j]), rep.x_final[j], rep.p_final[j], rep.p_baseline[j], rep.infection_vs_baseline[j])
            for j in range(n)
        ],
    )
    return env


RUNNERS = {
    "simulate": run_simulate,
    "equilibria": run_equilibria,
    "bifurcate": run_bifurcate,
    "basin": run_basin,
    "network": run_network,
}


def run(cfg: ExperimentConfig) -> ResultEnvelope:
    t0 = time.perf_counter()
    env = RUNNERS[cfg.command](cfg)
    env.metadata["wall_clock_seconds"] = round(time.perf_counter() - t0, 3)
    return env


def write_envelope(env: ResultEnvelope, out: str | None) -> None:
    if out is None:
        sys.stdout.write(envelope_text(env))
        for name, (cols, rows) in env.payload.items():
            sys.stdout.write(f"\n# --- {name}\n")
            sys.stdout.write(csv_text(cols, rows))
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / "metadata.ini").write_text(envelope_text(env), encoding="utf-8")
    for name, (cols, rows) in env.payload.items():
        (d / name).write_text(csv_text(cols, rows), encoding="utf-8")


def _floats_arg(s: str) -> list[float]:
    try:
        return [float(v) for v in s.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


# flag dest -> (section, key)
_MODEL_FLAGS = {
    "beta": ("model", "beta"), "delta": ("model", "delta"), "kp": ("model", "kp"),
    "kx": ("model", "kx"), "u0": ("model", "u0"), "taux": ("model", "taux"), "seed": ("run", "seed"),
}
_INTEGRATION_FLAGS = {"dt": ("integration", "dt"), "tend": ("integration", "tend")}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=sorted(PRESETS), help="figure preset; see 'nodsis presets'")
    common.add_argument("--config", help="sectioned key-value config file (or a metadata.ini envelope)")
    common.add_argument("--out", help="output directory (default: print to stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=["csv"], default="csv")
    for flag in ("beta", "delta", "kp", "kx", "u0", "taux"):
        common.add_argument(f"--{flag}", type=float)
    integ = argparse.ArgumentParser(add_help=False)
    integ.add_argument("--dt", type=float)
    integ.add_argument("--tend", type=float)

    parser = argparse.ArgumentParser(prog="nodsis", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nodsis {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common, integ], help="integrate trajectories")
    p.add_argument("--p0", type=_floats_arg, help="initial infected fraction(s), comma-separated")
    p.add_argument("--x0", type=_floats_arg, help="initial opinion(s), comma-separated")
    p.add_argument("--n-runs", type=int, dest="n_runs")
    p.add_argument("--mode", choices=["explicit", "random", "split"])

    sub.add_parser("equilibria", parents=[common], help="locate and classify equilibria")

    p = sub.add_parser("bifurcate", parents=[common], help="one-parameter bifurcation diagram")
    p.add_argument("--parameter")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--num", type=int)

    p = sub.add_parser("basin", parents=[common, integ], help="basins of attraction from random states")
    p.add_argument("--n-samples", type=int, dest="n_samples")

    p = sub.add_parser("network", parents=[common, integ], help="networked model vs network SIS")
    p.add_argument("--contact", help="contact graph edge-list file")
    p.add_argument("--communication", help="communication graph edge-list file")
    p.add_argument("--x0-sign", dest="x0_sign", choices=["neg", "pos", "mixed", "explicit"])
    p.add_argument("--degree-from", dest="degree_from", choices=["contact", "communication"])
    p.add_argument("--peer-term", dest="peer_term", choices=["own", "neighbors"])
    p.add_argument("--p0", type=_floats_arg)
    p.add_argument("--x0", type=_floats_arg)

    sub.add_parser("presets", help="list presets and the choices they make")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    out: dict[str, dict] = {}
    table = dict(_MODEL_FLAGS, **_INTEGRATION_FLAGS)
    if args.command == "simulate":
        table.update(p0=("initial", "p0"), x0=("initial", "x0"), n_runs=("initial", "n_runs"), mode=("initial", "mode"))
    elif args.command == "bifurcate":
        table.update({k: ("sweep", k) for k in ("parameter", "start", "stop", "num")})
    elif args.command == "basin":
        table.update(n_samples=("basin", "n_samples"))
    elif args.command == "network":
        table.update({k: ("network", k) for k in ("contact", "communication", "x0_sign", "degree_from", "peer_term", "p0", "x0")})
    for dest, (sec, key) in table.items():
        val = getattr(args, dest, None)
        if val is not None:
            out.setdefault(sec, {})[key] = val
    if args.command == "simulate" and ("p0" in out.get("initial", {}) or "x0" in out.get("initial", {})):
        out["initial"].setdefault("mode", "explicit")
    if args.command == "network" and ("p0" in out.get("network", {}) or "x0" in out.get("network", {})):
        out["network"].setdefault("x0_sign", "explicit")
    return out


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    file_layer = parse_file(args.config) if args.config else None
    return resolve(args.command, args.preset, file_layer, _overrides(args))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "presets":
        for name in sorted(PRESETS):
            print(f"{name}: {PRESET_NOTES[name]}")
        return EXIT_OK
    try:
        cfg = config_from_args(args)
        env = run(cfg)
        write_envelope(env, args.out)
    except ConfigError as exc:
        print(f"nodsis: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolationError as exc:
        print(f"nodsis: invariance violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except NonConvergenceError as exc:
        print(f"nodsis: non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
