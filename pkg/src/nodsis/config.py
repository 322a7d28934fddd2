"""Experiment configuration: schema, flat sectioned key-value files, presets.

File format (``#`` or ``;`` start a comment)::

    [model]
    beta = 0.75
    delta = 0.3

    [integration]
    dt = 0.01

Unknown sections or keys are rejected with the offending line number.
A ``[metadata]`` section, as written into result envelopes, is skipped so
that an envelope re-parses as the configuration that produced it.
"""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field
from importlib.resources import files
from pathlib import Path

import numpy as np

from .bifurcation import PARAMETERS, SweepConfig
from .errors import ConfigError
from .integrator import DEFAULT_SEED, IntegrationConfig
from .model import ModelParams
from .network import DEGREE_FROM, PEER_TERMS

COMMANDS = ("simulate", "equilibria", "bifurcate", "basin", "network")


def _float(s: str) -> float:
    return float(s)


def _int(s: str) -> int:
    return int(s)


def _str(s: str) -> str:
    return s.strip()


def _floats(s: str) -> list[float]:
    s = s.strip()
    return [float(v) for v in s.split(",")] if s else []


def _path(s: str) -> str:
    return s.strip()


SCHEMA: dict[str, dict[str, object]] = {
    "model": {"beta": _float, "delta": _float, "kp": _float, "kx": _float, "u0": _float, "taux": _float},
    "integration": {"dt": _float, "tend": _float, "convergence_tol": _float, "record_stride": _int},
    "initial": {"mode": _str, "p0": _floats, "x0": _floats, "n_runs": _int},
    "sweep": {"parameter": _str, "start": _float, "stop": _float, "num": _int},
    "basin": {"n_samples": _int},
    "network": {
        "contact": _path,
        "communication": _path,
        "deltas": _floats,
        "degree_from": _str,
        "peer_term": _str,
        "x0_sign": _str,
        "p0": _floats,
        "x0": _floats,
    },
    "run": {"seed": _int, "preset": _str},
}

# Sections each command reads; only these appear in its resolved config.
SECTIONS = {
    "simulate": ("model", "integration", "initial", "run"),
    "equilibria": ("model", "run"),
    "bifurcate": ("model", "sweep", "run"),
    "basin": ("model", "integration", "basin", "run"),
    "network": ("model", "integration", "network", "run"),
}

DEFAULTS: dict[str, dict[str, object]] = {
    "model": {"beta": 0.75, "delta": 0.3, "kp": 0.7, "kx": 0.3, "u0": 0.7, "taux": 1.0},
    "integration": {"dt": 0.01, "tend": 500.0, "convergence_tol": 1e-10, "record_stride": 10},
    "initial": {"mode": "explicit", "p0": [0.1], "x0": [0.3], "n_runs": 12},
    "sweep": {"parameter": "beta_bar", "start": 0.01, "stop": 0.99, "num": 400},
    "basin": {"n_samples": 100},
    "network": {
        "contact": "",
        "communication": "",
        "deltas": [],
        "degree_from": "contact",
        "peer_term": "own",
        "x0_sign": "neg",
        "p0": [],
        "x0": [],
    },
    "run": {"seed": DEFAULT_SEED, "preset": ""},
}

INITIAL_MODES = ("explicit", "random", "split")
X0_SIGNS = ("neg", "pos", "mixed", "explicit")


def data_path(name: str) -> str:
    return str(files("nodsis") / "data" / name)


_FIG1 = {"delta": 0.3, "kp": 0.7, "kx": 0.3, "beta": 0.5}
_FIG4 = {"beta": 0.5, "delta": 0.3, "kp": 0.5, "kx": 0.3, "u0": 0.7, "taux": 1.0}

# Every published parameter value for these experiments is fixed here. The remaining
# entries (initial conditions, seeds, graph topology) are choices of this
# package, listed in PRESET_NOTES.
PRESETS: dict[str, dict[str, dict[str, object]]] = {
    "fig1a": {"model": {**_FIG1, "u0": 0.2}, "sweep": {"parameter": "beta_bar", "start": 0.01, "stop": 0.99, "num": 400}},
    "fig1b": {"model": {**_FIG1, "u0": 0.7}, "sweep": {"parameter": "beta_bar", "start": 0.01, "stop": 0.99, "num": 400}},
    "fig2": {
        "model": {"beta": 0.75, "delta": 0.3, "kp": 0.7, "kx": 0.3, "u0": 0.7, "taux": 1.0},
        "initial": {"mode": "random", "n_runs": 12},
    },
    "fig3": {
        "model": {"beta": 0.75, "delta": 0.3, "kp": 0.7, "kx": 0.7, "u0": 0.9, "taux": 1.0},
        "initial": {"mode": "split", "n_runs": 12},
    },
    "fig4-coop": {
        "model": dict(_FIG4),
        "network": {"contact": "@fig4_contact.txt", "communication": "@fig4_comm_coop.txt", "x0_sign": "neg"},
    },
    "fig4-ant": {
        "model": dict(_FIG4),
        "network": {"contact": "@fig4_contact.txt", "communication": "@fig4_comm_ant.txt", "x0_sign": "neg"},
    },
}

PRESET_NOTES = {
    "fig1a": "beta_bar swept over 400 points in [0.01, 0.99] (grid is a package choice).",
    "fig1b": "beta_bar swept over 400 points in [0.01, 0.99] (grid is a package choice).",
    "fig2": "12 seeded uniform initial states in the interior of [0,1]x[-1,1] (package choice); "
    "pick the panel with --beta 0.25|0.36|0.44|0.75.",
    "fig3": "6 averter (x0<0) and 6 risk-seeking (x0>0) seeded initial states (package choice).",
    "fig4-coop": "five-node ring-plus-chord contact graph and all-positive communication graph "
    "(topology is a package choice); p0 ~ U(0.01, 0.1), |x0| ~ U(0.05, 0.3), seeded.",
    "fig4-ant": "same contact graph; communication camps {0,1,2} and {3,4} joined by negative edges "
    "(package choice); initial states as fig4-coop.",
}


def _resolve_path(value: str) -> str:
    if value.startswith("@"):
        return data_path(value[1:])
    return value


def format_value(v) -> str:
    if isinstance(v, list):
        return ",".join(repr(float(e)) for e in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class ExperimentConfig:
    """A resolved configuration for one command."""

    command: str
    sections: dict[str, dict[str, object]] = field(default_factory=dict)

    def __getitem__(self, section: str) -> dict[str, object]:
        return self.sections[section]

    def model_params(self) -> ModelParams:
        m = self.sections["model"]
        try:
            return ModelParams(m["beta"], m["delta"], m["kp"], m["kx"], m["u0"], m["taux"])
        except ValueError as exc:
            raise ConfigError(f"[model]: {exc}") from None

    def integration(self) -> IntegrationConfig:
        c = self.sections["integration"]
        try:
            return IntegrationConfig(c["dt"], c["tend"], c["convergence_tol"], c["record_stride"])
        except ValueError as exc:
            raise ConfigError(f"[integration]: {exc}") from None

    def sweep_config(self) -> SweepConfig:
        s = self.sections["sweep"]
        if s["num"] < 1:
            raise ConfigError("[sweep] num must be >= 1")
        values = np.linspace(s["start"], s["stop"], s["num"]) if s["num"] > 1 else np.array([s["start"]])
        try:
            return SweepConfig(self.model_params(), s["parameter"], values)
        except ValueError as exc:
            raise ConfigError(f"[sweep]: {exc}") from None

    @property
    def seed(self) -> int:
        return int(self.sections["run"]["seed"])

    def to_text(self) -> str:
        out = []
        for sec in SECTIONS[self.command]:
            out.append(f"[{sec}]")
            for key in SCHEMA[sec]:
                out.append(f"{key} = {format_value(self.sections[sec][key])}")
            out.append("")
        return "\n".join(out)


def parse_text(text: str, source: str = "<config>") -> dict[str, dict[str, object]]:
    """Parse sectioned key-value text into typed values (only the keys present)."""
    out: dict[str, dict[str, object]] = {}
    section = None
    skipping = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            skipping = name == "metadata"
            if not skipping and name not in SCHEMA:
                raise ConfigError(f"{source}:{lineno}: unknown section [{name}]")
            section = name
            if not skipping:
                out.setdefault(name, {})
            continue
        if skipping:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        if section is None:
            raise ConfigError(f"{source}:{lineno}: key {key!r} appears before any [section]")
        if key not in SCHEMA[section]:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} in [{section}]")
        try:
            out[section][key] = SCHEMA[section][key](value.strip())
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: [{section}] {key}: cannot parse {value.strip()!r}") from None
    return out


def parse_file(path: str | os.PathLike) -> dict[str, dict[str, object]]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {path} does not exist")
    return parse_text(p.read_text(encoding="utf-8"), str(path))


def _merge(base: dict, layer: dict) -> None:
    for sec, kv in layer.items():
        base.setdefault(sec, {}).update(kv)


def resolve(command: str, preset: str | None = None, file_layer: dict | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Combine defaults < preset < config file < command-line overrides and validate."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    sections = copy.deepcopy(DEFAULTS)
    file_layer = file_layer or {}
    preset = preset or file_layer.get("run", {}).get("preset") or ""
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        _merge(sections, copy.deepcopy(PRESETS[preset]))
    _merge(sections, file_layer)
    _merge(sections, overrides or {})
    sections["run"]["preset"] = preset

    net = sections["network"]
    for key in ("contact", "communication"):
        net[key] = _resolve_path(str(net[key]))
    cfg = ExperimentConfig(command, {s: sections[s] for s in SECTIONS[command]})
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    cfg.model_params()
    secs = cfg.sections
    if "integration" in secs:
        cfg.integration()
    if "initial" in secs:
        ini = secs["initial"]
        if ini["mode"] not in INITIAL_MODES:
            raise ConfigError(f"[initial] mode must be one of {INITIAL_MODES}")
        if ini["mode"] == "explicit" and (len(ini["p0"]) != len(ini["x0"]) or not ini["p0"]):
            raise ConfigError("[initial] p0 and x0 must be non-empty lists of equal length")
        if ini["n_runs"] < 1:
            raise ConfigError("[initial] n_runs must be >= 1")
    if "sweep" in secs:
        if secs["sweep"]["parameter"] not in PARAMETERS:
            raise ConfigError(f"[sweep] parameter must be one of {PARAMETERS}")
        cfg.sweep_config()
    if "basin" in secs and secs["basin"]["n_samples"] < 1:
        raise ConfigError("[basin] n_samples must be >= 1")
    if "network" in secs:
        net = secs["network"]
        for key in ("contact", "communication"):
            if not net[key]:
                raise ConfigError(f"[network] {key} graph file is required")
            if not Path(net[key]).is_file():
                raise ConfigError(f"[network] {key} file {net[key]} does not exist")
        if net["degree_from"] not in DEGREE_FROM:
            raise ConfigError(f"[network] degree_from must be one of {DEGREE_FROM}")
        if net["peer_term"] not in PEER_TERMS:
            raise ConfigError(f"[network] peer_term must be one of {PEER_TERMS}")
        if net["x0_sign"] not in X0_SIGNS:
            raise ConfigError(f"[network] x0_sign must be one of {X0_SIGNS}")
        if net["x0_sign"] == "explicit" and (not net["p0"] or len(net["p0"]) != len(net["x0"])):
            raise ConfigError("[network] explicit initial state needs p0 and x0 lists of equal length")
