import csv
import io

import numpy as np
import pytest

from nodsis.cli import EXIT_CONFIG, EXIT_INVARIANT, EXIT_NONCONVERGENCE, EXIT_OK, main
from nodsis.config import PRESETS, ConfigError, parse_file, parse_text, resolve


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run_cli(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def test_precedence_defaults_preset_file_flags():
    cfg = resolve("equilibria")
    assert cfg["model"]["beta"] == 0.75
    cfg = resolve("equilibria", "fig1a")
    assert cfg["model"]["u0"] == 0.2
    cfg = resolve("equilibria", "fig1a", {"model": {"u0": 0.5}})
    assert cfg["model"]["u0"] == 0.5
    cfg = resolve("equilibria", "fig1a", {"model": {"u0": 0.5}}, {"model": {"u0": 0.6}})
    assert cfg["model"]["u0"] == 0.6


def test_parse_text_typed_values():
    layer = parse_text("[model]\nbeta = 0.4\n# comment\n[initial]\np0 = 0.1, 0.2\n")
    assert layer == {"model": {"beta": 0.4}, "initial": {"p0": [0.1, 0.2]}}


@pytest.mark.parametrize(
    "text, msg",
    [
        ("[model]\ngamma = 1\n", r"<config>:2: unknown key 'gamma'"),
        ("[nope]\n", r"<config>:1: unknown section"),
        ("beta = 1\n", r"<config>:1: key 'beta' appears before"),
        ("[model]\nbeta 1\n", r"<config>:2: expected 'key = value'"),
        ("[model]\n\nbeta = abc\n", r"<config>:3: \[model\] beta: cannot parse"),
    ],
)
def test_parse_diagnostics(text, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_text(text)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        parse_file(tmp_path / "nope.ini")


def test_missing_graph_file(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        resolve("network", overrides={"network": {"contact": str(tmp_path / "a.txt"), "communication": str(tmp_path / "b.txt")}})


def test_invalid_model_values():
    with pytest.raises(ConfigError, match=r"\[model\]"):
        resolve("equilibria", overrides={"model": {"delta": -1.0}})


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_presets_resolve(preset):
    for command in ("simulate", "equilibria", "bifurcate", "basin", "network"):
        if command == "network" and not preset.startswith("fig4"):
            continue
        cfg = resolve(command, preset)
        assert cfg["run"]["preset"] == preset


def test_presets_listing(capsys):
    assert main(["presets"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in PRESETS:
        assert name in out


def test_simulate_zero_state(tmp_path):
    code, out = run_cli(tmp_path, "simulate", "--beta", "0.25", "--p0", "0", "--x0", "0")
    assert code == EXIT_OK
    rows = read_csv(out / "trajectory.csv")
    assert list(rows[0]) == ["t", "p", "x"]
    assert all(float(r["p"]) == 0 and float(r["x"]) == 0 for r in rows)


def test_simulate_fig2_preset(tmp_path):
    code, out = run_cli(tmp_path, "simulate", "--preset", "fig2", "--beta", "0.75")
    assert code == EXIT_OK
    summary = read_csv(out / "summary.csv")
    assert len(summary) == 12
    for r in summary:
        assert r["limit_class"] == ("OEE_PLUS" if float(r["x0"]) > 0 else "OEE_MINUS")
        assert r["sign_invariant"] == "true"


def test_simulate_fig3_preset(tmp_path):
    code, out = run_cli(tmp_path, "simulate", "--preset", "fig3")
    assert code == EXIT_OK
    for r in read_csv(out / "summary.csv"):
        if float(r["x0"]) < 0:
            assert float(r["p_final"]) < 1e-6
        else:
            assert float(r["p_final"]) > 0.6


def test_equilibria_rows(tmp_path):
    code, out = run_cli(tmp_path, "equilibria", "--preset", "fig1b", "--beta", "0.75")
    assert code == EXIT_OK
    assert len(read_csv(out / "equilibria.csv")) == 4
    assert read_csv(out / "regime.csv")[0]["regime"] == "BISTABLE_OPINIONATED"
    code, out = run_cli(tmp_path, "equilibria", "--preset", "fig1b", "--beta", "0.25", name="low")
    assert len(read_csv(out / "equilibria.csv")) == 1


def test_equilibria_assumption_warning(tmp_path):
    code, out = run_cli(tmp_path, "equilibria", "--u0", "1.2")
    assert code == EXIT_OK
    reg = read_csv(out / "regime.csv")[0]
    assert reg["regime"] == "" and "assumption" in reg["warning"]


@pytest.mark.parametrize("preset, branches, events", [("fig1a", 2, 1), ("fig1b", 4, 3)])
def test_bifurcate_presets(tmp_path, preset, branches, events):
    code, out = run_cli(tmp_path, "bifurcate", "--preset", preset)
    assert code == EXIT_OK
    rows = read_csv(out / "branches.csv")
    assert len({r["class"] for r in rows}) == branches
    assert len(read_csv(out / "events.csv")) == events


def test_bifurcate_single_point(tmp_path):
    code, out = run_cli(tmp_path, "bifurcate", "--start", "0.75", "--num", "1")
    assert code == EXIT_OK
    rows = read_csv(out / "branches.csv")
    assert {r["parameter"] for r in rows} == {"0.75"}
    assert read_csv(out / "events.csv") == []


def test_network_presets(tmp_path):
    code, out = run_cli(tmp_path, "network", "--preset", "fig4-coop", "--x0-sign", "neg")
    assert code == EXIT_OK
    rows = read_csv(out / "consensus.csv")
    assert all(float(r["difference"]) < 0 for r in rows)
    assert "outcome = AGREEMENT_AVERSE" in (out / "metadata.ini").read_text()
    code, out = run_cli(tmp_path, "network", "--preset", "fig4-ant", name="ant")
    assert code == EXIT_OK
    assert "outcome = DISSENSUS" in (out / "metadata.ini").read_text()


def test_single_node_network_matches_simulate(tmp_path):
    g = tmp_path / "one.txt"
    g.write_text("n=1\n")
    code, net = run_cli(tmp_path, "network", "--contact", str(g), "--communication", str(g), "--p0", "0.1", "--x0", "0.3", name="net")
    assert code == EXIT_OK
    code, sim = run_cli(tmp_path, "simulate", "--p0", "0.1", "--x0", "0.3", name="sim")
    assert code == EXIT_OK
    a, b = read_csv(net / "trajectory.csv"), read_csv(sim / "trajectory.csv")
    assert len(a) == len(b)
    for r, s in zip(a, b):
        assert r["t"] == s["t"]
        assert abs(float(r["p_0"]) - float(s["p"])) <= 1e-12
        assert abs(float(r["x_0"]) - float(s["x"])) <= 1e-12


def test_basin_command(tmp_path):
    code, out = run_cli(tmp_path, "basin", "--n-samples", "8")
    assert code == EXIT_OK
    rows = read_csv(out / "basin.csv")
    assert len(rows) == 8
    assert all(r["limit_class"] == ("OEE_PLUS" if float(r["x0"]) > 0 else "OEE_MINUS") for r in rows)


def test_determinism_and_round_trip(tmp_path):
    code, a = run_cli(tmp_path, "simulate", "--preset", "fig2", "--tend", "20", "--seed", "9", name="a")
    assert code == EXIT_OK
    code, b = run_cli(tmp_path, "simulate", "--config", str(a / "metadata.ini"), name="b")
    assert code == EXIT_OK
    for name in ("trajectory.csv", "summary.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    layer = parse_file(a / "metadata.ini")
    again = resolve("simulate", file_layer=layer)
    assert again["model"] == resolve("simulate", "fig2", overrides={"integration": {"tend": 20.0}})["model"]
    assert again.seed == 9
    assert again.to_text() == resolve("simulate", file_layer=parse_file(b / "metadata.ini")).to_text()


def test_stdout_output(capsys):
    assert main(["equilibria", "--beta", "0.25"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("[metadata]")
    assert "# --- equilibria.csv" in out
    table = out.split("# --- equilibria.csv\n")[1].split("\n# ---")[0]
    assert len(list(csv.DictReader(io.StringIO(table)))) == 1


def test_exit_code_config(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[model]\nbogus = 1\n")
    code, _ = run_cli(tmp_path, "simulate", "--config", str(cfg))
    assert code == EXIT_CONFIG
    assert "bad.ini:2" in capsys.readouterr().err


def test_exit_code_invariant(tmp_path):
    code, _ = run_cli(tmp_path, "simulate", "--beta", "0.99", "--delta", "0.01", "--p0", "0.9", "--x0", "0.9", "--dt", "50", "--tend", "100")
    assert code == EXIT_INVARIANT


def test_exit_code_nonconvergence(tmp_path):
    code, _ = run_cli(tmp_path, "network", "--preset", "fig4-coop", "--tend", "1")
    assert code == EXIT_NONCONVERGENCE


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("nodsis ")


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--beta", "abc"])
    assert exc.value.code == 2
