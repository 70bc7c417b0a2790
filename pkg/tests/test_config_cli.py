import json
from pathlib import Path

import pytest

from jchcontrol.cli import main
from jchcontrol.config import ConfigError, config_from_dict, load_config
from jchcontrol.report import emit_report, render_json, run

ROOT = Path(__file__).resolve().parents[1]
DEFAULT = ROOT / "configs" / "default.json"
ABELIAN = ROOT / "configs" / "abelian.json"

BASE = {"M": 2, "K": 2, "graph": [[1, 2]],
        "params": {"omega_P": [1, 1], "omega_A": [1, 1], "omega_I": [1, 1], "omega_H": 1}}


def with_(**kw):
    data = json.loads(json.dumps(BASE))
    data.update(kw)
    return data


def test_load_default():
    cfg = load_config(DEFAULT)
    assert (cfg.M, cfg.K, cfg.graph) == (2, 3, ((1, 2),))
    assert cfg.generator_descriptors() == ["drift", "sigma_z(1)", "sigma_z(2)", "hop_sum", "identity"]
    assert cfg.ordered_suites()[0] == "charge"


@pytest.mark.parametrize("bad,field", [
    ({"M": 0}, "'M'"),
    ({"K": "3"}, "'K'"),
    ({"graph": [[1, 1]]}, "graph[0]"),
    ({"graph": [[1, 3]]}, "graph[0]"),
    ({"suites": ["rank", "bogus"]}, "suites"),
    ({"tolerances": {"rank": -1}}, "tolerances.rank"),
    ({"generators": ["warp(1)"]}, "generators[0]"),
    ({"colour": 1}, "unknown field"),
    ({"t_minus": 2}, "t_minus"),
])
def test_config_errors_name_the_field(bad, field):
    with pytest.raises(ConfigError, match=field.replace("[", r"\[").replace("]", r"\]")):
        config_from_dict(with_(**bad))


def test_missing_frequencies():
    data = with_()
    del data["params"]["omega_I"]
    with pytest.raises(ConfigError, match="omega_I"):
        config_from_dict(data)
    data = with_()
    data["params"]["omega_P"] = [1, 0]
    with pytest.raises(ConfigError, match=r"omega_P\[1\]"):
        config_from_dict(data)


def test_json_syntax_error_reports_line(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{\n  "M": 2,\n  "K": 2,,\n}')
    with pytest.raises(ConfigError, match="line 3"):
        load_config(p)


def test_structured_round_trip():
    cfg = config_from_dict(with_(suites=["charge", "rank", "relative_bound"]))
    rep = run(cfg)
    assert json.loads(render_json(rep)) == rep.to_dict()


def test_text_has_one_line_per_block():
    rep = run(config_from_dict(with_(suites=["rank"])))
    text = emit_report(rep, "text")
    lines = [ln for ln in text.splitlines() if ln.strip().startswith("n=")]
    assert len(lines) == 3
    assert "d_n=8" in lines[2] and "closure_dim=64" in lines[2]


def test_k0_rank_precondition_keeps_charge():
    cfg = config_from_dict(with_(K=0, graph=[], suites=["charge", "rank"]))
    rep = run(cfg)
    charge, rank = rep.suites
    assert charge.status == "pass" and charge.data["multiplicities"] == (1,)
    assert rank.status == "error" and "precondition" in rank.message
    assert not rep.passed


def test_disconnected_graph_rank_error():
    cfg = config_from_dict({"M": 3, "K": 1, "graph": [[1, 2]],
                            "params": {"omega_P": [1, 1, 1], "omega_A": [1, 1, 1],
                                       "omega_I": [1, 1, 1], "omega_H": 1},
                            "suites": ["rank", "graph_reduction"]})
    rep = run(cfg)
    assert [s.status for s in rep.suites] == ["error", "error"]


def test_three_cavity_config_runs():
    rep = run(load_config(ROOT / "configs" / "three_cavity_path.json"))
    assert rep.passed, [(s.name, s.status) for s in rep.suites]


def test_cli_abelian_fails(capsys):
    assert main(["closure", "--config", str(ABELIAN)]) == 1
    assert "MISSING" in capsys.readouterr().out


def test_cli_exit_2_on_bad_config(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(with_(M=-1)))
    assert main(["report", "--config", str(p)]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["report", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_exit_2_on_resource_guard(tmp_path):
    p = tmp_path / "big.json"
    p.write_text(json.dumps(with_(K=40, max_states=1000)))
    assert main(["report", "--config", str(p), "--suite", "charge"]) == 2


def test_cli_tol_and_suite_overrides(tmp_path):
    out = tmp_path / "r.json"
    code = main(["report", "--config", str(DEFAULT), "--suite", "rank", "--suite", "charge",
                 "--tol", "rank=1e-8", "--format", "json", "--out", str(out)])
    data = json.loads(out.read_text())
    assert code == 0
    assert [s["name"] for s in data["suites"]] == ["charge", "rank"]
    assert data["config"]["tolerances"]["rank"] == 1e-8
    assert data["schema_version"] == "1"
    assert main(["report", "--config", str(DEFAULT), "--tol", "rank"]) == 2
    assert main(["report", "--config", str(DEFAULT), "--tol", "nosuch=1"]) == 2


def test_cli_spectrum(capsys):
    assert main(["spectrum", "--config", str(DEFAULT), "--operator", "charge_N", "--block", "2"]) == 0
    out = capsys.readouterr().out
    assert "n=2: " + " ".join(["2"] * 8) in out
    assert main(["spectrum", "--config", str(DEFAULT), "--operator", "drift + sigma_x(1)",
                 "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["eigenvalues"]["all"]) == 25


def test_cli_graph_and_verify(capsys):
    assert main(["graph", "--config", str(DEFAULT)]) == 0
    assert "leaf order" in capsys.readouterr().out
    assert main(["verify", "--config", str(DEFAULT), "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert [s["name"] for s in data["suites"]] == ["charge", "symmetry", "identities", "complementarity"]


def test_cli_recurrence_subcommand(tmp_path):
    cfg = tmp_path / "small.json"
    cfg.write_text(json.dumps(with_(K=1)))
    assert main(["recurrence", "--config", str(cfg)]) == 0
