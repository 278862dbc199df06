from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from sdm import formats
from sdm.cli import run
from sdm.quantile import StepQuantile

S = StepQuantile


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "a1": write(tmp_path / "exA_q1.json", {"breakpoints": [0, 0.5], "values": [0, 3]}),
        "a2": write(tmp_path / "exA_q2.json", {"breakpoints": [0], "values": [2]}),
        "b1": write(tmp_path / "exB_q1.json", {"breakpoints": [0], "values": [2]}),
        "b2": write(tmp_path / "exB_q2.json", {"breakpoints": [0, 0.25], "values": [1, 4]}),
        "market": write(tmp_path / "market.json", {"states": [{"p": 0.5, "rho": 1}, {"p": 0.5, "rho": 3}]}),
        "dir": tmp_path,
    }


class TestCheck:
    def test_reflexive(self, files, capsys):
        assert run(["check", "--order", "1", files["a1"], files["a1"]]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep == {"holds": True, "witness": None, "margin": 0.0}

    def test_violated(self, files, capsys):
        assert run(["check", "--order", "2", files["a1"], files["a2"]]) == 3
        rep = json.loads(capsys.readouterr().out)
        assert rep["witness"] == 0.5 and rep["margin"] == -1.0

    def test_invalid_quantile(self, files, capsys):
        bad = write(files["dir"] / "bad.json", {"breakpoints": [0, 0.5], "values": [3, 1]})
        assert run(["check", "--order", "1", bad, files["a1"]]) == 2
        assert "increasing" in capsys.readouterr().err

    def test_missing_file(self, files):
        assert run(["check", "--order", "1", "nope.json", files["a1"]]) == 1

    def test_malformed_json(self, files):
        p = files["dir"] / "broken.json"
        p.write_text("{not json")
        assert run(["check", "--order", "1", str(p), files["a1"]]) == 1

    def test_bad_arguments(self):
        with pytest.raises(SystemExit) as exc:
            run(["check", "--order", "5", "a", "b"])
        assert exc.value.code == 1


class TestEnvelope:
    def test_example_a(self, files):
        out = files["dir"] / "env.json"
        assert run(["envelope", "--fsd", files["a1"], "--ssd", files["a2"], "-o", str(out)]) == 0
        sol = formats.envelope_from_json(json.loads(out.read_text()))
        assert sol.q_star == S((0, 0.5), (2, 3))

    def test_oracle(self, files, capsys):
        assert run(["envelope", "--fsd", files["b1"], "--ssd", files["b2"], "--oracle", "--grid", "500"]) == 0
        cap = capsys.readouterr()
        report = json.loads(cap.out)["oracle"]
        assert report["max_deviation"] <= 1e-10
        assert report["min_dominance_margin"] >= -1e-10
        assert "oracle" in cap.err

    def test_seed_env_override(self, files, capsys, monkeypatch):
        monkeypatch.setenv("SDM_SEED", "17")
        run(["envelope", "--fsd", files["a1"], "--ssd", files["a2"], "--oracle", "--grid", "10", "--seed", "3"])
        assert json.loads(capsys.readouterr().out)["oracle"]["seed"] == 17

    def test_multiple_constraints(self, files, capsys):
        assert run(["envelope", "--fsd", files["a1"], "--fsd", files["b1"], "--ssd", files["b2"]]) == 0
        assert json.loads(capsys.readouterr().out)["q_star"]

    def test_needs_constraint(self):
        assert run(["envelope"]) == 1

    def test_grid_bound(self, files):
        with pytest.raises(SystemExit):
            run(["envelope", "--fsd", files["a1"], "--oracle", "--grid", str(10**6 + 1)])


class TestPriceAndSolve:
    def test_price(self, files, capsys):
        q = write(files["dir"] / "q.json", {"breakpoints": [0, 0.5], "values": [1, 2]})
        assert run(["price", "-q", q, "-m", files["market"]]) == 0
        assert capsys.readouterr().out.strip() == "2.5"

    def test_solve(self, files, capsys):
        out = files["dir"] / "payoff.json"
        assert run(["solve", "--fsd", files["a1"], "--ssd", files["a2"], "-m", files["market"], "-o", str(out)]) == 0
        assert capsys.readouterr().out.strip() == "4.5"
        payoff = formats.payoff_from_json(json.loads(out.read_text()))
        assert {e.state: e.value for e in payoff.entries} == {0: 3.0, 1: 2.0}
        env = formats.envelope_from_json(json.loads((files["dir"] / "payoff.envelope.json").read_text()))
        assert env.q_star == S((0, 0.5), (2, 3))

    def test_invalid_market(self, files):
        m = write(files["dir"] / "m.json", {"states": [{"p": 0.5, "rho": 1}]})
        assert run(["price", "-q", files["a1"], "-m", m]) == 2


class TestFromSamples:
    def test_uniform(self, files, capsys):
        p = files["dir"] / "s.csv"
        p.write_text("2\n2\n7\n")
        assert run(["quantile", "from-samples", str(p)]) == 0
        q = formats.quantile_from_json(json.loads(capsys.readouterr().out))
        assert q == S((0, 2 / 3), (2, 7))

    def test_weighted(self, files, capsys):
        p = files["dir"] / "s.csv"
        p.write_text("# value,weight\n3,0.25\n1,0.75\n")
        out = files["dir"] / "q.json"
        assert run(["quantile", "from-samples", str(p), "-o", str(out)]) == 0
        assert formats.quantile_from_json(json.loads(out.read_text())) == S((0, 0.75), (1, 3))

    def test_partial_weights(self, files):
        p = files["dir"] / "s.csv"
        p.write_text("3,0.25\n1\n")
        assert run(["quantile", "from-samples", str(p)]) == 1

    def test_negative_sample(self, files):
        p = files["dir"] / "s.csv"
        p.write_text("-3\n")
        assert run(["quantile", "from-samples", str(p)]) == 2


def test_plot(files):
    out = files["dir"] / "curves.csv"
    assert run(["plot", "--fsd", files["a1"], "--ssd", files["a2"], "-o", str(out), "--points", "8"]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["t", "Q1bar", "Q2bar", "Qstar", "P2", "phi"]
    assert [float(r["t"]) for r in rows] == [k / 8 for k in range(8)]
    row = rows[4]
    assert float(row["Qstar"]) == 3.0 and float(row["phi"]) == 1.0


def test_written_json_round_trips(files):
    env = files["dir"] / "env.json"
    run(["envelope", "--fsd", files["b1"], "--ssd", files["b2"], "-o", str(env)])
    sol = formats.envelope_from_json(json.loads(env.read_text()))
    again = formats.dumps(formats.envelope_to_json(sol))
    assert again == env.read_text()


def test_module_entry_point(files):
    res = subprocess.run(
        [sys.executable, "-m", "sdm", "check", "--order", "1", files["a2"], files["a1"]],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 3
