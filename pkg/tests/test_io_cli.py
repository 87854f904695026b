import json
from fractions import Fraction

import numpy as np
import pytest

from entangle_lab.cli import RunConfig, UsageError, main, run
from entangle_lab.games import chsh_game
from entangle_lab.io import ParseError, bundled_game, game_to_json, load_game, parse_game, parse_strategy
from entangle_lab.report import Report


def chsh_dict():
    return json.loads(game_to_json(chsh_game()))


@pytest.fixture
def uniform_strategy(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"table": np.full((2, 2, 2, 2), 0.25).tolist()}))
    return p


class TestParseGame:
    def test_bundled(self):
        g = bundled_game("chsh")
        assert g.pi_exact == (Fraction(1, 4),) * 4
        assert np.array_equal(g.payoff, chsh_game().payoff)

    def test_roundtrip(self):
        g = parse_game(game_to_json(chsh_game()))
        assert np.array_equal(g.pi, chsh_game().pi)

    def test_pi_sum(self):
        d = chsh_dict()
        d["pi"] = [[0.3, 0.2], [0.2, 0.2]]
        with pytest.raises(ParseError, match="pi sums to 0.9"):
            parse_game(json.dumps(d), "g.json")

    def test_payoff_value_named(self):
        d = chsh_dict()
        d["payoff"]["0,1"][1][0] = 2
        with pytest.raises(ParseError, match=r"payoff\['0,1'\]\[1\]\[0\] = 2"):
            parse_game(json.dumps(d))

    def test_payoff_shape(self):
        d = chsh_dict()
        d["payoff"]["1,1"] = [[1, 0]]
        with pytest.raises(ParseError, match="2x2"):
            parse_game(json.dumps(d))

    def test_missing_field(self):
        d = chsh_dict()
        del d["answers_b"]
        with pytest.raises(ParseError, match="answers_b"):
            parse_game(json.dumps(d))

    def test_syntax_error_positioned(self):
        with pytest.raises(ParseError, match=r"bad.json:2:\d+"):
            parse_game('{"questions_a": [0],\n  "pi": [1,, 0]}', "bad.json")

    def test_load_from_path(self, tmp_path):
        p = tmp_path / "g.json"
        p.write_text(game_to_json(chsh_game()))
        assert load_game(p).n == 2


class TestParseStrategy:
    def test_bare_list(self):
        s = parse_strategy(json.dumps(np.full((1, 1, 2, 2), 0.25).tolist()))
        assert s.table.shape == (1, 1, 2, 2)

    def test_wrong_rank(self):
        with pytest.raises(ParseError, match="4-dimensional"):
            parse_strategy("[[0.5, 0.5]]")

    def test_row_sum(self):
        with pytest.raises(ParseError):
            parse_strategy(json.dumps(np.full((1, 1, 2, 2), 0.3).tolist()))


class TestReport:
    def test_roundtrip(self):
        r = Report("chsh", "abc", {"v": 0.5, "t": [1, 2]}, {"r": 1e-17}, {"ok": True}, 0.25, np.eye(2).reshape(1, 1, 2, 2))
        back = Report.from_json(r.to_json())
        assert back.to_json() == r.to_json()

    def test_csv_requires_table(self):
        with pytest.raises(ValueError, match="no table"):
            Report("props", "x").to_csv()

    def test_ok_is_conjunction(self):
        assert not Report("x", "y", passed={"a": True, "b": False}).ok


class TestRun:
    def test_chsh(self):
        r = run(RunConfig("chsh"))
        assert r.results["classical"] == 0.75
        assert abs(r.results["angular"] - 0.8125) < 1e-9
        assert r.ok

    def test_eval_uniform(self, uniform_strategy):
        r = run(RunConfig("eval", game="chsh", strategy=str(uniform_strategy)))
        assert r.results["value"] == pytest.approx(0.5)

    def test_classical_from_file(self, tmp_path):
        p = tmp_path / "g.json"
        p.write_text(game_to_json(chsh_game()))
        assert run(RunConfig("classical", game=str(p))).results["exact"] == "3/4"

    def test_props_seed_seven(self):
        r = run(RunConfig("props", seed=7, trials=20))
        assert r.ok
        assert any(k.startswith("dictionary.") for k in r.residuals)

    def test_invalid_config(self):
        with pytest.raises(UsageError):
            RunConfig("nope")
        with pytest.raises(UsageError):
            RunConfig("chsh", tol=-1.0)

    def test_json_deterministic(self):
        a = run(RunConfig("duality-check", seed=3, trials=5)).to_dict()
        b = run(RunConfig("duality-check", seed=3, trials=5)).to_dict()
        a.pop("wall_time"), b.pop("wall_time")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


class TestMain:
    def test_exit_pass(self, capsys):
        assert main(["chsh"]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_exit_fail(self, capsys):
        assert main(["duality-check", "--trials", "3", "--tol", "1e-300"]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_exit_usage(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["chsh", "--bogus"])
        assert exc.value.code == 2

    def test_exit_parse_error(self, tmp_path, capsys):
        p = tmp_path / "g.json"
        p.write_text("{")
        assert main(["classical", "--game", str(p)]) == 2
        assert "g.json:1:2" in capsys.readouterr().err

    def test_eval_needs_strategy(self, capsys):
        assert main(["eval"]) == 2

    def test_missing_file(self, capsys):
        assert main(["classical", "--game", "/nonexistent/g.json"]) == 2

    def test_json_output(self, capsys):
        assert main(["chsh", "--json"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["results"]["classical_exact"] == "3/4" and d["ok"]

    def test_env_seed(self, monkeypatch, capsys):
        monkeypatch.setenv("ENTANGLE_LAB_SEED", "0x10")
        main(["duality-check", "--trials", "2", "--json"])
        a = json.loads(capsys.readouterr().out)
        main(["duality-check", "--trials", "2", "--json", "--seed", "16"])
        b = json.loads(capsys.readouterr().out)
        assert a["inputs_digest"] == b["inputs_digest"] and a["residuals"] == b["residuals"]

    def test_bad_env_seed(self, monkeypatch, capsys):
        monkeypatch.setenv("ENTANGLE_LAB_SEED", "abc")
        assert main(["chsh"]) == 2

    def test_csv_output(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        assert main(["chsh", "--output", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x,y,a,b,p" and len(lines) == 17

    def test_json_file_output(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert main(["chsh-stat", "--output", str(out)]) == 0
        r = Report.from_json(out.read_text())
        assert r.ok and r.residuals["ergodic_dual"] < 1e-10

    def test_gauss_small(self, capsys):
        assert main(["gauss-mc", "--samples", "20000", "--tol", "0.1", "--json"]) in (0, 1)
        d = json.loads(capsys.readouterr().out)
        assert set(d["results"]) >= {"alice_kernel", "alice_estimate", "alice_standard_error", "chi"}
