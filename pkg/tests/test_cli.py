from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from einz.cli import main

GOLDEN = Path(__file__).parent / "golden"
FIXTURES = Path(__file__).parents[1] / "fixtures"


@pytest.fixture
def run():
    runner = CliRunner()

    def _run(*args, **kw):
        return runner.invoke(main, list(args), catch_exceptions=False, **kw)

    return _run


class TestTablesCommand:
    @pytest.mark.parametrize(
        "golden,args",
        [
            ("table1_exact.csv", ["tables", "1", "--format", "csv"]),
            ("table1_reference.csv", ["tables", "1", "--source", "reference", "--format", "csv"]),
            ("table3_reference.json", ["tables", "3", "--source", "reference", "--format", "json"]),
            ("table5_reference.csv", ["tables", "5", "--source", "reference", "--format", "csv", "--precision", "3"]),
            ("table6_reference.csv", ["tables", "6", "--source", "reference", "--format", "csv"]),
            ("table2_exact_fractions.csv", ["tables", "2", "--format", "csv", "--exact"]),
        ],
    )
    def test_golden_outputs(self, run, golden, args):
        expected = (GOLDEN / golden).read_text()
        assert run(*args).output == expected

    def test_byte_stable_across_runs(self, run):
        args = ["tables", "4", "--source", "reference", "--format", "json"]
        assert run(*args).output == run(*args).output

    def test_unknown_table_id(self, run):
        result = run("tables", "9")
        assert result.exit_code == 2  # click rejects out-of-range argument

    def test_reference_multi_deck_is_semantic_error(self, run):
        result = run("tables", "1", "--decks", "8", "--source", "reference")
        assert result.exit_code == 3

    def test_text_format(self, run):
        out = run("tables", "1").output
        assert "stand-17" in out and "any" in out


class TestScenarioCommand:
    def test_situation2_stand18(self, run):
        result = run("scenario", str(FIXTURES / "situation2-stand18.json"))
        assert result.exit_code == 0
        assert "STAND (win 0.450)" in result.output

    def test_situation3_v2(self, run):
        result = run("scenario", str(FIXTURES / "situation3-v2.json"))
        assert result.exit_code == 0
        assert "STAND (win 0.516)" in result.output

    def test_situation1_recommends_hit(self, run):
        result = run("scenario", str(FIXTURES / "situation1.json"))
        assert result.exit_code == 0
        assert result.output.strip().splitlines()[-1].startswith("HIT")

    def test_standing_query(self, run):
        result = run("scenario", str(FIXTURES / "situation4.json"), "--format", "json")
        assert result.exit_code == 0
        assert json.loads(result.output)["win_with_ties"] == 0.629

    def test_malformed_json_exits_2(self, run, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"hand": [10, 6]')
        result = run("scenario", str(bad))
        assert result.exit_code == 2
        assert "line 1" in result.output  # position-bearing message

    def test_inconsistent_state_exits_3(self, run, tmp_path):
        f = tmp_path / "terminal.json"
        f.write_text(json.dumps({"hand": [11, 11]}))
        result = run("scenario", str(f))
        assert result.exit_code == 3

    def test_json_output_shape(self, run):
        result = run("scenario", str(FIXTURES / "situation2-stand17.json"),
                     "--format", "json", "--precision", "4")
        payload = json.loads(result.output)
        assert payload["recommendation"] == "hit"
        assert payload["evaluations"][0]["action"] == "stand"


class TestChange14Command:
    def test_default_hand(self, run):
        result = run("change14")
        assert result.exit_code == 0
        assert "restart is the better choice" in result.output

    def test_hybrid_json(self, run):
        result = run("change14", "--mode", "hybrid", "--format", "json", "--exact")
        payload = json.loads(result.output)
        assert payload["continue"]["fraction"] == "779/1250"
        assert payload["better"] == "restart"

    def test_wrong_total_exits_3(self, run):
        result = run("change14", "--hand", "10,6")
        assert result.exit_code == 3

    def test_garbage_hand_exits_2(self, run):
        result = run("change14", "--hand", "10,x")
        assert result.exit_code == 2


class TestMatchAndDealerCommands:
    def test_match_grid_values(self, run):
        result = run("match", "-p", "stand17,stand17", "--source", "reference",
                     "--format", "json")
        payload = json.loads(result.output)
        assert payload["values"][0][0] == 0.402
        assert payload["values"][2][0] == 0.079

    def test_dealer_summary(self, run):
        result = run("dealer", "--source", "reference", "--format", "json")
        payload = json.loads(result.output)
        assert payload["columns"] == ["V1", "V2", "V3", "V3-chase"]
        assert payload["values"][0][1] == 0.480  # V2, player stand17

    def test_dealer_single_variant(self, run):
        result = run("dealer", "--variant", "V2", "--source", "reference", "--format", "csv")
        assert "player wins,0.480" in result.output


class TestServeCommand:
    def test_occupied_port_fails_with_message(self):
        import socket
        import subprocess
        import sys

        sock = socket.socket()
        sock.bind(("127.0.0.1", 0))
        port = sock.getsockname()[1]
        sock.listen(1)
        try:
            proc = subprocess.run(
                [sys.executable, "-m", "einz.cli", "serve",
                 "--port", str(port), "--host", "127.0.0.1"],
                capture_output=True, text=True, timeout=60,
            )
        finally:
            sock.close()
        assert proc.returncode == 3
        assert "cannot serve" in proc.stderr


class TestSimulateCommand:
    def test_reproducible_report(self, run, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"rounds": 2000, "seed": 42, "policies": ["stand17"]}))
        a = run("simulate", str(cfg))
        b = run("simulate", str(cfg))
        assert a.exit_code == 0
        assert a.output == b.output

    def test_csv_format(self, run, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"rounds": 500, "seed": 1}))
        result = run("simulate", str(cfg), "--format", "csv")
        assert result.output.startswith("event,count,estimate,std_error")

    def test_bad_config_exits_2(self, run, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"seed": 1}))
        assert run("simulate", str(cfg)).exit_code == 2
