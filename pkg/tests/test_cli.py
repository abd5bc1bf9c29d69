"""Command-line surface: exit codes, artifacts, golden comparisons."""

import json
import subprocess
import sys

from ucycle.cli import load_golden, main

REF_27 = "021210210210102021102210210"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSearchCommand:
    def test_invalid_verdict_exit_zero(self, capsys):
        code, out, _ = run_cli(capsys, "search", "--q", "2", "--n", "2",
                               "--set", "0,2", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "invalid"

    def test_valid_includes_witness(self, capsys):
        code, out, _ = run_cli(capsys, "search", "--q", "2", "--n", "3",
                               "--set", "0,1,2", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["witness"] == "00010111"

    def test_budget_exit_three(self, capsys):
        code, _, err = run_cli(capsys, "search", "--q", "2", "--n", "5",
                               "--set", "0,1,2,3,12", "--budget-nodes", "10")
        assert code == 3
        assert "inconclusive" in err

    def test_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "search", "--q", "2", "--n", "3",
                               "--set", "0,1,x")
        assert code == 2

    def test_env_budget_override(self, capsys, monkeypatch):
        monkeypatch.setenv("UCYCLE_BUDGET_NODES", "10")
        code, _, err = run_cli(capsys, "search", "--q", "2", "--n", "5",
                               "--set", "0,1,2,3,12")
        assert code == 3
        assert "inconclusive" in err


class TestVerifyCommand:
    def test_reference_string(self, tmp_path, capsys):
        f = tmp_path / "cycle.txt"
        f.write_text(REF_27 + "\n")
        code, out, _ = run_cli(capsys, "verify", "--file", str(f), "--q", "3",
                               "--n", "3", "--set", "0,3,6")
        assert code == 0
        assert "complete=True" in out

    def test_incomplete_nonzero_exit(self, tmp_path, capsys):
        f = tmp_path / "cycle.txt"
        f.write_text("0000\n")
        code, out, _ = run_cli(capsys, "verify", "--file", str(f), "--q", "2",
                               "--n", "2", "--set", "0,1")
        assert code == 1

    def test_round_trip_gen_then_verify(self, tmp_path, capsys):
        out_file = tmp_path / "ap.txt"
        code, out, _ = run_cli(capsys, "gen-ap", "--q", "3", "--n", "3")
        assert code == 0
        cycle_line = out.splitlines()[0]
        out_file.write_text(cycle_line + "\n")
        code, out, _ = run_cli(capsys, "verify", "--file", str(out_file),
                               "--q", "3", "--n", "3", "--set", "0,3,6")
        assert code == 0


class TestGenerationCommands:
    def test_gen_ap_even_q_n2_uses_decomposition(self, capsys):
        code, out, _ = run_cli(capsys, "gen-ap", "--q", "4", "--n", "2",
                               "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["route"] == "trail-decomposition"
        assert doc["verification"]["complete"]

    def test_gen_ap_q2_n2_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "gen-ap", "--q", "2", "--n", "2")
        assert code == 2

    def test_double_ap3_pipeline(self, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "gen-ap", "--q", "2", "--n", "3")
        # {0,2,4} over q=2 is a stride construction, not a doubling input;
        # use the classical order-3 string instead
        f = tmp_path / "db.txt"
        f.write_text("00010111\n")
        code, out, _ = run_cli(capsys, "double-ap3", "--input", str(f),
                               "--q", "2", "--d", "1", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["length"] == 64
        assert doc["verification"]["complete"]

    def test_gen_reduced(self, capsys):
        code, out, _ = run_cli(capsys, "gen-reduced", "--q", "3", "--n", "3",
                               "--set", "0,1,3", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["length"] == 26
        assert doc["verification"]["complete"]

    def test_classify(self, capsys):
        code, out, _ = run_cli(capsys, "classify", "--q", "2", "--n", "2",
                               "--set", "0,1", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["verdict"] == "ordinary"

    def test_decompose_impossible_is_verdict(self, capsys):
        code, out, _ = run_cli(capsys, "decompose", "--n", "2", "--d", "2",
                               "--format", "json")
        assert code == 0
        assert json.loads(out)["verdict"] == "impossible"

    def test_decompose_emit_chi(self, capsys):
        code, out, _ = run_cli(capsys, "decompose", "--n", "3", "--d", "3",
                               "--emit-chi", "--format", "json")
        doc = json.loads(out)
        assert code == 0
        assert doc["chi_index_set"] == [0, 3]

    def test_approx_type1(self, capsys):
        code, out, _ = run_cli(capsys, "approx", "--q", "2", "--n", "4",
                               "--set", "0,1,2,3", "--type", "1",
                               "--seed", "11", "--format", "json")
        doc = json.loads(out)
        assert code == 0
        assert doc["verification"]["complete"]
        assert doc["config"]["seed"] == 11

    def test_approx_type2_reports_missing(self, capsys):
        code, out, _ = run_cli(capsys, "approx", "--q", "2", "--n", "4",
                               "--set", "0,1,2,3", "--type", "2",
                               "--seed", "4", "--m", "24", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and "missing" in doc

    def test_janson(self, capsys):
        code, out, _ = run_cli(capsys, "janson", "--mu", "0", "--Delta", "1",
                               "--delta", "1")
        assert code == 0 and out.strip() == "1.0"


class TestAtlasAndGolden:
    def test_atlas_to_file_and_diff(self, tmp_path, capsys):
        out_file = tmp_path / "atlas.tsv"
        code, _, _ = run_cli(capsys, "atlas", "--q", "3", "--n", "3",
                             "--size", "3", "--out", str(out_file))
        assert code == 0
        code, out, _ = run_cli(capsys, "diff-golden", "--atlas",
                               str(out_file), "--table", "obs1")
        assert code == 0
        assert "match=True" in out

    def test_atlas_resume_identical(self, tmp_path, capsys):
        ck = tmp_path / "ck.tsv"
        a1 = tmp_path / "a1.tsv"
        a2 = tmp_path / "a2.tsv"
        run_cli(capsys, "atlas", "--q", "2", "--n", "3", "--size", "3",
                "--resume", str(ck), "--out", str(a1))
        lines = ck.read_text().splitlines()
        ck.write_text("\n".join(lines[:1]) + "\n")
        run_cli(capsys, "atlas", "--q", "2", "--n", "3", "--size", "3",
                "--resume", str(ck), "--out", str(a2))
        assert a1.read_bytes() == a2.read_bytes()

    def test_obs2_matches(self, tmp_path, capsys):
        out_file = tmp_path / "atlas24.tsv"
        run_cli(capsys, "atlas", "--q", "2", "--n", "4", "--size", "4",
                "--out", str(out_file))
        code, out, _ = run_cli(capsys, "diff-golden", "--atlas",
                               str(out_file), "--table", "obs2")
        assert code == 0

    def test_corrupted_atlas_reports_missing(self, tmp_path, capsys):
        out_file = tmp_path / "atlas.tsv"
        run_cli(capsys, "atlas", "--q", "3", "--n", "3", "--size", "3",
                "--out", str(out_file))
        lines = [ln for ln in out_file.read_text().splitlines()
                 if not ln.endswith("invalid")]
        out_file.write_text("\n".join(lines) + "\n")
        code, out, _ = run_cli(capsys, "diff-golden", "--atlas",
                               str(out_file), "--table", "obs1")
        assert code == 1
        assert "missing=1" in out

    def test_golden_tables_load(self):
        meta, rows = load_golden("obs3")
        assert meta["q"] == 2 and meta["n"] == 5
        assert rows[0] == (0, 1, 2, 3, 12)
        assert rows[-1] == (0, 4, 8, 16, 24)
        assert len(rows) == len(set(rows))


class TestSubprocessEntry:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ucycle", "janson", "--mu", "1",
             "--Delta", "1", "--delta", "1"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.strip()

    def test_usage_exit_two(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ucycle", "no-such-command"],
            capture_output=True, text=True)
        assert proc.returncode == 2
