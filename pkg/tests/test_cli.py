"""
Tests for the command-line interface
"""

import json
import math

import pytest

import cli
from constants import EXIT_FAILURE, EXIT_OK, EXIT_USAGE


class TestTableCommands:
    """Test cases for table, maf, infogain and asymptotics"""

    def test_table_json_single_row(self, capsys):
        """Test one N gives one JSON object"""
        assert cli.main(["table", "--n", "2..2", "--format", "json"]) == EXIT_OK
        row = json.loads(capsys.readouterr().out)
        assert row["N"] == 2
        assert row["F_P"] == pytest.approx(0.75)
        assert row["F_A"] == pytest.approx(0.5 + 0.5 / math.sqrt(3))

    def test_table_csv(self, capsys):
        """Test the CSV header and the single-spin row"""
        assert cli.main(["table", "--n", "1..1", "--format", "csv"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "N,F_P,F_A,F_O,I_P,I_A,I_O"
        values = [float(v) for v in lines[1].split(",")]
        assert values[1:4] == pytest.approx([2 / 3] * 3)

    def test_table_text_to_file(self, tmp_path):
        """Test writing the text table to a file"""
        target = tmp_path / "table.txt"
        assert cli.main(["table", "--n", "2..3", "-o", str(target)]) == EXIT_OK
        content = target.read_text()
        assert "F_O" in content
        assert "0.8444" in content

    def test_maf_json(self, capsys):
        """Test the antiparallel fidelity for three spins"""
        assert cli.main(["maf", "--n", "3", "--format", "json", "--nodes", "4"]) == EXIT_OK
        row = json.loads(capsys.readouterr().out)
        assert row["maf"] == pytest.approx(38 / 45)
        assert row["maf_quadrature"] == pytest.approx(38 / 45)
        assert row["state"]["twice_m"] == 1

    def test_maf_product_needs_projection(self, capsys):
        """Test the product encoding without --twice-m is a usage error"""
        assert cli.main(["maf", "--n", "3", "--encoding", "product"]) == EXIT_USAGE
        assert "twice-m" in capsys.readouterr().err

    def test_maf_product_wrong_parity(self):
        """Test a projection with the wrong parity"""
        assert cli.main(["maf", "--n", "3", "--encoding", "product", "--twice-m", "2"]) == EXIT_USAGE

    def test_infogain(self, capsys):
        """Test the parallel information gain for two spins"""
        assert cli.main(["infogain", "--n", "2", "--encoding", "parallel", "--format", "json"]) == EXIT_OK
        row = json.loads(capsys.readouterr().out)
        assert row["info_gain"] == pytest.approx(0.6232, abs=5e-5)

    def test_infogain_too_few_nodes(self):
        """Test quadrature refusal maps to a usage error"""
        assert cli.main(["infogain", "--n", "2", "--nodes", "10"]) == EXIT_USAGE

    def test_asymptotics(self, capsys):
        """Test the next-order law at N=10"""
        assert cli.main(["asymptotics", "--n", "10", "--format", "json"]) == EXIT_OK
        row = json.loads(capsys.readouterr().out)
        assert row["approx"] == pytest.approx(21 / 22)
        assert row["scaled_residual"] < 1.0

    def test_asymptotics_odd_spin_count(self):
        """Test odd N is rejected"""
        assert cli.main(["asymptotics", "--n", "7"]) == EXIT_USAGE


class TestPovmCommands:
    """Test cases for povm construct and verify"""

    def test_construct_then_verify(self, tmp_path, capsys):
        """Test a constructed set verifies after the file round trip"""
        target = tmp_path / "set.csv"
        assert cli.main(["povm", "construct", "--j", "1", "-o", str(target)]) == EXIT_OK
        assert target.exists()
        assert cli.main(["povm", "verify", "--j", "1", str(target), "--format", "json"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["pass"] is True
        assert report["size"] == 8

    def test_construct_to_stdout(self, capsys):
        """Test the CSV set goes to stdout without -o"""
        assert cli.main(["povm", "construct", "--j", "1/2"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "theta,phi,weight"
        assert len(lines) == 9

    def test_verify_tetrahedron_fails(self, capsys):
        """Test the tetrahedron fails at J = 3/2 with an L = 3 offender"""
        code = cli.main(["povm", "verify", "--j", "1.5", "tetrahedron", "--format", "json"])
        assert code == EXIT_FAILURE
        report = json.loads(capsys.readouterr().out)
        assert report["pass"] is False
        assert report["J2"] == 3
        assert report["worst"][0] == 3
        assert report["max_abs"] > 1e-3
        assert "isotropy" not in report
        assert report["orthogonality"]["pass"] is False

    def test_verify_octahedron_passes(self, capsys):
        """Test the octahedron passes at J = 3/2"""
        assert cli.main(["povm", "verify", "--j", "3/2", "octahedron"]) == EXIT_OK
        assert "pass" in capsys.readouterr().out

    def test_verify_json_keys_at_top_level(self, capsys):
        """Test the isotropy verdict fields sit at the top of the JSON report"""
        assert cli.main(["povm", "verify", "--j", "3/2", "octahedron", "--format", "json"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert {"J2", "max_abs", "pass", "worst"} <= set(report)
        assert report["pass"] is True
        assert report["max_abs"] < 1e-10

    def test_verify_missing_file(self, tmp_path):
        """Test an unreadable set file is a usage error"""
        assert cli.main(["povm", "verify", "--j", "1", str(tmp_path / "nope.csv")]) == EXIT_USAGE

    def test_malformed_spin(self):
        """Test J that is not a half-integer"""
        assert cli.main(["povm", "construct", "--j", "0.3"]) == EXIT_USAGE


class TestSimulateCommand:
    """Test cases for simulate"""

    def test_simulate_json(self, capsys):
        """Test a seeded run reports its seed and generator"""
        argv = [
            "simulate", "--n", "2", "--encoding", "parallel", "--set", "tetrahedron",
            "--trials", "2000", "--seed", "7", "--format", "json",
        ]
        assert cli.main(argv) == EXIT_OK
        first = json.loads(capsys.readouterr().out)
        assert first["seed"] == 7
        assert first["algorithm"] == "PCG64"
        assert first["trials"] == 2000
        assert cli.main(argv) == EXIT_OK
        assert json.loads(capsys.readouterr().out) == first

    def test_simulate_draws_seed(self, capsys):
        """Test a fresh seed is printed when none is given"""
        argv = ["simulate", "--n", "2", "--set", "octahedron", "--trials", "100"]
        assert cli.main(argv) == EXIT_OK
        captured = capsys.readouterr()
        assert "seed: " in captured.err
        assert "±" in captured.out

    def test_simulate_closure_violation(self, capsys):
        """Test an under-resolved set gives a failure exit and a diagnostic"""
        argv = ["simulate", "--n", "3", "--set", "tetrahedron", "--trials", "100", "--seed", "1"]
        assert cli.main(argv) == EXIT_FAILURE
        assert "not closed" in capsys.readouterr().err

    def test_simulate_rejects_zero_trials(self):
        """Test trials = 0 is a usage error"""
        argv = ["simulate", "--n", "2", "--set", "octahedron", "--trials", "0", "--seed", "1"]
        assert cli.main(argv) == EXIT_USAGE

    def test_simulate_single_spin_count(self):
        """Test a spin range is refused"""
        argv = ["simulate", "--n", "2..3", "--set", "octahedron", "--seed", "1"]
        assert cli.main(argv) == EXIT_USAGE


class TestParser:
    """Test cases for argument parsing"""

    def test_unknown_command(self):
        """Test argparse usage errors exit with 2"""
        assert cli.main(["teleport"]) == EXIT_USAGE

    def test_help(self, capsys):
        """Test --help exits cleanly"""
        assert cli.main(["--help"]) == EXIT_OK
        assert "simulate" in capsys.readouterr().out
