"""Tests for the command-line interface and report serialization."""

import argparse
import json
import logging

import pytest

from selmer_pairing.__main__ import (
    EXIT_INVALID_INPUT,
    EXIT_OK,
    EXIT_VERIFY_FAILED,
    _normalize_argv,
    build_parser,
    parse_int_list,
    run_cli,
)
from selmer_pairing.service import DescentService
from selmer_pairing.symbols import inject_symbol_fault
from selmer_pairing.utils import report_filename, slugify

REPORT_KEYS = {
    "curve",
    "discriminant",
    "selmer_basis",
    "selmer_dimension",
    "point_images",
    "pairing_matrix",
    "matrix_rank",
    "rank_upper_bound",
    "sha2_lower_bound",
    "places_used",
    "certificates",
    "plain_rank_bound",
    "independent_points",
    "contradiction",
    "second_coverings",
}


class TestArgumentParsing:
    """Tests for argv normalization and parsing."""

    def test_default_subcommand(self):
        """Test that run is inserted and negative values are attached to their flag."""
        assert _normalize_argv(["--roots", "-1,0,1"]) == ["run", "--roots=-1,0,1"]

    def test_explicit_subcommand(self):
        """Test that an explicit subcommand is kept."""
        assert _normalize_argv(["verify", "--ab", "6,6"]) == ["verify", "--ab=6,6"]
        assert _normalize_argv(["scan", "--range", "-5,5"]) == ["scan", "--range=-5,5"]
        assert _normalize_argv(["scan", "--curve", "-17,0,17"]) == ["scan", "--curve=-17,0,17"]

    def test_help_untouched(self):
        """Test that help flags get no subcommand."""
        assert _normalize_argv(["--help"]) == ["--help"]

    def test_parse_int_list(self):
        """Test comma-separated integer parsing."""
        assert parse_int_list("-6, 0, 6", 3) == (-6, 0, 6)
        with pytest.raises(argparse.ArgumentTypeError):
            parse_int_list("1,2", 3)
        with pytest.raises(argparse.ArgumentTypeError):
            parse_int_list("1,x,2", 3)

    def test_parser_defaults(self):
        """Test parsed values of a run invocation."""
        args = build_parser().parse_args(_normalize_argv(["--roots", "-6,0,6", "--json", "--seed", "4"]))
        assert args.command == "run"
        assert args.roots == (-6, 0, 6)
        assert args.json is True
        assert args.seed == 4

    def test_scan_curves(self):
        """Test that --curve is repeatable and parsed into root triples."""
        argv = _normalize_argv(["scan", "--curve", "-17,0,17", "--curve", "-1,0,1"])
        assert build_parser().parse_args(argv).curves == [(-17, 0, 17), (-1, 0, 1)]

    def test_log_level(self, monkeypatch):
        """Test that logging defaults to INFO and --verbose switches to DEBUG."""
        calls = []
        monkeypatch.setattr(logging, "basicConfig", lambda **kwargs: calls.append(kwargs))
        run_cli(["--roots", "0,0,1"])
        run_cli(["--roots", "0,0,1", "-v"])
        assert [c["level"] for c in calls] == [logging.INFO, logging.DEBUG]


class TestExitCodes:
    """Tests for error handling and exit codes."""

    def test_singular_curve(self, capsys):
        """Test that repeated roots exit with the invalid-input code."""
        assert run_cli(["--roots", "0,0,1"]) == EXIT_INVALID_INPUT
        assert "singular" in capsys.readouterr().err

    def test_singular_curve_json_error(self, capsys):
        """Test the machine-readable error on stderr."""
        assert run_cli(["--roots", "0,0,1", "--json"]) == EXIT_INVALID_INPUT
        error = json.loads(capsys.readouterr().err)
        assert error["code"] == "invalid_input"

    def test_wrong_arity(self):
        """Test that a malformed root list is rejected."""
        assert run_cli(["--roots", "1,2"]) == EXIT_INVALID_INPUT

    def test_missing_curve(self, capsys):
        """Test that run without a curve is rejected."""
        assert run_cli(["run"]) == EXIT_INVALID_INPUT
        assert "--roots" in capsys.readouterr().err

    def test_both_curve_forms(self):
        """Test that --roots and --ab are mutually exclusive."""
        assert run_cli(["--roots", "-1,0,1", "--ab", "1,1"]) == EXIT_INVALID_INPUT

    def test_bad_height_bound(self):
        """Test that a nonpositive height bound fails validation."""
        assert run_cli(["--roots", "-1,0,1", "--height-bound", "0"]) == EXIT_INVALID_INPUT

    def test_help(self, capsys):
        """Test that --help exits cleanly."""
        assert run_cli(["--help"]) == EXIT_OK
        assert "selmer-pairing" in capsys.readouterr().out


class TestReports:
    """Tests for report output."""

    def test_json_report(self, capsys):
        """Test the JSON report of y^2 = x^3 - x."""
        assert run_cli(["--roots", "-1,0,1", "--json", "--height-bound", "100"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert set(report) == REPORT_KEYS
        assert report["selmer_dimension"] == 2
        assert report["matrix_rank"] == 0
        assert report["rank_upper_bound"] == 0

    def test_json_is_reproducible(self, capsys):
        """Test that two runs print identical bytes."""
        argv = ["--ab", "1,1", "--json", "--height-bound", "100"]
        assert run_cli(argv) == EXIT_OK
        first = capsys.readouterr().out
        assert run_cli(argv) == EXIT_OK
        assert capsys.readouterr().out == first

    def test_text_report(self, capsys):
        """Test the human-readable summary."""
        assert run_cli(["--roots", "-1,0,1", "--height-bound", "100"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "dim S^2: 2" in out
        assert "Rank upper bound: 0" in out
        assert "Second coverings:" in out
        assert "(sorted; triples follow this order)" in out

    def test_roots_are_sorted(self, capsys):
        """Test that an unsorted root triple reports exactly the sorted curve."""
        assert run_cli(["--roots", "1,0,-1", "--json", "--height-bound", "100"]) == EXIT_OK
        unsorted = capsys.readouterr().out
        assert json.loads(unsorted)["curve"] == "-1,0,1"
        assert run_cli(["--roots", "-1,0,1", "--json", "--height-bound", "100"]) == EXIT_OK
        assert capsys.readouterr().out == unsorted

    def test_second_coverings_in_json(self, capsys):
        """Test the 4-covering systems in the JSON report."""
        assert run_cli(["--roots", "-1,0,1", "--json", "--height-bound", "100"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert len(report["second_coverings"]) == report["selmer_dimension"]
        for equations in report["second_coverings"].values():
            assert len(equations) == 5

    def test_scan_explicit_curve(self, capsys):
        """Test scan on an explicit curve list."""
        argv = ["scan", "--curve", "-1,0,1", "--json", "--height-bound", "50", "--extended-bound", "100"]
        assert run_cli(argv) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert [entry["curve"] for entry in report["curves"]] == ["-1,0,1"]
        assert report["improved"] == []

    def test_out_dir(self, tmp_path, capsys):
        """Test that --out-dir writes the JSON report under a slugged name."""
        argv = ["--roots", "-1,0,1", "--json", "--height-bound", "100", "--out-dir", str(tmp_path)]
        assert run_cli(argv) == EXIT_OK
        written = (tmp_path / "descent-n1-0-1.json").read_text(encoding="utf-8")
        assert written == capsys.readouterr().out

    def test_report_filename(self):
        """Test filenames of reports."""
        assert report_filename("descent", "-6,0,6") == "descent-n6-0-6.json"
        assert report_filename("verify", "0,1,3") == "verify-0-1-3.json"
        assert slugify("Hello World!") == "hello-world"


class TestPropertyHarness:
    """Tests for the property checks behind the verify subcommand."""

    def test_reciprocity_passes(self):
        """Test reciprocity on seeded pairs."""
        assert DescentService().check_reciprocity(pairs=50).passed

    def test_reciprocity_catches_fault(self):
        """Test that a flipped symbol at 5 breaks reciprocity."""
        with inject_symbol_fault(5):
            result = DescentService().check_reciprocity(pairs=50)
        assert not result.passed
        assert result.details.startswith("failed at")

    def test_oracle_equivalence(self):
        """Test symbol formulas against the oracle on a few pairs per prime."""
        result = DescentService(seed=1).check_oracle_equivalence(pairs=5)
        assert result.passed
        assert result.checked == 5 * 15

    @pytest.mark.slow
    def test_verify_passes(self, capsys):
        """Test that the full property suite passes on y^2 = x^3 - x."""
        assert run_cli(["verify", "--roots", "-1,0,1", "--height-bound", "100"]) == EXIT_OK
        assert "FAIL" not in capsys.readouterr().out

    @pytest.mark.slow
    def test_verify_with_fault(self, capsys):
        """Test that an injected symbol fault makes verify exit with the failure code."""
        argv = ["verify", "--roots", "-1,0,1", "--height-bound", "100", "--inject-symbol-fault", "5"]
        assert run_cli(argv) == EXIT_VERIFY_FAILED
        assert "FAIL reciprocity" in capsys.readouterr().out
