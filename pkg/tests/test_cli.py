import pytest
import sys
import os
import pandas as pd

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.cli.parser import parse_config, parse_config_text, serialize_config
from app.cli.runner import run
from app.core.exceptions import (
    ConfigError,
    MissingRequiredError,
    ParseError,
    SimulationError,
    UnknownKeyError,
)
from app.main import collect_overrides, main
from app.schemas.experiment import Command
from app.schemas.landau import CriticalMode
from app.services.steadystate_service import steadystate_service


class TestParseConfig:
    """Test cases for the key = value configuration parser."""

    def test_parse_example(self, second_order_config_text):
        """Test the second_order file parses into the expected parameters."""
        config = parse_config_text(second_order_config_text, command="landau")
        params = config.params
        assert config.command == Command.LANDAU
        assert (params.v, params.ng, params.omega_a, params.omega_m, params.gamma_m, params.chi) == (
            100.0, 1.0, 50.0, 100.0, 10.0, 0.0
        )
        assert params.lambda_coll == 30.0
        assert params.n_bath == 0.0
        assert config.mode == CriticalMode.EXACT_NUMERIC

    def test_comments_and_blank_lines(self, second_order_config_text):
        """Test comments and blank lines are ignored."""
        text = "# second_order\n\n" + second_order_config_text.replace("chi = 0", "chi = 0  # symmetric")
        assert parse_config_text(text, command="landau") == parse_config_text(second_order_config_text, command="landau")

    def test_invalid_value_reports_line(self, second_order_config_text):
        """Test a non-numeric value raises ParseError with line number and key."""
        text = second_order_config_text.replace("chi = 0", "chi = abc")
        with pytest.raises(ParseError) as exc_info:
            parse_config_text(text, command="landau")
        assert exc_info.value.line_number == 6
        assert exc_info.value.key == "chi"

    def test_missing_equals_sign(self, second_order_config_text):
        """Test a line without '=' raises ParseError at that line."""
        with pytest.raises(ParseError) as exc_info:
            parse_config_text("v 100\n" + second_order_config_text, command="landau")
        assert exc_info.value.line_number == 1

    def test_duplicate_key(self, second_order_config_text):
        """Test a repeated key raises ParseError."""
        with pytest.raises(ParseError) as exc_info:
            parse_config_text(second_order_config_text + "v = 50\n", command="landau")
        assert exc_info.value.key == "v"
        assert exc_info.value.line_number == 8

    def test_model_validation_maps_to_key(self, second_order_config_text):
        """Test a value rejected by the parameter model raises ParseError naming the key."""
        text = second_order_config_text.replace("v = 100", "v = -1")
        with pytest.raises(ParseError) as exc_info:
            parse_config_text(text, command="landau")
        assert exc_info.value.key == "v"
        assert exc_info.value.line_number == 1

    def test_non_finite_value(self, second_order_config_text):
        """Test inf is rejected."""
        with pytest.raises(ParseError):
            parse_config_text(second_order_config_text.replace("ng = 1", "ng = inf"), command="landau")

    def test_override_beats_file(self, second_order_config_text):
        """Test a command-line override replaces the file value."""
        config = parse_config_text(second_order_config_text, overrides={"lambda": "35"}, command="landau")
        assert config.params.lambda_coll == 35.0

    def test_unknown_key(self, second_order_config_text):
        """Test an unknown key raises UnknownKeyError."""
        with pytest.raises(UnknownKeyError):
            parse_config_text(second_order_config_text + "temperature = 3\n", command="landau")

    def test_missing_required_parameter(self, second_order_config_text):
        """Test a missing model parameter raises MissingRequiredError."""
        with pytest.raises(MissingRequiredError):
            parse_config_text(second_order_config_text.replace("omega_m = 100\n", ""), command="landau")

    def test_missing_command_keys(self, second_order_config_text):
        """Test keys required by the command must be present."""
        with pytest.raises(MissingRequiredError):
            parse_config_text(second_order_config_text, command="sweep")
        with pytest.raises(MissingRequiredError):
            parse_config_text(second_order_config_text)

    def test_range_order(self, second_order_config_text):
        """Test lambda_lo >= lambda_hi raises ParseError."""
        with pytest.raises(ParseError):
            parse_config_text(second_order_config_text + "lambda_lo = 50\nlambda_hi = 40\n", command="sweep")

    def test_list_and_enum_values(self, second_order_config_text):
        """Test comma-separated lists and enum values are parsed."""
        text = second_order_config_text + "lambdas = 10, 20.5, 30\nmode = paper_formula\n"
        config = parse_config_text(text, command="validate")
        assert config.lambdas == [10.0, 20.5, 30.0]
        assert config.mode == CriticalMode.PAPER_FORMULA

    def test_serialize_round_trip(self, second_order_config_text):
        """Test parsing the serialized text gives back an equal configuration."""
        text = second_order_config_text + "lambda_lo = 10\nlambda_hi = 60\nn_bath_list = 0, 10\nhysteresis = true\n"
        config = parse_config_text(text, command="entangle")
        assert parse_config_text(serialize_config(config)) == config

    def test_missing_file(self, tmp_path):
        """Test a nonexistent config path raises ConfigError."""
        with pytest.raises(ConfigError):
            parse_config(str(tmp_path / "missing.cfg"), command="landau")


class TestCollectOverrides:
    """Test cases for turning leftover flags into overrides."""

    def test_pairs_and_equals_form(self):
        """Test both --key value and --key=value forms."""
        assert collect_overrides(["--lambda", "35", "--n-steps=20"]) == {"lambda": "35", "n-steps": "20"}

    def test_dangling_flag(self):
        """Test a flag without a value raises ParseError."""
        with pytest.raises(ParseError):
            collect_overrides(["--lambda"])

    def test_bare_token(self):
        """Test a token that is not a flag raises ParseError."""
        with pytest.raises(ParseError):
            collect_overrides(["35"])


class TestRunner:
    """Test cases for command dispatch and CSV output."""

    def test_landau_output_is_deterministic(self, second_order_config_text, tmp_path):
        """Test two identical runs write byte-identical files with the config echoed as comments."""
        out = tmp_path / "landau"
        config = parse_config_text(second_order_config_text, overrides={"out": str(out)}, command="landau")

        assert run(config) == 0
        first = (out / "landau.csv").read_bytes()
        assert run(config) == 0
        second = (out / "landau.csv").read_bytes()

        assert first == second
        lines = first.decode("utf-8").splitlines()
        assert lines[0] == "# command = landau"
        assert "# lambda_coll = 30" in lines
        header = next(line for line in lines if not line.startswith("#"))
        assert header.split(",")[:3] == ["a0", "a1", "a2"]
        assert "lambda_s2" in header.split(",")

    def test_steady_writes_two_files(self, second_order_config_text, tmp_path):
        """Test the steady command writes the summary and the energy profile."""
        config = parse_config_text(second_order_config_text, overrides={"out": str(tmp_path)}, command="steady")
        assert run(config) == 0
        assert sorted(path.name for path in tmp_path.iterdir()) == ["steady.csv", "surface.csv"]


class TestMain:
    """Test cases for the CLI entry point exit codes."""

    def test_success(self, second_order_config_text, tmp_path):
        """Test a valid landau run exits with 0."""
        config_path = tmp_path / "second_order.cfg"
        config_path.write_text(second_order_config_text, encoding="utf-8")
        code = main(["landau", "--config", str(config_path), "--out", str(tmp_path / "out"), "--lambda", "35"])
        assert code == 0
        assert (tmp_path / "out" / "landau.csv").is_file()

    def test_landau_paper_formula_mode(self, second_order_config_text, tmp_path):
        """Test --mode paper_formula is accepted and drives lambda_crit, with both coexistence columns written."""
        config_path = tmp_path / "asymmetric.cfg"
        config_path.write_text(second_order_config_text.replace("chi = 0", "chi = 0.25"), encoding="utf-8")
        out = tmp_path / "out"
        code = main(["landau", "--config", str(config_path), "--out", str(out), "--mode", "paper_formula"])
        assert code == 0

        frame = pd.read_csv(out / "landau.csv", comment="#")
        params = parse_config(str(config_path), command="landau").params
        expected = steadystate_service.lambda_a1(params, CriticalMode.PAPER_FORMULA)
        assert "lambda_coex_exact_numeric" in frame.columns
        assert frame["order"][0] == "first_asymmetric"
        assert frame["lambda_coex_paper_formula"][0] == pytest.approx(expected, rel=1e-12)
        assert frame["lambda_crit"][0] == pytest.approx(expected, rel=1e-12)
        assert "# mode = paper_formula" in (out / "landau.csv").read_text(encoding="utf-8").splitlines()

    def test_config_error_codes(self, second_order_config_text, tmp_path):
        """Test parse, unknown-key and missing-key failures map to their exit codes."""
        config_path = tmp_path / "second_order.cfg"
        config_path.write_text(second_order_config_text, encoding="utf-8")
        base = ["landau", "--config", str(config_path), "--out", str(tmp_path)]

        assert main(base + ["--chi", "abc"]) == ParseError.exit_code
        assert main(base + ["--temperature", "3"]) == UnknownKeyError.exit_code
        assert main(["landau", "--out", str(tmp_path)]) == MissingRequiredError.exit_code

    def test_simulation_error_code(self, tmp_path):
        """Test a numerical failure exits with the error's own code."""
        overrides = ["--v", "1", "--ng", "0", "--omega-a", "50", "--omega-m", "100",
                     "--gamma-m", "10", "--chi", "0", "--lambda", "30"]
        config = parse_config_text("", overrides=dict(zip(overrides[::2], overrides[1::2])), command="landau")
        with pytest.raises(SimulationError) as exc_info:
            steadystate_service.landau_coefficients(config.params)
        assert main(["landau", "--out", str(tmp_path)] + overrides) == exc_info.value.exit_code


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
