"""
Tests for the command-line front end: exit codes and JSON documents.
"""

import json

import pytest

from cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, parse_args, run
from config import WORKBENCH_VERSION

PI_EMBEDDING = '{"t": 3.141592653589793}'
REPEATED_DERIVATIVE = json.dumps({
    "base": "preset:derivative",
    "gamma": "preset:binomial-2",
    "terms": [{"kind": "iterate", "order": 1}, {"kind": "iterate", "order": 1}]
})
ZERO_SEQUENCE = json.dumps({"base": "preset:zero", "gamma": "preset:binomial-1", "terms": [{"kind": "iterate", "order": 1}]})


def invoke(capsys, *argv):
    """Run the CLI and return (exit code, parsed document)."""
    status = run(list(argv))
    return status, json.loads(capsys.readouterr().out)


class TestGammaCommands:
    """Test gamma table commands."""

    def test_factorize_binomial(self, capsys):
        """Test factorize of binomial n=5 prints the factorials."""
        status, doc = invoke(capsys, "gamma", "factorize", "--table", "preset:binomial-5")

        assert status == EXIT_OK
        assert doc["gamma"] == ["1", "1", "2", "6", "24", "120"]
        assert doc["command"] == "gamma factorize"
        assert doc["version"] == WORKBENCH_VERSION

    def test_cocycle_negative_control(self, capsys):
        """Test the negative control exits 1 with the violating triple."""
        status, doc = invoke(capsys, "gamma", "cocycle", "--table", "preset:negative-control")

        assert status == EXIT_VIOLATION
        assert doc["violations"][0] == {"triple": [1, 1, 2], "left": "2", "right": "1"}

    def test_validate_invalid_table(self, capsys):
        """Test validate reports an asymmetric table with exit 1."""
        table = '{"n": 3, "entries": [[1, 1, "2"], [1, 2, "3"], [2, 1, "4"]]}'
        status, doc = invoke(capsys, "gamma", "validate", "--table", table)

        assert status == EXIT_VIOLATION
        assert doc["violations"][0]["kind"] == "symmetry"

    def test_synthesize(self, capsys):
        """Test synthesize of factorials gives binomial entries."""
        status, doc = invoke(capsys, "gamma", "synthesize", "--gamma", '["1", "1", "2"]')

        assert status == EXIT_OK
        assert doc["entries"] == [[1, 1, "2"]]

    def test_order_condition(self, capsys):
        """Test a zero table fails the order condition."""
        status, doc = invoke(capsys, "gamma", "order-condition", "--table", "preset:zero-2")

        assert status == EXIT_VIOLATION
        assert doc["failing_orders"] == [2]


class TestDerivCommands:
    """Test derivation evaluation commands."""

    def test_apply(self, capsys):
        """Test d(t^2) = 2t."""
        status, doc = invoke(capsys, "deriv", "apply", "--spec", "preset:derivative", "--expr", "t^2")

        assert status == EXIT_OK
        assert doc["value"] == "2*t"

    def test_iterate(self, capsys):
        """Test d^2(t) = 2t^3 for d(t) = t^2."""
        status, doc = invoke(capsys, "deriv", "iterate", "--spec", "preset:square", "--expr", "t", "--order", "2")

        assert status == EXIT_OK
        assert doc["value"] == "2*t^3"


class TestSystemCommands:
    """Test system commands."""

    def test_check_iterates(self, capsys):
        """Test the iterates pass the system check."""
        status, doc = invoke(capsys, "system", "check", "--seq", "preset:iterates-3", "--samples", "20", "--seed", "7")

        assert status == EXIT_OK
        assert doc["violations"] == []
        assert (doc["samples"], doc["seed"]) == (20, 7)

    def test_check_repeated_derivative(self, capsys):
        """Test (id, d, d) exits 1 with order-2 violations."""
        status, doc = invoke(capsys, "system", "check", "--seq", REPEATED_DERIVATIVE, "--samples", "5")

        assert status == EXIT_VIOLATION
        assert {v["k"] for v in doc["violations"]} == {2}

    def test_defect(self, capsys):
        """Test D_2(t, t) = 2 for (id, d)."""
        status, doc = invoke(capsys, "system", "defect", "--seq", "preset:prefix-2", "--x", "t", "--y", "t")

        assert status == EXIT_OK
        assert doc["defect"] == "2"

    def test_corld(self, capsys):
        """Test the defect of (id, d) meets its conditions."""
        status, doc = invoke(capsys, "system", "corld", "--seq", "preset:prefix-2", "--samples", "20")

        assert status == EXIT_OK
        assert doc["passed"]

    def test_solve_next_then_decompose(self, capsys, tmp_path):
        """Test solve-next writes a sequence that decompose reads back."""
        path = tmp_path / "extended.json"
        status = run(["system", "solve-next", "--seq", "preset:prefix-2", "--choices", '{"t": "1"}',
                      "--samples", "20", "--output", str(path)])

        assert status == EXIT_OK
        assert capsys.readouterr().out == ""
        doc = json.loads(path.read_text())
        assert doc["sequence"]["terms"][-1] == {"kind": "extension", "choices": {"t": "1"}}

        sequence = json.dumps(doc["sequence"])
        status, decomposed = invoke(capsys, "system", "decompose", "--seq", sequence, "--samples", "20")
        assert status == EXIT_OK
        assert decomposed["residual"] == {"t": "1"}

    def test_solve_to_order(self, capsys):
        """Test --to extends several orders at once."""
        status, doc = invoke(capsys, "system", "solve-next", "--seq", "preset:prefix-3", "--to", "3", "--samples", "10")

        assert status == EXIT_OK
        assert doc["sequence"]["n"] == 3

    def test_decompose_after_repeated_choices(self, capsys, tmp_path):
        """Test --to with choices at every order still decomposes, against the zero-choice extension."""
        path = tmp_path / "order3.json"
        status = run(["system", "solve-next", "--seq", "preset:prefix-3", "--to", "3", "--choices", '{"t": "1"}',
                      "--samples", "10", "--output", str(path)])
        assert status == EXIT_OK

        sequence = json.dumps(json.loads(path.read_text())["sequence"])
        status, doc = invoke(capsys, "system", "decompose", "--seq", sequence, "--samples", "10")

        assert status == EXIT_OK
        assert doc["reference"] == "zero-extension"
        assert doc["residual"] == {"t": "1"}

    def test_to_must_exceed_current_order(self, capsys):
        """Test --to at or below the prefix order exits 2."""
        status, doc = invoke(capsys, "system", "solve-next", "--seq", "preset:prefix-3", "--to", "1")

        assert status == EXIT_USAGE
        assert doc["error_type"] == "InputError"

    def test_solve_next_refuses_negative_control(self, capsys):
        """Test the cocycle failure is reported with exit 1."""
        status, doc = invoke(capsys, "system", "solve-next", "--seq", "preset:iterates-3",
                             "--gamma", "preset:negative-control")

        assert status == EXIT_VIOLATION
        assert doc["violations"][0]["triple"] == [1, 1, 2]


class TestIndependenceCommands:
    """Test independence and density commands."""

    def test_witness(self, capsys):
        """Test a witness is found for (id, d, d^2)."""
        status, doc = invoke(capsys, "indep", "witness", "--seq", "preset:iterates-2")

        assert status == EXIT_OK
        assert doc["verdict"] == "independent"
        assert len(doc["points"]) == 3

    def test_witness_at_given_points(self, capsys):
        """Test det t^2 at (t, t^2)."""
        status, doc = invoke(capsys, "indep", "witness", "--seq", "preset:iterates-1", "--points", '["t", "t^2"]')

        assert status == EXIT_OK
        assert doc["det"] == "t^2"

    def test_certificate_for_zero_derivation(self, capsys):
        """Test the zero derivation has the relation e_1."""
        status, doc = invoke(capsys, "indep", "certificate", "--seq", ZERO_SEQUENCE)

        assert status == EXIT_OK
        assert doc["coefficients"] == ["0", "1"]

    def test_density(self, capsys):
        """Test the first-order density search at t = pi."""
        status, doc = invoke(capsys, "indep", "density", "--seq", "preset:iterates-1",
                             "--embed", PI_EMBEDDING, "--target", "[0.5, 0.5]")

        assert status == EXIT_OK
        assert doc["error"] < 1e-6

    def test_density_failure(self, capsys):
        """Test the zero derivation exits 1."""
        status, doc = invoke(capsys, "indep", "density", "--seq", ZERO_SEQUENCE,
                             "--embed", PI_EMBEDDING, "--target", "[0.0, 1.0]")

        assert status == EXIT_VIOLATION
        assert doc["failure"] == "SingularSelectionError"

    def test_verdict(self, capsys):
        """Test the iterates are independent."""
        status, doc = invoke(capsys, "indep", "verdict", "--seq", "preset:iterates-2", "--samples", "10")

        assert status == EXIT_OK
        assert doc["verdict"] == "independent"


class TestUsage:
    """Test usage errors and determinism."""

    def test_malformed_json(self, capsys):
        """Test malformed documents exit 2."""
        status, doc = invoke(capsys, "gamma", "cocycle", "--table", '{"n": }')

        assert status == EXIT_USAGE
        assert doc["error_type"] == "InputError"

    def test_missing_argument(self, capsys):
        """Test argparse errors come out as JSON with exit 2."""
        status, doc = invoke(capsys, "gamma", "cocycle")

        assert status == EXIT_USAGE
        assert doc["error_type"] == "UsageError"

    def test_unknown_command(self, capsys):
        """Test unknown subcommands exit 2."""
        status, _ = invoke(capsys, "matrix", "invert")

        assert status == EXIT_USAGE

    def test_invalid_table_is_input_error(self, capsys):
        """Test cocycle on an invalid table exits 2."""
        status, _ = invoke(capsys, "gamma", "cocycle", "--table", '{"n": 2, "entries": []}')

        assert status == EXIT_USAGE

    def test_help(self, capsys):
        """Test --help exits 0."""
        assert run(["--help"]) == 0

    @pytest.mark.parametrize("argv", [
        ["gamma", "cocycle", "--table", "preset:negative-control"],
        ["system", "check", "--seq", "preset:iterates-2", "--samples", "15", "--seed", "3"],
        ["indep", "witness", "--seq", "preset:iterates-2", "--seed", "5"],
    ])
    def test_repeated_runs_are_identical(self, capsys, argv):
        """Test equal arguments give byte-identical output."""
        run(argv)
        first = capsys.readouterr().out
        run(argv)
        second = capsys.readouterr().out

        assert first == second

    def test_parse_args(self):
        """Test settings are split from inputs."""
        config = parse_args(["indep", "density", "--seq", "s", "--embed", "e", "--target", "t", "--eps", "0.01"])

        assert (config.command, config.action) == ("indep", "density")
        assert config.eps == 0.01
        assert config.inputs == {"seq": "s", "embed": "e", "target": "t"}
