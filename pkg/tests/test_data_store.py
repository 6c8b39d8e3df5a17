"""
Tests for document loading, presets and the run log.
"""

import json

import pytest

from data_store import (
    RUN_LOGS,
    dump_document,
    get_preset,
    get_run_logs,
    load_document,
    load_embedding,
    load_gamma_vector,
    load_points,
    load_sequence,
    load_spec,
    load_table,
    sequence_document,
    store_run_log,
    validate_table,
)
from errors import InputError
from field_core import get_field, parse_expr
from leibniz import ExtensionTerm, solve_next
from models import GammaTable


class TestDocuments:
    """Test document sources."""

    def test_inline_json(self):
        """Test inline JSON text."""
        assert load_document('{"n": 2}') == {"n": 2}

    def test_file(self, tmp_path):
        """Test reading a document from a path."""
        path = tmp_path / "table.json"
        path.write_text(json.dumps({"n": 2, "entries": [[1, 1, "2"]]}))

        assert load_table(str(path)) == GammaTable.binomial(2)

    def test_missing_file(self, tmp_path):
        """Test unreadable paths are input errors."""
        with pytest.raises(InputError):
            load_document(str(tmp_path / "missing.json"))

    def test_malformed_json(self):
        """Test malformed inline JSON."""
        with pytest.raises(InputError):
            load_document('{"n": }')

    def test_decoded_values_pass_through(self):
        """Test already-decoded documents are returned as is."""
        assert load_document([0.5, 0.5]) == [0.5, 0.5]

    def test_dump_is_sorted(self):
        """Test serialization is independent of key order."""
        assert dump_document({"b": 1, "a": 2}) == dump_document({"a": 2, "b": 1})


class TestPresets:
    """Test preset resolution."""

    def test_binomial_preset(self):
        """Test preset:binomial-N."""
        assert load_table("preset:binomial-6") == GammaTable.binomial(6)

    def test_unit_preset(self):
        """Test preset:unit-N."""
        assert load_table("preset:unit-3") == GammaTable.constant(3)

    def test_negative_control_preset(self):
        """Test the negative control table loads as a valid table."""
        table = load_table("preset:negative-control")

        assert table.n == 4
        assert table(2, 2) == 2

    def test_derivation_presets(self):
        """Test derivative, square and zero."""
        assert load_spec("preset:derivative").value_of("t") == 1
        assert load_spec("preset:square").value_of("t") == parse_expr("t^2", ["t"])
        assert load_spec("preset:zero").is_zero

    def test_factorial_preset(self):
        """Test preset:factorial-N gamma vectors."""
        assert load_gamma_vector("preset:factorial-4").values == (1, 1, 2, 6, 24)

    def test_unknown_preset(self):
        """Test unknown names are input errors."""
        with pytest.raises(InputError):
            get_preset("binomial-x")
        with pytest.raises(InputError):
            get_preset("nothing")

    def test_presets_are_copies(self):
        """Test callers cannot mutate the preset tables."""
        get_preset("negative-control")["n"] = 9

        assert get_preset("negative-control")["n"] == 4


class TestTables:
    """Test table documents."""

    def test_invalid_table_report(self):
        """Test validate_table reports rather than raises."""
        report = validate_table({"n": 3, "entries": [[1, 1, "2"], [1, 2, "3"], [2, 1, "4"]]})

        assert not report.valid

    def test_invalid_table_load(self):
        """Test load_table raises on invalid tables."""
        with pytest.raises(InputError):
            load_table({"n": 3, "entries": [[1, 1, "2"]]})

    def test_schema_errors(self):
        """Test missing keys."""
        with pytest.raises(InputError):
            load_table({"entries": []})
        with pytest.raises(InputError):
            load_table({"n": "2", "entries": []})


class TestSequences:
    """Test sequence documents."""

    def test_iterates_preset(self):
        """Test preset:iterates-N is (id, d, ..., d^N) with the binomial table."""
        sequence, table = load_sequence("preset:iterates-3")
        t3 = parse_expr("t^3", ["t"])

        assert sequence.n == 3
        assert table == GammaTable.binomial(3)
        assert [str(v) for v in sequence.values(t3)] == ["t^3", "3*t^2", "6*t", "6"]

    def test_extension_terms(self):
        """Test extension terms use the preceding terms as prefix."""
        doc = {
            "n": 2,
            "gamma": {"n": 2, "entries": [[1, 1, "2"]]},
            "base": {"generators": ["t"], "values": {"t": "1"}},
            "terms": [{"kind": "iterate", "order": 1, "scale": "1"}, {"kind": "extension", "choices": {"t": "1"}}]
        }
        sequence, _ = load_sequence(doc)

        assert isinstance(sequence.terms[2], ExtensionTerm)
        assert sequence.evaluate(2, parse_expr("t^2", ["t"])) == parse_expr("2*t + 2", ["t"])

    def test_sum_and_own_base(self):
        """Test sum terms and iterate terms with their own base."""
        doc = {
            "generators": ["t"],
            "terms": [{"kind": "sum", "parts": [
                {"scale": "2", "term": {"kind": "iterate", "order": 1, "base": {"values": {"t": "t"}}}},
                {"scale": "-1", "term": {"kind": "iterate", "order": 1, "base": {"values": {"t": "1"}}}}
            ]}]
        }
        sequence, table = load_sequence(doc)

        assert table is None
        assert sequence.evaluate(1, parse_expr("t^2", ["t"])) == parse_expr("4*t^2 - 2*t", ["t"])

    def test_round_trip(self):
        """Test sequence_document then load_sequence reproduces the values."""
        sequence, table = load_sequence("preset:prefix-2")
        extended = sequence.extend(solve_next(sequence, table, {"t": "t^2"}))
        reloaded, reloaded_table = load_sequence(sequence_document(extended, table))
        x = parse_expr("(t+1)/(t^2-3)", ["t"])

        assert reloaded_table == table
        assert reloaded.values(x) == extended.values(x)

    def test_n_must_match_terms(self):
        """Test 'n' disagreeing with the term count."""
        with pytest.raises(InputError):
            load_sequence({"n": 2, "base": "preset:derivative", "terms": []})

    def test_extension_needs_table(self):
        """Test extension terms without a table."""
        with pytest.raises(InputError):
            load_sequence({"base": "preset:derivative", "terms": [{"kind": "extension"}]})

    def test_unknown_kind(self):
        """Test unknown term kinds."""
        with pytest.raises(InputError):
            load_sequence({"base": "preset:derivative", "terms": [{"kind": "power"}]})

    def test_points_and_embedding(self):
        """Test expression lists and embeddings."""
        field = get_field(("t",))

        assert load_points('["t", "t^2"]', field) == [field.gen("t"), field.gen("t") ** 2]
        assert load_embedding('{"t": 3.5}').assignment == {"t": 3.5}
        with pytest.raises(InputError):
            load_embedding('{"t": "pi"}')


class TestRunLog:
    """Test run log storage."""

    def setup_method(self):
        """Clear the run log before each test."""
        RUN_LOGS.clear()

    def test_store_run_log(self):
        """Test storing a run."""
        result = store_run_log("gamma_cocycle", {"table": "preset:binomial-3"}, "ok", "1.0.0")

        assert result["stored_successfully"]
        assert result["timestamp"].endswith("Z")
        assert len(RUN_LOGS) == 1
        assert RUN_LOGS[0]["tool"] == "gamma_cocycle"

    def test_get_run_logs_filtered(self):
        """Test filtering by tool and most-recent-first order."""
        store_run_log("gamma_cocycle", {}, "ok", "1.0.0")
        store_run_log("system_check", {}, "violation", "1.0.0")
        store_run_log("gamma_cocycle", {}, "error", "1.0.0")

        logs = get_run_logs("gamma_cocycle")
        assert [log["status"] for log in logs] == ["error", "ok"]
        assert len(get_run_logs(limit=2)) == 2
