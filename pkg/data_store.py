"""
Document access layer for the Leibniz workbench.

Loads JSON documents from a path, inline JSON text or a preset name and
turns them into workbench objects; serializes results deterministically.
Also keeps the in-memory run log of the MCP server.
"""

import json
import logging
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import presets
from derivations import DerivationSequence, DerivationSpec, IterateTerm, SumTerm, Term
from errors import InputError
from field_core import FieldElement, RationalFunctionField, get_field, parse_expr
from gamma import parse_rational, validate
from leibniz import ExtensionTerm, resolve_choices
from models import GammaTable, GammaVector, NumericEmbedding, ValidationReport

logger = logging.getLogger(__name__)

PRESET_PREFIX = "preset:"

# Server run log, most recent last
RUN_LOGS: List[Dict[str, Any]] = []


# --- Loading -----------------------------------------------------------------------

def get_preset(name: str) -> Dict[str, Any]:
    """
    Resolve a preset name ("binomial-5", "negative-control", ...).

    Raises:
        InputError: if no preset has that name
    """
    logger.info(f"Fetching preset: {name}")
    if name in presets.STATIC:
        return json.loads(json.dumps(presets.STATIC[name]))
    family, _, order = name.rpartition("-")
    if family in presets.PARAMETRIC and order.isdigit() and int(order) >= 1:
        return presets.PARAMETRIC[family](int(order))
    logger.warning(f"Preset not found: {name}")
    raise InputError(f"Unknown preset '{name}'; available: {presets.preset_names()}")


def load_document(source: Any) -> Any:
    """
    A JSON document from a path, inline JSON text, "preset:<name>" or an already-decoded value.

    Raises:
        InputError: unreadable file or malformed JSON
    """
    if not isinstance(source, str):
        return source
    text = source.strip()
    if text.startswith(PRESET_PREFIX):
        return get_preset(text[len(PRESET_PREFIX):])
    if not text.startswith(("{", "[")):
        path = Path(text)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"Cannot read {path}: {e.strerror or e}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"Malformed JSON: {e.msg} at line {e.lineno}, column {e.colno}") from None


def _require_mapping(doc: Any, what: str) -> Mapping[str, Any]:
    if not isinstance(doc, Mapping):
        raise InputError(f"{what} document must be a JSON object")
    return doc


def _require_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{what} must be an integer, got {value!r}")
    return value


def table_entries(source: Any) -> Tuple[List[Any], int]:
    """Raw [i, j, value] entries and n of a table document, unvalidated."""
    doc = _require_mapping(load_document(source), "Gamma table")
    if "n" not in doc or "entries" not in doc:
        raise InputError("Gamma table document needs 'n' and 'entries'")
    entries = doc["entries"]
    if not isinstance(entries, list):
        raise InputError("'entries' must be a list of [i, j, value] triples")
    return entries, _require_int(doc["n"], "'n'")


def validate_table(source: Any) -> ValidationReport:
    entries, n = table_entries(source)
    return validate(entries, n)


def load_table(source: Any) -> GammaTable:
    """
    A validated GammaTable.

    Raises:
        InputError: if the document describes an invalid table
    """
    report = validate_table(source)
    if not report.valid:
        details = "; ".join(v.message for v in report.violations[:5])
        raise InputError(f"Invalid gamma table: {details}")
    return report.table


def load_gamma_vector(source: Any) -> GammaVector:
    """{"gamma": ["1", "1", "2"]} or a bare list."""
    doc = load_document(source)
    if isinstance(doc, Mapping):
        doc = doc.get("gamma")
    if not isinstance(doc, list):
        raise InputError("Gamma vector document must be a list or {\"gamma\": [...]}")
    return GammaVector(tuple(parse_rational(v) for v in doc))


def _field_of(doc: Mapping[str, Any]) -> RationalFunctionField:
    generators = doc.get("generators")
    if not isinstance(generators, list) or not all(isinstance(g, str) for g in generators):
        raise InputError("'generators' must be a list of names")
    return get_field(tuple(generators))


def load_spec(source: Any, field: Optional[RationalFunctionField] = None) -> DerivationSpec:
    """{"generators": ["t"], "values": {"t": "1"}}."""
    doc = _require_mapping(load_document(source), "Derivation")
    if field is None or "generators" in doc:
        spec_field = _field_of(doc)
        if field is not None and spec_field != field:
            raise InputError(f"Derivation acts on {spec_field!r}, expected {field!r}")
        field = spec_field
    values = doc.get("values")
    if not isinstance(values, Mapping):
        raise InputError("'values' must map generator names to expressions")
    return DerivationSpec.from_mapping(field, {name: parse_expr(str(v), field) for name, v in values.items()})


def load_expression(text: Any, field: RationalFunctionField) -> FieldElement:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InputError(f"Expression must be a string, got {text!r}")
    return parse_expr(str(text), field)


def _parse_term(
    raw: Any,
    prefix: DerivationSequence,
    base: Optional[DerivationSpec],
    table: Optional[GammaTable]
) -> Term:
    raw = _require_mapping(raw, "Term")
    kind = raw.get("kind")
    field = prefix.field
    if kind == "iterate":
        term_base = load_spec(raw["base"], field) if "base" in raw else base
        if term_base is None:
            raise InputError("Iterate terms need a 'base' derivation")
        return IterateTerm(term_base, _require_int(raw.get("order"), "'order'"), parse_rational(raw.get("scale", "1")))
    if kind == "sum":
        parts = raw.get("parts")
        if not isinstance(parts, list) or not parts:
            raise InputError("Sum terms need a nonempty 'parts' list")
        return SumTerm([
            (parse_rational(_require_mapping(p, "Part").get("scale", "1")), _parse_term(p.get("term"), prefix, base, table))
            for p in parts
        ])
    if kind == "extension":
        if table is None:
            raise InputError("Extension terms need the document's 'gamma' table")
        choices = raw.get("choices") or {}
        if not isinstance(choices, Mapping):
            raise InputError("'choices' must map generator names to expressions")
        parsed = {name: load_expression(v, field) for name, v in choices.items()}
        return ExtensionTerm(prefix, table, resolve_choices(prefix, parsed))
    raise InputError(f"Unknown term kind {kind!r}; expected iterate, sum or extension")


def load_sequence(source: Any) -> Tuple[DerivationSequence, Optional[GammaTable]]:
    """
    A derivation sequence and the gamma table carried by its document.

    {"n": 2, "gamma": <table>, "base": <derivation>, "terms": [...]}, where
    terms list d_1..d_n (d_0 = id is implicit); extension terms take the
    terms before them as their prefix.
    """
    doc = _require_mapping(load_document(source), "Sequence")
    base = load_spec(doc["base"]) if "base" in doc else None
    if base is not None:
        field = base.field
    elif "generators" in doc:
        field = _field_of(doc)
    else:
        raise InputError("Sequence document needs 'base' or 'generators'")
    table = load_table(doc["gamma"]) if "gamma" in doc else None

    terms = doc.get("terms", [])
    if not isinstance(terms, list):
        raise InputError("'terms' must be a list")
    if "n" in doc and _require_int(doc["n"], "'n'") != len(terms):
        raise InputError(f"'n' is {doc['n']} but {len(terms)} terms are given")

    sequence = DerivationSequence.from_terms(field, [], base)
    for raw in terms:
        sequence = sequence.extend(_parse_term(raw, sequence, base, table))
    logger.info(f"Loaded sequence: n={sequence.n}, generators={list(field.generators)}")
    return sequence, table


def load_points(source: Any, field: RationalFunctionField) -> List[FieldElement]:
    doc = load_document(source)
    if isinstance(doc, str):
        doc = [doc]
    if not isinstance(doc, list):
        raise InputError("Points must be a list of expressions")
    return [load_expression(p, field) for p in doc]


def load_embedding(source: Any) -> NumericEmbedding:
    doc = _require_mapping(load_document(source), "Embedding")
    for name, value in doc.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InputError(f"Embedding value for '{name}' must be a number")
    return NumericEmbedding(dict(doc))


def load_target(source: Any) -> List[float]:
    doc = load_document(source)
    if not isinstance(doc, list) or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in doc):
        raise InputError("Target must be a list of numbers")
    return [float(v) for v in doc]


# --- Serialization -----------------------------------------------------------------

def sequence_document(sequence: DerivationSequence, table: Optional[GammaTable]) -> Dict[str, Any]:
    """Inverse of load_sequence for sequences built from iterate, sum and extension terms."""
    doc: Dict[str, Any] = {"generators": list(sequence.field.generators), **sequence.to_dict()}
    if table is not None:
        doc["gamma"] = table.to_dict()
    return doc


def dump_document(doc: Mapping[str, Any]) -> str:
    """Sorted keys and fixed indentation, so equal documents print identically."""
    return json.dumps(doc, indent=2, sort_keys=True)


# --- Run log -----------------------------------------------------------------------

def store_run_log(tool: str, arguments: Dict[str, Any], status: str, version: str) -> Dict[str, Any]:
    """
    Append a server tool call to the run log.

    Args:
        tool: Tool name
        arguments: Tool arguments as received
        status: "ok", "violation" or "error"
        version: Workbench version that handled the call

    Returns:
        Dictionary with run_id, timestamp and success status
    """
    run_id = str(uuid.uuid4())
    timestamp = datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")
    RUN_LOGS.append({
        "run_id": run_id,
        "timestamp": timestamp,
        "tool": tool,
        "arguments": arguments,
        "status": status,
        "version": version
    })
    logger.info(f"Stored run log: {run_id} | Tool: {tool} | Status: {status}")
    return {"run_id": run_id, "timestamp": timestamp, "stored_successfully": True}


def get_run_logs(tool: Optional[str] = None, limit: int = 100) -> List[Dict[str, Any]]:
    """Run log entries, most recent first, optionally for one tool."""
    logs = [log for log in RUN_LOGS if tool is None or log["tool"] == tool]
    logs = list(reversed(logs))[:limit]
    logger.info(f"Retrieved {len(logs)} run logs (tool: {tool or 'all'})")
    return logs
