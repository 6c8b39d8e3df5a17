"""
Built-in sample documents for the Leibniz workbench.

Every CLI and server argument that takes a document also accepts
"preset:<name>". Parametric presets carry their order as a suffix,
e.g. "preset:binomial-10" or "preset:iterates-3".
"""

from math import comb
from typing import Any, Callable, Dict, List

from models import format_rational

# Derivations of QQ(t) fixed by their value on t
DERIVATIONS: Dict[str, Dict[str, Any]] = {
    "derivative": {"generators": ["t"], "values": {"t": "1"}},
    "square": {"generators": ["t"], "values": {"t": "t^2"}},
    "zero": {"generators": ["t"], "values": {"t": "0"}},
    "plane-rotation": {"generators": ["s", "t"], "values": {"s": "-t", "t": "s"}},
}

# Fails the cocycle identity at (1, 1, 2): Gamma(2,2)Gamma(1,1) = 2 but Gamma(1,3)Gamma(1,2) = 1
NEGATIVE_CONTROL_TABLE: Dict[str, Any] = {
    "n": 4,
    "entries": [[1, 1, "1"], [1, 2, "1"], [1, 3, "1"], [2, 2, "2"]],
}

# Tables with some zero interior entries
ZERO_TABLES: Dict[str, Dict[str, Any]] = {
    "zero-2": {"n": 2, "entries": [[1, 1, "0"]]},
    "alternating-3": {"n": 3, "entries": [[1, 1, "0"], [1, 2, "1"]]},
}


def _interior(n: int) -> List[tuple]:
    return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1 - i)]


def binomial_table(n: int) -> Dict[str, Any]:
    """Gamma(i, j) = C(i+j, i), the table of the plain iterates."""
    return {"n": n, "entries": [[i, j, str(comb(i + j, i))] for i, j in _interior(n)]}


def unit_table(n: int) -> Dict[str, Any]:
    """Gamma = 1 everywhere (divided-power style sequences)."""
    return {"n": n, "entries": [[i, j, "1"] for i, j in _interior(n)]}


def factorial_gamma(n: int) -> Dict[str, Any]:
    values, current = ["1"], 1
    for k in range(1, n + 1):
        current *= k
        values.append(format_rational(current))
    return {"gamma": values}


def iterates_sequence(n: int) -> Dict[str, Any]:
    """(id, d, ..., d^n) for d = d/dt on QQ(t), with the binomial table."""
    return {
        "n": n,
        "gamma": binomial_table(max(n, 1)),
        "base": DERIVATIONS["derivative"],
        "terms": [{"kind": "iterate", "order": k, "scale": "1"} for k in range(1, n + 1)],
    }


def solver_prefix(n: int) -> Dict[str, Any]:
    """(id, d) with d = d/dt and the binomial table of order n, ready for extension."""
    return {
        "n": 1,
        "gamma": binomial_table(n),
        "base": DERIVATIONS["derivative"],
        "terms": [{"kind": "iterate", "order": 1, "scale": "1"}],
    }


PARAMETRIC: Dict[str, Callable[[int], Dict[str, Any]]] = {
    "binomial": binomial_table,
    "unit": unit_table,
    "factorial": factorial_gamma,
    "iterates": iterates_sequence,
    "prefix": solver_prefix,
}

STATIC: Dict[str, Dict[str, Any]] = {
    **DERIVATIONS,
    **ZERO_TABLES,
    "negative-control": NEGATIVE_CONTROL_TABLE,
}


def preset_names() -> List[str]:
    """Static names followed by the parametric families as "<family>-N"."""
    return sorted(STATIC) + [f"{family}-N" for family in sorted(PARAMETRIC)]
