"""
Data models for the Leibniz workbench.
Uses dataclasses with type hints; every report type serializes with to_dict().
Field elements are serialized through str(), which is the canonical printer.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Dict, List, Mapping, Optional, Tuple

from config import (
    DEFAULT_DEGREE_BOUND,
    DEFAULT_DENSITY_EPS,
    DEFAULT_SEED,
    DEFAULT_WITNESS_BUDGET,
    DENSITY_ASSUMPTION,
    GATE_SAMPLE_COUNT,
    INITIAL_MAX_DENOMINATOR,
)
from errors import InputError, InvalidGammaVectorError, ZeroEntryError


def format_rational(value: Fraction) -> str:
    """Rationals travel as strings ("2", "-3/4") in every JSON document."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class NumericEmbedding:
    """Assignment of real values to the field generators."""
    assignment: Mapping[str, float]

    def to_dict(self) -> Dict[str, float]:
        return {name: float(value) for name, value in sorted(self.assignment.items())}


@dataclass(frozen=True)
class GammaVector:
    """gamma(0), ..., gamma(n) with gamma(0) = 1 and every entry nonzero."""
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise InvalidGammaVectorError("A gamma vector needs at least gamma(0)")
        if values[0] != 1:
            raise InvalidGammaVectorError(f"gamma(0) must be 1, got {format_rational(values[0])}")
        for k, value in enumerate(values):
            if value == 0:
                raise ZeroEntryError(f"gamma({k}) is zero", (k,))

    @property
    def n(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.values[k]

    @classmethod
    def factorial(cls, n: int) -> "GammaVector":
        values = [Fraction(1)]
        for k in range(1, n + 1):
            values.append(values[-1] * k)
        return cls(tuple(values))

    def gauge_normalized(self) -> "GammaVector":
        """gamma(k) / gamma(1)^k, the representative with gamma(1) = 1."""
        if self.n == 0:
            return self
        scale = self.values[1]
        return GammaVector(tuple(v / scale ** k for k, v in enumerate(self.values)))

    def to_dict(self) -> Dict[str, Any]:
        return {"gamma": [format_rational(v) for v in self.values]}


@dataclass(frozen=True)
class GammaTable:
    """
    Symmetric weights on Delta_n = {(i, j): i, j >= 0, i + j <= n}.

    Only interior entries (1 <= i <= j) are stored; boundary entries are 1
    and the lower triangle is read through symmetry.
    """
    n: int
    entries: Mapping[Tuple[int, int], Fraction]

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"Gamma tables need n >= 1, got {self.n}")
        expected = set(self.interior_indices(self.n))
        entries = {tuple(key): Fraction(value) for key, value in self.entries.items()}
        if set(entries) != expected:
            missing = sorted(expected - set(entries))
            extra = sorted(set(entries) - expected)
            raise InputError(f"Interior entries do not match Delta_{self.n}: missing {missing}, extra {extra}")
        object.__setattr__(self, "entries", entries)

    @staticmethod
    def interior_indices(n: int) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1 - i)]

    @staticmethod
    def domain(n: int) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(n + 1) for j in range(n + 1 - i)]

    def __call__(self, i: int, j: int) -> Fraction:
        if i < 0 or j < 0 or i + j > self.n:
            raise InputError(f"({i}, {j}) is outside Delta_{self.n}")
        if i * j == 0:
            return Fraction(1)
        return self.entries[(min(i, j), max(i, j))]

    @classmethod
    def binomial(cls, n: int) -> "GammaTable":
        return cls(n, {(i, j): Fraction(comb(i + j, i)) for i, j in cls.interior_indices(n)})

    @classmethod
    def constant(cls, n: int, value: Fraction = Fraction(1)) -> "GammaTable":
        return cls(n, {index: Fraction(value) for index in cls.interior_indices(n)})

    def restrict(self, k: int) -> "GammaTable":
        if not 1 <= k <= self.n:
            raise InputError(f"Cannot restrict Delta_{self.n} to Delta_{k}")
        return GammaTable(k, {index: self.entries[index] for index in self.interior_indices(k)})

    def with_entry(self, i: int, j: int, value: Fraction) -> "GammaTable":
        entries = dict(self.entries)
        entries[(min(i, j), max(i, j))] = Fraction(value)
        return GammaTable(self.n, entries)

    def zero_entries(self) -> List[Tuple[int, int]]:
        return [index for index, value in sorted(self.entries.items()) if value == 0]

    def is_nowhere_zero(self) -> bool:
        return not self.zero_entries()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "entries": [[i, j, format_rational(v)] for (i, j), v in sorted(self.entries.items())]
        }


@dataclass
class TableViolation:
    """One reason a raw table is not a valid gamma table."""
    kind: str  # domain, symmetry, boundary
    index: Tuple[int, int]
    message: str
    values: Tuple[Fraction, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "index": list(self.index),
            "message": self.message,
            "values": [format_rational(v) for v in self.values]
        }


@dataclass
class ValidationReport:
    """Result of validating raw table entries."""
    n: int
    violations: List[TableViolation]
    table: Optional[GammaTable] = None

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "n": self.n,
            "valid": self.valid,
            "violations": [v.to_dict() for v in self.violations]
        }
        if self.table is not None:
            result["table"] = self.table.to_dict()
        return result


@dataclass
class CocycleViolation:
    """A triple where Gamma(i+j,k)Gamma(i,j) != Gamma(i,j+k)Gamma(j,k)."""
    i: int
    j: int
    k: int
    left: Fraction
    right: Fraction

    def to_dict(self) -> Dict[str, Any]:
        return {
            "triple": [self.i, self.j, self.k],
            "left": format_rational(self.left),
            "right": format_rational(self.right)
        }


@dataclass
class CocycleReport:
    n: int
    triples_checked: int
    violations: List[CocycleViolation]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "passed": self.passed,
            "triples_checked": self.triples_checked,
            "violations": [v.to_dict() for v in self.violations]
        }


@dataclass
class FactorizationMismatch:
    """First index where Gamma(i,j) != gamma(i+j)/(gamma(i)gamma(j))."""
    i: int
    j: int
    table_value: Fraction
    factored_value: Fraction

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": [self.i, self.j],
            "table_value": format_rational(self.table_value),
            "factored_value": format_rational(self.factored_value)
        }


@dataclass
class Factorization:
    """Either a gamma vector or a mismatch certificate."""
    gamma: Optional[GammaVector] = None
    mismatch: Optional[FactorizationMismatch] = None

    @property
    def succeeded(self) -> bool:
        return self.gamma is not None

    def to_dict(self) -> Dict[str, Any]:
        if self.gamma is not None:
            return self.gamma.to_dict()
        return {"mismatch": self.mismatch.to_dict()}


@dataclass
class SystemViolation:
    """A sample pair where d_k(xy) differs from the weighted Leibniz sum."""
    k: int
    x: Any
    y: Any
    lhs: Any
    rhs: Any

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, "x": str(self.x), "y": str(self.y), "lhs": str(self.lhs), "rhs": str(self.rhs)}


@dataclass
class SystemReport:
    n: int
    sample_count: int
    seed: int
    violations: List[SystemViolation]

    @property
    def passed(self) -> bool:
        return not self.violations

    def failing_orders(self) -> List[int]:
        return sorted({v.k for v in self.violations})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "samples": self.sample_count,
            "seed": self.seed,
            "violations": [v.to_dict() for v in self.violations]
        }


@dataclass
class DefectViolation:
    """A sample where one of the symmetry / multiplicative / additive identities fails."""
    identity: str  # symmetry, multiplicative, additivity
    points: Tuple[Any, ...]
    lhs: Any
    rhs: Any

    def to_dict(self) -> Dict[str, Any]:
        return {
            "identity": self.identity,
            "points": [str(p) for p in self.points],
            "lhs": str(self.lhs),
            "rhs": str(self.rhs)
        }


@dataclass
class DefectReport:
    sample_count: int
    seed: int
    violations: List[DefectViolation]

    @property
    def passed(self) -> bool:
        return not self.violations

    def failing_identities(self) -> List[str]:
        return sorted({v.identity for v in self.violations})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "samples": self.sample_count,
            "seed": self.seed,
            "passed": self.passed,
            "violations": [v.to_dict() for v in self.violations]
        }


@dataclass
class Decomposition:
    """d_n = reference + residual, with the residual checked to be a derivation."""
    residual: Any  # evaluable term
    generator_values: Dict[str, Any]
    sample_count: int
    seed: int
    reference: str = "canonical"  # canonical, zero-extension or given

    @property
    def is_zero(self) -> bool:
        return all(value.is_zero for value in self.generator_values.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "residual": {name: str(value) for name, value in self.generator_values.items()},
            "residual_is_zero": self.is_zero,
            "reference": self.reference,
            "samples": self.sample_count,
            "seed": self.seed
        }


@dataclass
class WitnessMatrix:
    """M[i][j] = d_j(x_i) and its exact determinant."""
    points: List[Any]
    entries: List[List[Any]]
    det: Any

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": [str(p) for p in self.points],
            "entries": [[str(e) for e in row] for row in self.entries],
            "det": str(self.det)
        }


@dataclass
class WitnessReport:
    verdict: str  # independent, inconclusive
    matrix: WitnessMatrix

    @property
    def independent(self) -> bool:
        return self.verdict == "independent"

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": self.verdict, **self.matrix.to_dict()}


@dataclass
class DependenceCertificate:
    """A rational relation sum c_j d_j = 0 on the span of a monomial basis, if one exists."""
    coefficients: Optional[Tuple[Fraction, ...]]
    basis_size: int
    equation_count: int

    @property
    def found(self) -> bool:
        return self.coefficients is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "found": self.found,
            "coefficients": None if self.coefficients is None else [format_rational(c) for c in self.coefficients],
            "basis_size": self.basis_size,
            "equations": self.equation_count
        }


@dataclass
class DependenceVerdict:
    """Dependent exactly when d_1 vanishes on every generator."""
    dependent: bool
    relation: Optional[Tuple[Fraction, ...]]
    first_order_values: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": "dependent" if self.dependent else "independent",
            "relation": None if self.relation is None else [format_rational(c) for c in self.relation],
            "first_order_values": {name: str(v) for name, v in self.first_order_values.items()}
        }


@dataclass
class DensityResult:
    """Graph point (x, d_1(x), ..., d_n(x)) close to the target at an embedding."""
    witness: Any
    image: List[float]
    target: List[float]
    error: float
    embedding: NumericEmbedding
    max_denominator: int
    attempts: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "witness": str(self.witness),
            "image": self.image,
            "target": self.target,
            "error": self.error,
            "embedding": self.embedding.to_dict(),
            "max_denominator": self.max_denominator,
            "attempts": self.attempts,
            "assumption": DENSITY_ASSUMPTION
        }


@dataclass
class RunConfig:
    """Parsed command line for one workbench run."""
    command: str
    action: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    sample_count: int = GATE_SAMPLE_COUNT
    eps: float = DEFAULT_DENSITY_EPS
    degree_bound: int = DEFAULT_DEGREE_BOUND
    budget: int = DEFAULT_WITNESS_BUDGET
    max_denominator: int = INITIAL_MAX_DENOMINATOR
    output: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": f"{self.command} {self.action}",
            "seed": self.seed,
            "samples": self.sample_count
        }
