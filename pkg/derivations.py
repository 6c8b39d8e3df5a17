"""
Derivations on QQ(t_1, ..., t_m) and the terms of derivation sequences.

A derivation is fixed by its values on the generators; on a reduced
fraction p/q it acts through the partial derivatives of p and q
(product rule on monomials, then the quotient rule).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

from errors import InputError
from field_core import FieldElement, Polynomial, RationalFunctionField
from models import GammaVector, format_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DerivationSpec:
    """Values of a derivation on each generator, in generator order."""
    field: RationalFunctionField
    values: Tuple[FieldElement, ...]

    def __post_init__(self):
        if len(self.values) != self.field.ngens:
            raise InputError(
                f"Derivation needs {self.field.ngens} generator values, got {len(self.values)}"
            )
        object.__setattr__(self, "values", tuple(self.field.coerce(v) for v in self.values))

    @classmethod
    def from_mapping(cls, field: RationalFunctionField, mapping: Mapping[str, Any]) -> "DerivationSpec":
        missing = [name for name in field.generators if name not in mapping]
        extra = [name for name in mapping if name not in field.generators]
        if missing or extra:
            raise InputError(f"Derivation values must cover exactly {list(field.generators)}: "
                             f"missing {missing}, unknown {extra}")
        return cls(field, tuple(field.coerce(mapping[name]) for name in field.generators))

    @classmethod
    def zero(cls, field: RationalFunctionField) -> "DerivationSpec":
        return cls(field, tuple(field.zero for _ in field.generators))

    def value_of(self, name: str) -> FieldElement:
        return self.values[self.field.generators.index(name)]

    def as_mapping(self) -> Dict[str, FieldElement]:
        return dict(zip(self.field.generators, self.values))

    @property
    def is_zero(self) -> bool:
        return all(v.is_zero for v in self.values)

    def __call__(self, x: FieldElement) -> FieldElement:
        return apply(self, x)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "generators": list(self.field.generators),
            "values": {name: str(v) for name, v in zip(self.field.generators, self.values)}
        }


def _apply_polynomial(d: DerivationSpec, p: Polynomial) -> FieldElement:
    field = d.field
    total = field.zero
    for gen, value in zip(field.ring.gens, d.values):
        if value.is_zero:
            continue
        partial = p.diff(gen)
        if partial:
            total = total + field.from_polynomial(partial) * value
    return total


def apply(d: DerivationSpec, x: FieldElement) -> FieldElement:
    """
    Leibniz extension of d to x.

    Args:
        d: Generator values of the derivation
        x: Element of the same field

    Returns:
        d(x); zero on constants
    """
    if x.field != d.field:
        raise InputError(f"{x} is not in the field of the derivation {d.field!r}")
    field = d.field
    if x.is_constant():
        return field.zero

    numer, denom = x.frac.numer, x.frac.denom
    d_numer = _apply_polynomial(d, numer)
    q = field.from_polynomial(denom)
    if denom.is_ground:
        return d_numer / q
    d_denom = _apply_polynomial(d, denom)
    p = field.from_polynomial(numer)
    return (q * d_numer - p * d_denom) / (q * q)


def iterate(d: DerivationSpec, k: int, x: FieldElement) -> FieldElement:
    """d^k(x), with d^0 the identity."""
    if k < 0:
        raise InputError(f"Iterate order must be >= 0, got {k}")
    for _ in range(k):
        if x.is_zero:
            break
        x = apply(d, x)
    return x


# --- Sequence terms ---------------------------------------------------------------

class Term:
    """An additive, QQ-homogeneous map of the field into itself."""

    field: RationalFunctionField

    def evaluate(self, x: FieldElement) -> FieldElement:
        raise NotImplementedError

    def __call__(self, x: FieldElement) -> FieldElement:
        return self.evaluate(x)

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError


class IdentityTerm(Term):
    """d_0 = id."""

    def __init__(self, field: RationalFunctionField):
        self.field = field

    def evaluate(self, x: FieldElement) -> FieldElement:
        return x

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "identity"}

    def __repr__(self) -> str:
        return "IdentityTerm()"


class IterateTerm(Term):
    """scale * d^order for a base derivation d."""

    def __init__(self, base: DerivationSpec, order: int, scale: Union[int, Fraction] = 1):
        if order < 0:
            raise InputError(f"Iterate order must be >= 0, got {order}")
        self.field = base.field
        self.base = base
        self.order = order
        self.scale = Fraction(scale)

    def evaluate(self, x: FieldElement) -> FieldElement:
        if self.scale == 0:
            return self.field.zero
        return iterate(self.base, self.order, x) * self.scale

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "iterate",
            "order": self.order,
            "scale": format_rational(self.scale),
            "base": self.base.to_dict()
        }

    def __repr__(self) -> str:
        return f"IterateTerm(order={self.order}, scale={format_rational(self.scale)})"


class SumTerm(Term):
    """Rational linear combination of terms."""

    def __init__(self, parts: Sequence[Tuple[Union[int, Fraction], Term]]):
        if not parts:
            raise InputError("A sum term needs at least one part")
        self.parts = tuple((Fraction(c), term) for c, term in parts)
        self.field = self.parts[0][1].field

    def evaluate(self, x: FieldElement) -> FieldElement:
        total = self.field.zero
        for coefficient, term in self.parts:
            if coefficient:
                total = total + term.evaluate(x) * coefficient
        return total

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "sum",
            "parts": [{"scale": format_rational(c), "term": t.to_dict()} for c, t in self.parts]
        }

    def __repr__(self) -> str:
        return f"SumTerm({list(self.parts)!r})"


@dataclass(frozen=True)
class DerivationSequence:
    """(d_0 = id, d_1, ..., d_n); base is the derivation the terms were built from, if any."""
    field: RationalFunctionField
    terms: Tuple[Term, ...]
    base: Optional[DerivationSpec] = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms or not isinstance(self.terms[0], IdentityTerm):
            raise InputError("d_0 of a derivation sequence must be the identity")
        for term in self.terms:
            if term.field != self.field:
                raise InputError(f"Term {term!r} does not act on {self.field!r}")

    @classmethod
    def from_terms(
        cls,
        field: RationalFunctionField,
        terms: Sequence[Term],
        base: Optional[DerivationSpec] = None
    ) -> "DerivationSequence":
        """Build (id, *terms)."""
        return cls(field, (IdentityTerm(field), *terms), base)

    @property
    def n(self) -> int:
        return len(self.terms) - 1

    def evaluate(self, k: int, x: FieldElement) -> FieldElement:
        return self.terms[k].evaluate(x)

    def values(self, x: FieldElement) -> list:
        """[d_0(x), ..., d_n(x)]."""
        return [term.evaluate(x) for term in self.terms]

    def prefix(self, k: int) -> "DerivationSequence":
        """Orders 0..k."""
        if not 0 <= k <= self.n:
            raise InputError(f"Prefix order {k} out of range 0..{self.n}")
        return DerivationSequence(self.field, self.terms[:k + 1], self.base)

    def extend(self, term: Term) -> "DerivationSequence":
        return DerivationSequence(self.field, (*self.terms, term), self.base)

    def vanishes_on_rationals(self, values: Sequence[Fraction] = (Fraction(1), Fraction(5, 7))) -> bool:
        """d_k(q) = 0 for k >= 1 at the given rationals."""
        return all(
            term.evaluate(self.field.constant(q)).is_zero
            for term in self.terms[1:]
            for q in values
        )

    def to_dict(self) -> Dict[str, Any]:
        result = {"n": self.n, "terms": [term.to_dict() for term in self.terms[1:]]}
        if self.base is not None:
            result["base"] = self.base.to_dict()
        return result


def canonical_sequence(d: DerivationSpec, g: GammaVector) -> DerivationSequence:
    """
    (e_0, ..., e_n) with e_k = (gamma(k) / k!) * d^k.

    This sequence satisfies the weighted Leibniz system for the table
    synthesized from g; gamma(k) = k! gives the plain iterates.
    """
    if g.n < 1:
        raise InputError(f"Canonical sequences need gamma up to order >= 1, got n={g.n}")
    logger.info(f"Building canonical sequence: n={g.n}, gamma={[format_rational(v) for v in g.values]}")
    terms = [IterateTerm(d, k, g[k] / factorial(k)) for k in range(1, g.n + 1)]
    return DerivationSequence.from_terms(d.field, terms, base=d)


def add_derivation_to_last(sequence: DerivationSequence, delta: DerivationSpec) -> DerivationSequence:
    """(d_0, ..., d_{n-1}, d_n + delta); again a solution when delta is a derivation."""
    if sequence.n < 1:
        raise InputError("The sequence has no term to perturb")
    last = SumTerm(((1, sequence.terms[-1]), (1, IterateTerm(delta, 1))))
    return DerivationSequence(sequence.field, (*sequence.terms[:-1], last), sequence.base)
