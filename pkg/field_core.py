"""
Exact arithmetic over QQ(t_1, ..., t_m).

FieldElement wraps a sympy FracElement over QQ with graded lexicographic
order. sympy keeps numerator and denominator coprime; this module adds the
monic-denominator canonical form used for printing and equality, the
expression parser, floating evaluation at a NumericEmbedding and the
monomial enumeration shared by the independence search.
"""

import functools
import itertools
import logging
import math
import random
import re
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.fields import FracField
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement

from config import POLE_TOLERANCE, SAMPLING_BOUNDS
from errors import (
    EmbeddingError,
    FieldDivisionError,
    InputError,
    ParseError,
    PoleError,
    UnknownIdentifierError,
)
from models import NumericEmbedding

logger = logging.getLogger(__name__)

Polynomial = PolyElement
Scalar = Union[int, Fraction]

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def to_fraction(coeff) -> Fraction:
    """Convert a QQ ground element (python or gmpy backend) to a Fraction."""
    return Fraction(int(coeff.numerator), int(coeff.denominator))


def to_coefficient(value: Scalar):
    """Convert an int or Fraction to a QQ ground element."""
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def polynomial_terms(p: Polynomial) -> List[Tuple[Tuple[int, ...], Fraction]]:
    """Terms of p in descending graded lexicographic order."""
    return [(monom, to_fraction(coeff)) for monom, coeff in p.terms()]


class RationalFunctionField:
    """The field QQ(t_1, ..., t_m) over an ordered list of generator names."""

    def __init__(self, generators: Sequence[str]):
        generators = tuple(generators)
        if not generators:
            raise InputError("A field needs at least one generator")
        for name in generators:
            if not isinstance(name, str) or not _IDENTIFIER.match(name):
                raise InputError(f"Invalid generator name: {name!r}")
        if len(set(generators)) != len(generators):
            raise InputError(f"Duplicate generator names: {list(generators)}")

        self.generators = generators
        self.frac_field = FracField(generators, QQ, grlex)
        self.ring = self.frac_field.ring

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalFunctionField) and self.generators == other.generators

    def __hash__(self) -> int:
        return hash(self.generators)

    def __repr__(self) -> str:
        return f"RationalFunctionField({list(self.generators)})"

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def wrap(self, frac) -> "FieldElement":
        return FieldElement(self, frac)

    def from_polynomial(self, p: Polynomial) -> "FieldElement":
        return FieldElement(self, self.frac_field.field_new(p))

    def constant(self, value: Scalar) -> "FieldElement":
        return FieldElement(self, self.frac_field.field_new(to_coefficient(value)))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, self.frac_field.zero)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, self.frac_field.one)

    @property
    def gens(self) -> Tuple["FieldElement", ...]:
        return tuple(FieldElement(self, g) for g in self.frac_field.gens)

    def gen(self, name: str) -> "FieldElement":
        try:
            index = self.generators.index(name)
        except ValueError:
            raise InputError(f"'{name}' is not a generator of {self!r}") from None
        return FieldElement(self, self.frac_field.gens[index])

    def monomial(self, exponents: Sequence[int]) -> "FieldElement":
        """t^alpha for an exponent vector; negative exponents give Laurent monomials."""
        if len(exponents) != self.ngens:
            raise InputError(f"Exponent vector {tuple(exponents)} does not match {self.ngens} generators")
        positive = tuple(max(e, 0) for e in exponents)
        negative = tuple(max(-e, 0) for e in exponents)
        numer = self.ring.from_dict({positive: 1})
        denom = self.ring.from_dict({negative: 1})
        return FieldElement(self, self.frac_field.new(numer, denom))

    def coerce(self, value) -> "FieldElement":
        """Accept a FieldElement, int, Fraction or expression string."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise InputError(f"Element {value} lives in {value.field!r}, not {self!r}")
            return value
        if isinstance(value, bool):
            raise InputError(f"Cannot use {value!r} as a field element")
        if isinstance(value, (int, Fraction)):
            return self.constant(value)
        if isinstance(value, str):
            return parse_expr(value, self)
        raise InputError(f"Cannot use {value!r} as a field element")


@functools.lru_cache(maxsize=None)
def get_field(generators: Tuple[str, ...]) -> RationalFunctionField:
    """Shared field instance per generator tuple."""
    return RationalFunctionField(generators)


class FieldElement:
    """Reduced rational function p/q with q monic under graded lex order."""

    __slots__ = ("field", "frac")

    def __init__(self, field: RationalFunctionField, frac):
        self.field = field
        self.frac = frac

    def _coerce(self, other) -> Optional["FieldElement"]:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise InputError(f"Cannot combine elements of {self.field!r} and {other.field!r}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FieldElement(self.field, self.frac + other.frac)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FieldElement(self.field, self.frac - other.frac)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FieldElement(self.field, other.frac - self.frac)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FieldElement(self.field, self.frac * other.frac)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other.frac:
            raise FieldDivisionError(f"Division of {self} by zero")
        return FieldElement(self.field, self.frac / other.frac)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __neg__(self):
        return FieldElement(self.field, -self.frac)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or isinstance(exponent, bool):
            return NotImplemented
        if exponent < 0 and not self.frac:
            raise FieldDivisionError(f"Zero raised to negative power {exponent}")
        return FieldElement(self.field, self.frac ** exponent)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.frac == other.frac
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.frac == self.field.constant(other).frac
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.generators, self.frac))

    def __bool__(self) -> bool:
        return bool(self.frac)

    @property
    def is_zero(self) -> bool:
        return not self.frac

    def _normalized(self) -> Tuple[Polynomial, Polynomial]:
        numer, denom = self.frac.numer, self.frac.denom
        lc = denom.LC
        if lc != QQ.one:
            numer, denom = numer.quo_ground(lc), denom.quo_ground(lc)
        return numer, denom

    @property
    def numer(self) -> Polynomial:
        return self._normalized()[0]

    @property
    def denom(self) -> Polynomial:
        return self._normalized()[1]

    def is_constant(self) -> bool:
        return self.frac.numer.is_ground and self.frac.denom.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise InputError(f"{self} is not a constant")
        numer, denom = self._normalized()
        return to_fraction(numer.LC) / to_fraction(denom.LC)

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"FieldElement('{render(self)}')"


# --- Canonical printer ----------------------------------------------------------

def _render_scalar(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _render_monomial(monom: Tuple[int, ...], generators: Sequence[str]) -> str:
    factors = []
    for name, exponent in zip(generators, monom):
        if exponent == 1:
            factors.append(name)
        elif exponent > 1:
            factors.append(f"{name}^{exponent}")
    return "*".join(factors)


def render_polynomial(p: Polynomial, generators: Sequence[str]) -> str:
    if not p:
        return "0"
    pieces = []
    for monom, coeff in polynomial_terms(p):
        monomial = _render_monomial(monom, generators)
        magnitude = abs(coeff)
        if not monomial:
            body = _render_scalar(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{_render_scalar(magnitude)}*{monomial}"
        if not pieces:
            pieces.append(body if coeff > 0 else f"-{body}")
        else:
            pieces.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(pieces)


def render(x: FieldElement) -> str:
    """Canonical text of x; parse_expr(render(x)) == x."""
    numer, denom = x._normalized()
    generators = x.field.generators
    numer_text = render_polynomial(numer, generators)
    if denom == x.field.ring.one:
        return numer_text
    if len(numer) > 1:
        numer_text = f"({numer_text})"
    denom_text = render_polynomial(denom, generators)
    single_power = len(denom) == 1 and sum(1 for e in denom.LM if e) == 1
    if not single_power:
        denom_text = f"({denom_text})"
    return f"{numer_text}/{denom_text}"


# --- Expression parser ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\S))")


class _ExpressionParser:
    """
    Recursive descent over

        expr   := term (("+"|"-") term)*
        term   := factor (("*"|"/") factor)*
        factor := base ("^" signed-integer)?
        base   := integer | identifier | "(" expr ")" | "-" factor
    """

    def __init__(self, text: str, field: RationalFunctionField):
        self.text = text
        self.field = field
        self.tokens = self._tokenize(text)
        self.index = 0

    @staticmethod
    def _tokenize(text: str) -> List[Tuple[str, str, int]]:
        tokens = []
        position = 0
        while position < len(text):
            match = _TOKEN.match(text, position)
            if match is None:
                break  # trailing whitespace
            kind = match.lastgroup
            tokens.append((kind, match.group(kind), match.start(kind)))
            position = match.end()
        tokens.append(("end", "", len(text)))
        return tokens

    def _peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def _advance(self) -> Tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _at_op(self, *ops: str) -> bool:
        kind, value, _ = self._peek()
        return kind == "op" and value in ops

    def parse(self) -> FieldElement:
        if self._peek()[0] == "end":
            raise ParseError("Empty expression", 0)
        value = self._expr()
        kind, token, position = self._peek()
        if kind != "end":
            raise ParseError(f"Unexpected '{token}'", position)
        return value

    def _expr(self) -> FieldElement:
        value = self._term()
        while self._at_op("+", "-"):
            _, op, _ = self._advance()
            right = self._term()
            value = value + right if op == "+" else value - right
        return value

    def _term(self) -> FieldElement:
        value = self._factor()
        while self._at_op("*", "/"):
            _, op, _ = self._advance()
            right = self._factor()
            value = value * right if op == "*" else value / right
        return value

    def _factor(self) -> FieldElement:
        value = self._base()
        if self._at_op("^"):
            self._advance()
            sign = 1
            if self._at_op("-", "+"):
                sign = -1 if self._advance()[1] == "-" else 1
            kind, token, position = self._advance()
            if kind != "number":
                raise ParseError("Expected an integer exponent", position)
            value = value ** (sign * int(token))
        return value

    def _base(self) -> FieldElement:
        kind, token, position = self._advance()
        if kind == "number":
            return self.field.constant(int(token))
        if kind == "name":
            if token not in self.field.generators:
                raise UnknownIdentifierError(token, position)
            return self.field.gen(token)
        if kind == "op" and token == "(":
            value = self._expr()
            kind, closing, close_position = self._advance()
            if kind != "op" or closing != ")":
                raise ParseError("Expected ')'", close_position)
            return value
        if kind == "op" and token == "-":
            return -self._factor()
        if kind == "end":
            raise ParseError("Unexpected end of expression", position)
        raise ParseError(f"Unexpected '{token}'", position)


def parse_expr(text: str, generators: Union[RationalFunctionField, Sequence[str]]) -> FieldElement:
    """
    Parse an expression into its canonical FieldElement.

    Args:
        text: Expression such as "(t^2+1)/(t-1)"
        generators: The ambient field or its generator names

    Returns:
        The canonical element denoted by text
    """
    field = generators if isinstance(generators, RationalFunctionField) else get_field(tuple(generators))
    if not isinstance(text, str):
        raise InputError(f"Expression must be a string, got {type(text).__name__}")
    return _ExpressionParser(text, field).parse()


# --- Numeric evaluation ------------------------------------------------------------

def _evaluate_polynomial(p: Polynomial, values: Sequence[float]) -> Tuple[float, float]:
    """Value of p at values and the sum of absolute term values."""
    terms = []
    for monom, coeff in p.terms():
        term = float(to_fraction(coeff))
        for value, exponent in zip(values, monom):
            if exponent:
                term *= value ** exponent
        terms.append(term)
    return math.fsum(terms), math.fsum(abs(t) for t in terms)


def embedding_values(embedding: NumericEmbedding, field: RationalFunctionField) -> Tuple[float, ...]:
    values = []
    for name in field.generators:
        if name not in embedding.assignment:
            raise EmbeddingError(f"Embedding does not assign generator '{name}'")
        value = float(embedding.assignment[name])
        if not math.isfinite(value):
            raise EmbeddingError(f"Embedding value for '{name}' is not finite: {value}")
        values.append(value)
    return tuple(values)


def eval_numeric(x: FieldElement, embedding: NumericEmbedding) -> float:
    """
    Floating value of x at the embedding.

    Raises:
        PoleError: if the denominator vanishes relative to its term magnitudes
    """
    values = embedding_values(embedding, x.field)
    numer, denom = x.frac.numer, x.frac.denom
    denom_value, denom_scale = _evaluate_polynomial(denom, values)
    if abs(denom_value) <= POLE_TOLERANCE * denom_scale:
        raise PoleError(f"Denominator of {x} vanishes at {dict(embedding.assignment)}")
    numer_value, _ = _evaluate_polynomial(numer, values)
    return numer_value / denom_value


# --- Basis enumeration and sampling --------------------------------------------------

def enumerate_basis(
    field: Union[RationalFunctionField, Sequence[str]],
    total_degree_bound: int
) -> List[FieldElement]:
    """
    Monomials t^alpha with |alpha| <= bound, then reciprocals of the nonconstant ones.

    Within a degree, monomials follow generator order, so [s, t] with bound 1
    gives [1, s, t, 1/s, 1/t].
    """
    if not isinstance(field, RationalFunctionField):
        field = get_field(tuple(field))
    if total_degree_bound < 0:
        raise InputError(f"Degree bound must be >= 0, got {total_degree_bound}")

    exponents = []
    for degree in range(1, total_degree_bound + 1):
        for combo in itertools.combinations_with_replacement(range(field.ngens), degree):
            exponents.append(tuple(combo.count(i) for i in range(field.ngens)))

    monomials = [field.one]
    monomials.extend(field.monomial(e) for e in exponents)
    monomials.extend(field.monomial(tuple(-v for v in e)) for e in exponents)
    return monomials


def random_polynomial(
    field: RationalFunctionField,
    rng: random.Random,
    max_terms: int,
    max_degree: int = SAMPLING_BOUNDS["max_degree"],
    nonzero: bool = False
) -> FieldElement:
    """Random polynomial with coefficients in {-9..9}/{1..9} and total degree <= max_degree."""
    while True:
        numer = field.ring.zero
        for _ in range(rng.randint(1, max_terms)):
            coeff = Fraction(
                rng.randint(-SAMPLING_BOUNDS["max_numerator"], SAMPLING_BOUNDS["max_numerator"]),
                rng.randint(1, SAMPLING_BOUNDS["max_denominator"])
            )
            exponents = [0] * field.ngens
            for _ in range(rng.randint(0, max_degree)):
                exponents[rng.randrange(field.ngens)] += 1
            numer += field.ring.from_dict({tuple(exponents): to_coefficient(coeff)})
        if numer or not nonzero:
            return field.from_polynomial(numer)


def random_element(
    field: RationalFunctionField,
    rng: random.Random,
    max_degree: int = SAMPLING_BOUNDS["max_degree"],
    numerator_terms: int = SAMPLING_BOUNDS["numerator_terms"],
    denominator_terms: int = SAMPLING_BOUNDS["denominator_terms"]
) -> FieldElement:
    """Random rational function built from two random polynomials."""
    numer = random_polynomial(field, rng, numerator_terms, max_degree)
    denom = random_polynomial(field, rng, denominator_terms, max_degree, nonzero=True)
    return numer / denom


def sample_elements(field: RationalFunctionField, count: int, seed: int, **bounds) -> List[FieldElement]:
    rng = random.Random(seed)
    return [random_element(field, rng, **bounds) for _ in range(count)]


def common_denominator(elements: Iterable[FieldElement]) -> Polynomial:
    """Least common multiple of the (monic) denominators."""
    elements = list(elements)
    if not elements:
        raise InputError("No elements given")
    return functools.reduce(lambda a, b: a.lcm(b), (x.denom for x in elements))
