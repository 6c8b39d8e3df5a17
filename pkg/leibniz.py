"""
The weighted Leibniz system d_k(xy) = sum_i Gamma(i, k-i) d_i(x) d_{k-i}(y).

Checks a sequence against the system by exact random sampling, computes
the Leibniz defect D_n of a prefix, checks the conditions a defect must
meet to be the Leibniz difference of an additive map, and constructs the
next term of a valid prefix.
"""

import logging
import random
from math import factorial
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

from config import CANONICAL_CHECK_SAMPLES, DEFAULT_SEED, GATE_SAMPLE_COUNT
from derivations import DerivationSequence, DerivationSpec, IterateTerm, SumTerm, Term, apply, canonical_sequence
from errors import CocycleError, InconsistencyError, InputError, PrefixCheckError
from field_core import FieldElement, Polynomial, polynomial_terms, random_element, sample_elements
from gamma import check_cocycle, factorize
from models import DefectReport, DefectViolation, Decomposition, GammaTable, GammaVector, SystemReport, SystemViolation

logger = logging.getLogger(__name__)

BilinearForm = Callable[[FieldElement, FieldElement], FieldElement]


def _require_order(table: GammaTable, order: int) -> None:
    if table.n < order:
        raise InputError(f"Gamma table of order {table.n} does not cover order {order}")


def leibniz_defect(
    prefix: DerivationSequence,
    table: GammaTable,
    x: FieldElement,
    y: FieldElement
) -> FieldElement:
    """
    D_n(x, y) = sum_{i=1}^{n-1} Gamma(i, n-i) d_i(x) d_{n-i}(y), with n = prefix.n + 1.

    This is what d_n(xy) - x d_n(y) - y d_n(x) must equal.
    """
    n = prefix.n + 1
    _require_order(table, n)
    total = prefix.field.zero
    if n < 2:
        return total
    x_values = [prefix.evaluate(i, x) for i in range(1, n)]
    y_values = [prefix.evaluate(i, y) for i in range(1, n)]
    for i in range(1, n):
        weight = table(i, n - i)
        left, right = x_values[i - 1], y_values[n - i - 1]
        if weight and left and right:
            total = total + left * right * weight
    return total


def check_system(
    sequence: DerivationSequence,
    table: GammaTable,
    sample_count: int = GATE_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED
) -> SystemReport:
    """
    Check the weighted Leibniz system for k = 1..n on random pairs.

    Args:
        sequence: (id, d_1, ..., d_n)
        table: Gamma table with table.n >= sequence.n
        sample_count: Number of random (x, y) pairs
        seed: Seed of the pair sampler

    Returns:
        SystemReport listing every (k, x, y) where the identity fails
    """
    if sample_count < 1:
        raise InputError(f"sample_count must be >= 1, got {sample_count}")
    _require_order(table, sequence.n)
    logger.info(f"Checking Leibniz system: n={sequence.n}, samples={sample_count}, seed={seed}")

    field = sequence.field
    rng = random.Random(seed)
    violations = []
    for _ in range(sample_count):
        x = random_element(field, rng)
        y = random_element(field, rng)
        if sequence.n == 0:
            continue
        x_values = sequence.values(x)
        y_values = sequence.values(y)
        xy_values = sequence.values(x * y)
        for k in range(1, sequence.n + 1):
            rhs = field.zero
            for i in range(k + 1):
                weight = table(i, k - i)
                if weight:
                    rhs = rhs + x_values[i] * y_values[k - i] * weight
            if xy_values[k] != rhs:
                violations.append(SystemViolation(k, x, y, xy_values[k], rhs))

    if violations:
        logger.warning(f"Leibniz system violated at orders {sorted({v.k for v in violations})}")
    else:
        logger.info("Leibniz system holds on all samples")
    return SystemReport(sequence.n, sample_count, seed, violations)


def check_bilinear_conditions(
    form: BilinearForm,
    field,
    sample_count: int = GATE_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED
) -> DefectReport:
    """
    Check that a two-variable map can be the Leibniz difference of an additive map:

        D(x, y) = D(y, x)
        D(xy, z) + z D(x, y) = D(x, yz) + x D(y, z)
        D(x + y, z) = D(x, z) + D(y, z)
    """
    if sample_count < 1:
        raise InputError(f"sample_count must be >= 1, got {sample_count}")
    rng = random.Random(seed)
    violations = []
    for _ in range(sample_count):
        x = random_element(field, rng)
        y = random_element(field, rng)
        z = random_element(field, rng)

        d_xy = form(x, y)
        d_yx = form(y, x)
        if d_xy != d_yx:
            violations.append(DefectViolation("symmetry", (x, y), d_xy, d_yx))

        d_yz = form(y, z)
        lhs = form(x * y, z) + z * d_xy
        rhs = form(x, y * z) + x * d_yz
        if lhs != rhs:
            violations.append(DefectViolation("multiplicative", (x, y, z), lhs, rhs))

        lhs = form(x + y, z)
        rhs = form(x, z) + d_yz
        if lhs != rhs:
            violations.append(DefectViolation("additivity", (x, y, z), lhs, rhs))

    return DefectReport(sample_count, seed, violations)


def check_defect_conditions(
    prefix: DerivationSequence,
    table: GammaTable,
    sample_count: int = GATE_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED
) -> DefectReport:
    """Run check_bilinear_conditions on the defect D_n of a prefix."""
    _require_order(table, prefix.n + 1)
    logger.info(f"Checking defect conditions: n={prefix.n + 1}, samples={sample_count}, seed={seed}")
    report = check_bilinear_conditions(
        lambda x, y: leibniz_defect(prefix, table, x, y), prefix.field, sample_count, seed
    )
    if not report.passed:
        logger.warning(f"Defect conditions fail: {report.failing_identities()}")
    return report


class ExtensionTerm(Term):
    """
    The order-n term built from a valid prefix:

        d_n(t) = choices(t) on generators, d_n(q) = 0 on rationals,
        d_n(xy) = x d_n(y) + y d_n(x) + D_n(x, y) on monomials,
        QQ-linear on polynomials,
        d_n(p/q) = (d_n(p) - (p/q) d_n(q) - D_n(q, p/q)) / q.

    Monomial values are memoized; one instance must not be evaluated from
    several threads at once.
    """

    def __init__(
        self,
        prefix: DerivationSequence,
        table: GammaTable,
        generator_values: Sequence[FieldElement]
    ):
        self.prefix = prefix
        self.order = prefix.n + 1
        _require_order(table, self.order)
        self.gamma = table.restrict(self.order)
        self.field = prefix.field
        self.generator_values = tuple(self.field.coerce(v) for v in generator_values)
        if len(self.generator_values) != self.field.ngens:
            raise InputError(f"Extension needs {self.field.ngens} generator values")

        ngens = self.field.ngens
        self._units = [tuple(int(i == j) for j in range(ngens)) for i in range(ngens)]
        self._monomials: Dict[Tuple[int, ...], FieldElement] = {(0,) * ngens: self.field.zero}
        for unit, value in zip(self._units, self.generator_values):
            self._monomials[unit] = value

    @property
    def choices(self) -> Dict[str, FieldElement]:
        return dict(zip(self.field.generators, self.generator_values))

    def defect(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return leibniz_defect(self.prefix, self.gamma, x, y)

    def _monomial(self, monom: Tuple[int, ...]) -> FieldElement:
        cached = self._monomials.get(monom)
        if cached is not None:
            return cached
        # t^alpha = t_i * t^(alpha - e_i) for the first generator present
        index = next(i for i, e in enumerate(monom) if e)
        rest = tuple(e - (i == index) for i, e in enumerate(monom))
        generator = self.field.gens[index]
        rest_value = self.field.monomial(rest)
        value = (
            generator * self._monomial(rest)
            + rest_value * self.generator_values[index]
            + self.defect(generator, rest_value)
        )
        self._monomials[monom] = value
        return value

    def _polynomial(self, p: Polynomial) -> FieldElement:
        total = self.field.zero
        for monom, coeff in polynomial_terms(p):
            if any(monom):
                total = total + self._monomial(monom) * coeff
        return total

    def evaluate(self, x: FieldElement) -> FieldElement:
        if x.is_constant():
            return self.field.zero
        numer, denom = x.frac.numer, x.frac.denom
        d_numer = self._polynomial(numer)
        q = self.field.from_polynomial(denom)
        if denom.is_ground:
            return d_numer / q
        d_denom = self._polynomial(denom)
        return (d_numer - x * d_denom - self.defect(q, x)) / q

    def to_dict(self) -> dict:
        return {
            "kind": "extension",
            "choices": {name: str(v) for name, v in zip(self.field.generators, self.generator_values)}
        }

    def __repr__(self) -> str:
        return f"ExtensionTerm(order={self.order}, choices={ {k: str(v) for k, v in self.choices.items()} })"


def resolve_choices(prefix: DerivationSequence, choices: Optional[Mapping[str, object]]) -> Tuple[FieldElement, ...]:
    field = prefix.field
    choices = dict(choices or {})
    unknown = [name for name in choices if name not in field.generators]
    if unknown:
        raise InputError(f"Choices name unknown generators: {unknown}")
    return tuple(field.coerce(choices.get(name, 0)) for name in field.generators)


def solve_next(
    prefix: DerivationSequence,
    table: GammaTable,
    choices: Optional[Mapping[str, object]] = None,
    gate_samples: int = GATE_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED,
    verify_prefix: bool = True
) -> ExtensionTerm:
    """
    Construct d_n for a prefix (id, d_1, ..., d_{n-1}) satisfying the system.

    Args:
        prefix: Orders 0..n-1
        table: Gamma table covering order n; must satisfy the cocycle identity
        choices: Values of d_n on generators (missing generators default to 0)
        gate_samples: Sample count of the prefix check
        seed: Seed of the prefix check
        verify_prefix: Run the prefix check before constructing

    Raises:
        CocycleError: the table fails the cocycle identity
        PrefixCheckError: the prefix does not satisfy the system
    """
    order = prefix.n + 1
    _require_order(table, order)
    logger.info(f"Solving for order {order} term")

    cocycle = check_cocycle(table)
    if not cocycle.passed:
        first = cocycle.violations[0]
        logger.warning(f"Refusing extension: cocycle fails at {(first.i, first.j, first.k)}")
        raise CocycleError(
            f"Gamma table fails the cocycle identity at {len(cocycle.violations)} triples, "
            f"first {(first.i, first.j, first.k)}",
            cocycle.violations
        )

    if verify_prefix and prefix.n >= 1:
        report = check_system(prefix, table, gate_samples, seed)
        if not report.passed:
            logger.warning(f"Refusing extension: prefix fails at orders {report.failing_orders()}")
            raise PrefixCheckError(
                f"Prefix violates the Leibniz system at orders {report.failing_orders()}", report
            )

    return ExtensionTerm(prefix, table, resolve_choices(prefix, choices))


def solve_to_order(
    prefix: DerivationSequence,
    table: GammaTable,
    target_order: int,
    choices_per_order: Optional[Sequence[Optional[Mapping[str, object]]]] = None,
    gate_samples: int = GATE_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED
) -> DerivationSequence:
    """Extend the prefix one order at a time up to target_order."""
    if target_order < prefix.n:
        raise InputError(f"Prefix already has order {prefix.n} > {target_order}")
    choices_per_order = list(choices_per_order or [])
    sequence = prefix
    for step, _ in enumerate(range(prefix.n + 1, target_order + 1)):
        choices = choices_per_order[step] if step < len(choices_per_order) else None
        sequence = sequence.extend(solve_next(sequence, table, choices, gate_samples, seed))
    return sequence


def _first_order_base(prefix: DerivationSequence) -> DerivationSpec:
    """d_1 of the prefix, read off on generators."""
    field = prefix.field
    return DerivationSpec(field, tuple(prefix.evaluate(1, g) for g in field.gens))


def is_canonical_prefix(
    prefix: DerivationSequence,
    gamma: GammaVector,
    sample_count: int = CANONICAL_CHECK_SAMPLES,
    seed: int = DEFAULT_SEED
) -> bool:
    """
    True iff d_k = (gamma(k) / k!) * d_1^k for k = 2..prefix.n on generators and samples.

    d_1 itself is taken as the base, so order 1 always matches.
    """
    if prefix.n < 2:
        return True
    field = prefix.field
    canonical = canonical_sequence(_first_order_base(prefix), GammaVector(gamma.values[:prefix.n + 1]))
    points = list(field.gens) + sample_elements(field, sample_count, seed)
    for k in range(2, prefix.n + 1):
        for x in points:
            if prefix.evaluate(k, x) != canonical.evaluate(k, x):
                logger.info(f"Prefix differs from the canonical sequence at order {k}")
                return False
    return True


def canonical_reference(
    term: ExtensionTerm,
    sample_count: int = CANONICAL_CHECK_SAMPLES,
    seed: int = DEFAULT_SEED
) -> Tuple[Term, str]:
    """
    The default reference for decompose_solution and its kind.

    When the prefix is the canonical sequence of d = d_1, the reference is
    (gamma(n) / n!) * d^n ("canonical"), with gamma from factorizing the
    table normalized to gamma(1) = 1. Otherwise it is the extension of the
    same prefix with zero generator values ("zero-extension").
    """
    field = term.field
    if term.prefix.n == 0:
        return IterateTerm(DerivationSpec.zero(field), 1), "canonical"
    factorization = factorize(term.gamma)
    if not factorization.succeeded:
        raise InputError("The gamma table does not factor; no canonical reference exists")
    if not is_canonical_prefix(term.prefix, factorization.gamma, sample_count, seed):
        zeros = tuple(field.zero for _ in field.gens)
        return ExtensionTerm(term.prefix, term.gamma, zeros), "zero-extension"
    n = term.order
    base = _first_order_base(term.prefix)
    return IterateTerm(base, n, factorization.gamma[n] / factorial(n)), "canonical"


def decompose_solution(
    term: ExtensionTerm,
    reference: Optional[Term] = None,
    sample_count: int = GATE_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED
) -> Decomposition:
    """
    Split d_n = reference + residual and check the residual is a derivation.

    Without a reference, canonical_reference picks one that extends the
    same prefix.

    Raises:
        InconsistencyError: the residual breaks the first-order Leibniz rule
    """
    if reference is None:
        reference, kind = canonical_reference(term, seed=seed)
    else:
        kind = "given"
    field = term.field
    residual = SumTerm(((1, term), (-1, reference)))
    values = tuple(residual.evaluate(g) for g in field.gens)
    spec = DerivationSpec(field, values)
    logger.info(f"Decomposing order {term.order} term against {kind} reference: residual {spec.to_dict()['values']}")

    rng = random.Random(seed)
    for _ in range(sample_count):
        x = random_element(field, rng)
        y = random_element(field, rng)
        r_x, r_y = residual.evaluate(x), residual.evaluate(y)
        if residual.evaluate(x * y) != x * r_y + y * r_x:
            raise InconsistencyError(f"Residual breaks the Leibniz rule at x={x}, y={y}")
        if r_x != apply(spec, x):
            raise InconsistencyError(f"Residual is not the derivation fixed by its generator values at x={x}")

    return Decomposition(residual, spec.as_mapping(), sample_count, seed, kind)
