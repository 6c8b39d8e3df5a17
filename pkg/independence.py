"""
Linear independence of the terms of a derivation sequence.

Exact side: witness determinants and null-space dependence certificates
over the field. Numeric side: density search for graph points
(x, d_1(x), ..., d_n(x)) near a target at a real embedding.
"""

import logging
import math
import random
from fractions import Fraction
from typing import List, Sequence

import numpy as np
import sympy
from scipy import linalg
from sympy.polys.matrices import DomainMatrix

from config import (
    DEFAULT_CERTIFICATE_BOUND,
    DEFAULT_DEGREE_BOUND,
    DEFAULT_DENSITY_EPS,
    DEFAULT_SEED,
    DEFAULT_WITNESS_BUDGET,
    GATE_SAMPLE_COUNT,
    INITIAL_MAX_DENOMINATOR,
    MAX_DENSITY_RETRIES,
    PIVOT_THRESHOLD,
)
from derivations import DerivationSequence
from errors import (
    CocycleError,
    InputError,
    PoleError,
    PrefixCheckError,
    RetriesExhaustedError,
    SearchExhaustedError,
    SingularSelectionError,
)
from field_core import (
    FieldElement,
    RationalFunctionField,
    common_denominator,
    enumerate_basis,
    eval_numeric,
    polynomial_terms,
    random_element,
)
from gamma import check_cocycle, order_condition_failures
from leibniz import check_system
from models import (
    DensityResult,
    DependenceCertificate,
    DependenceVerdict,
    GammaTable,
    NumericEmbedding,
    WitnessMatrix,
    WitnessReport,
)

logger = logging.getLogger(__name__)


# --- Exact witnesses ---------------------------------------------------------------

def _domain_matrix(field: RationalFunctionField, rows: List[List[FieldElement]]) -> DomainMatrix:
    domain = field.frac_field.to_domain()
    shape = (len(rows), len(rows[0]) if rows else 0)
    return DomainMatrix([[e.frac for e in row] for row in rows], shape, domain)


def witness_independence(sequence: DerivationSequence, points: Sequence[FieldElement]) -> WitnessReport:
    """
    Exact determinant of M[i][j] = d_j(x_i).

    A nonzero determinant certifies that id, d_1, ..., d_n are linearly
    independent over QQ(t); zero only means these points are inconclusive.
    """
    field = sequence.field
    points = [field.coerce(p) for p in points]
    if len(points) != sequence.n + 1:
        raise InputError(f"Witness needs {sequence.n + 1} points, got {len(points)}")

    entries = [sequence.values(x) for x in points]
    det = field.wrap(_domain_matrix(field, entries).det())
    verdict = "inconclusive" if det.is_zero else "independent"
    logger.info(f"Witness determinant for n={sequence.n}: {verdict}")
    return WitnessReport(verdict, WitnessMatrix(points, entries, det))


def _rank(field: RationalFunctionField, rows: List[List[FieldElement]]) -> int:
    return _domain_matrix(field, rows).rank()


def find_witness(
    sequence: DerivationSequence,
    degree_bound: int = DEFAULT_DEGREE_BOUND,
    budget: int = DEFAULT_WITNESS_BUDGET,
    seed: int = DEFAULT_SEED
) -> List[FieldElement]:
    """
    Greedily collect n+1 points whose rows d_j(x) are linearly independent.

    Candidates are the enumerated basis, then seeded random elements; each
    candidate evaluated counts against the budget.

    Raises:
        SearchExhaustedError: budget spent without a nonzero determinant
    """
    if budget < 1:
        raise InputError(f"budget must be >= 1, got {budget}")
    field = sequence.field
    size = sequence.n + 1
    if size == 1:
        return [field.one]

    logger.info(f"Searching witness: n={sequence.n}, degree_bound={degree_bound}, budget={budget}, seed={seed}")
    basis = enumerate_basis(field, degree_bound)
    rng = random.Random(seed)

    points: List[FieldElement] = []
    rows: List[List[FieldElement]] = []
    for evaluated in range(budget):
        if evaluated < len(basis):
            candidate = basis[evaluated]
        else:
            candidate = random_element(field, rng)
        row = sequence.values(candidate)
        if not any(row):
            continue
        if _rank(field, rows + [row]) == len(rows) + 1:
            points.append(candidate)
            rows.append(row)
            if len(points) == size:
                logger.info(f"Witness found after {evaluated + 1} candidates")
                return points

    logger.warning(f"Witness search exhausted: rank {len(points)} of {size} after {budget} candidates")
    raise SearchExhaustedError(
        f"No witness within budget {budget}: reached rank {len(points)} of {size}; "
        "this does not prove dependence"
    )


# --- Dependence certificates -------------------------------------------------------

def _normalize_relation(vector) -> tuple:
    values = [Fraction(int(r.p), int(r.q)) for r in (sympy.Rational(v) for v in vector)]
    scale = math.lcm(*(v.denominator for v in values))
    integers = [int(v * scale) for v in values]
    divisor = math.gcd(*integers) or 1
    integers = [v // divisor for v in integers]
    leading = next(v for v in integers if v)
    sign = 1 if leading > 0 else -1
    return tuple(Fraction(sign * v) for v in integers)


def dependence_certificate(
    sequence: DerivationSequence,
    basis_bound: int = DEFAULT_CERTIFICATE_BOUND
) -> DependenceCertificate:
    """
    Search a relation c_0 d_0 + ... + c_n d_n = 0 on the span of enumerate_basis(bound).

    Every value d_j(b) is written over one common denominator, so each
    monomial coefficient of the numerators gives one linear equation in c.
    The relation is scaled to coprime integers with a positive leading entry.
    """
    if basis_bound < 1:
        raise InputError(f"basis_bound must be >= 1, got {basis_bound}")
    field = sequence.field
    basis = enumerate_basis(field, basis_bound)
    columns = sequence.n + 1
    logger.info(f"Building dependence system: n={sequence.n}, basis size {len(basis)}")

    equations = []
    for b in basis:
        values = sequence.values(b)
        denominator = common_denominator(values)
        coordinates = {}
        for j, value in enumerate(values):
            if value.is_zero:
                continue
            numerator = value.numer * denominator.exquo(value.denom)
            for monom, coeff in polynomial_terms(numerator):
                coordinates.setdefault(monom, [Fraction(0)] * columns)[j] = coeff
        equations.extend(coordinates[monom] for monom in sorted(coordinates))

    if not equations:
        kernel = [sympy.Matrix([1] + [0] * (columns - 1))]
    else:
        matrix = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in row] for row in equations])
        kernel = matrix.nullspace()

    if not kernel:
        logger.info("No relation on this basis")
        return DependenceCertificate(None, len(basis), len(equations))
    relation = _normalize_relation(kernel[0])
    logger.info(f"Relation found: {relation}")
    return DependenceCertificate(relation, len(basis), len(equations))


def dependence_verdict(
    sequence: DerivationSequence,
    table: GammaTable,
    verify: bool = True,
    sample_count: int = GATE_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED
) -> DependenceVerdict:
    """
    For a solution of the system with a cocycle table meeting the order
    condition, id, d_1, ..., d_n are dependent exactly when d_1 = 0.

    Raises:
        CocycleError: the table fails the cocycle identity
        InputError: the table fails the order condition
        PrefixCheckError: verify is set and the sequence violates the system
    """
    if sequence.n < 1:
        raise InputError("A verdict needs a sequence of order >= 1")
    cocycle = check_cocycle(table)
    if not cocycle.passed:
        raise CocycleError("Gamma table fails the cocycle identity", cocycle.violations)
    failures = order_condition_failures(table)
    if failures:
        raise InputError(f"Gamma table fails the order condition at orders {failures}")
    if verify:
        report = check_system(sequence, table, sample_count, seed)
        if not report.passed:
            raise PrefixCheckError(f"Sequence violates the system at orders {report.failing_orders()}", report)

    field = sequence.field
    first = {name: sequence.evaluate(1, g) for name, g in zip(field.generators, field.gens)}
    dependent = all(v.is_zero for v in first.values())
    relation = tuple(Fraction(int(j == 1)) for j in range(sequence.n + 1)) if dependent else None
    return DependenceVerdict(dependent, relation, first)


# --- Density -----------------------------------------------------------------------

def _image(sequence: DerivationSequence, x: FieldElement, embedding: NumericEmbedding) -> List[float]:
    return [eval_numeric(v, embedding) for v in sequence.values(x)]


def _max_error(image: Sequence[float], target: Sequence[float]) -> float:
    return max(abs(a - b) for a, b in zip(image, target))


def density_search(
    sequence: DerivationSequence,
    embedding: NumericEmbedding,
    target: Sequence[float],
    eps: float = DEFAULT_DENSITY_EPS,
    degree_bound: int = DEFAULT_DEGREE_BOUND,
    max_denominator: int = INITIAL_MAX_DENOMINATOR,
    max_retries: int = MAX_DENSITY_RETRIES
) -> DensityResult:
    """
    Find x with max |(x, d_1(x), ..., d_n(x)) - target| < eps at the embedding.

    Selects n+1 well-conditioned basis vectors by column-pivoted QR, solves
    for real coefficients, rounds them to rationals by best approximation
    and doubles the denominator bound until the exactly built witness is
    close enough.

    Raises:
        SingularSelectionError: the basis vectors span less than R^(n+1)
        RetriesExhaustedError: rounding never reached eps
    """
    size = sequence.n + 1
    target = [float(v) for v in target]
    if len(target) != size:
        raise InputError(f"Target needs {size} coordinates, got {len(target)}")
    if not eps > 0:
        raise InputError(f"eps must be > 0, got {eps}")
    field = sequence.field
    logger.info(f"Density search: n={sequence.n}, target={target}, eps={eps}, degree_bound={degree_bound}")

    if all(v == 0 for v in target[1:]):
        value = Fraction(target[0])
        for candidate in (value.limit_denominator(max_denominator), value):
            witness = field.constant(candidate)
            image = _image(sequence, witness, embedding)
            error = _max_error(image, target)
            if error < eps:
                return DensityResult(witness, image, target, error, embedding, max_denominator, 0)

    basis, vectors = [], []
    for b in enumerate_basis(field, degree_bound):
        try:
            vectors.append(_image(sequence, b, embedding))
            basis.append(b)
        except PoleError:
            logger.info(f"Skipping basis element {b}: pole at the embedding")

    matrix = np.array(vectors, dtype=float).T
    if matrix.shape[1] < size:
        raise SingularSelectionError(f"Only {matrix.shape[1]} basis vectors for dimension {size}")
    norms = np.linalg.norm(matrix, axis=0)
    norms[norms == 0] = 1.0
    _, r, pivots = linalg.qr(matrix / norms, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(r))
    if diagonal.size < size or diagonal[0] == 0 or np.any(diagonal[:size] < PIVOT_THRESHOLD * diagonal[0]):
        logger.warning("Density search: selected basis vectors are numerically dependent")
        raise SingularSelectionError(
            "Basis vectors are numerically dependent; enlarge the degree bound "
            "(no dense graph exists when d_1 = 0)"
        )

    selected = [int(p) for p in pivots[:size]]
    alpha = np.linalg.solve(matrix[:, selected], np.array(target))

    best = math.inf
    bound = max_denominator
    for attempt in range(1, max_retries + 1):
        coefficients = [Fraction(float(a)).limit_denominator(bound) for a in alpha]
        witness = field.zero
        for c, index in zip(coefficients, selected):
            if c:
                witness = witness + basis[index] * c
        image = _image(sequence, witness, embedding)
        error = _max_error(image, target)
        best = min(best, error)
        if error < eps:
            logger.info(f"Density witness found: error={error:.3e}, attempts={attempt}")
            return DensityResult(witness, image, target, error, embedding, bound, attempt)
        bound *= 2

    logger.warning(f"Density search exhausted {max_retries} retries, best error {best:.3e}")
    raise RetriesExhaustedError(f"No witness within eps={eps} after {max_retries} retries", best)
