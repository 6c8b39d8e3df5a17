"""
Gamma tables on Delta_n: validation, the cocycle identity, factorization
into a gamma vector and synthesis back from one.
"""

import logging
import random
from fractions import Fraction
from typing import Any, Iterable, List, Mapping, Tuple, Union

from errors import InputError, ZeroEntryError
from models import (
    CocycleReport,
    CocycleViolation,
    Factorization,
    FactorizationMismatch,
    GammaTable,
    GammaVector,
    TableViolation,
    ValidationReport,
    format_rational,
)

logger = logging.getLogger(__name__)

RawEntries = Union[Mapping[Tuple[int, int], Any], Iterable[Tuple[int, int, Any]]]


def parse_rational(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise InputError(f"Not a rational value: {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError(f"Not a rational value: {value!r}") from None


def _normalize_raw(raw_entries: RawEntries) -> List[Tuple[Tuple[int, int], Fraction]]:
    if isinstance(raw_entries, Mapping):
        items = [(key[0], key[1], value) for key, value in raw_entries.items()]
    else:
        items = list(raw_entries)
    normalized = []
    for item in items:
        if len(item) != 3:
            raise InputError(f"Table entries are [i, j, value] triples, got {item!r}")
        i, j, value = item
        if isinstance(i, bool) or isinstance(j, bool) or not isinstance(i, int) or not isinstance(j, int):
            raise InputError(f"Table indices must be integers, got {item!r}")
        normalized.append(((i, j), parse_rational(value)))
    return normalized


def validate(raw_entries: RawEntries, n: int) -> ValidationReport:
    """
    Check domain, symmetry and boundary conditions of raw table entries.

    Boundary entries may be omitted (they are implied to be 1); every
    interior index pair must be given in at least one orientation.

    Args:
        raw_entries: Mapping (i, j) -> value or iterable of (i, j, value)
        n: Order of the table

    Returns:
        ValidationReport listing every violation, with the table when valid
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"Gamma tables need an integer n >= 1, got {n!r}")
    logger.info(f"Validating gamma table: n={n}")

    violations: List[TableViolation] = []
    seen = {}
    for (i, j), value in _normalize_raw(raw_entries):
        if i < 0 or j < 0 or i + j > n:
            violations.append(TableViolation("domain", (i, j), f"({i}, {j}) is outside Delta_{n}", (value,)))
            continue
        if (i, j) in seen and seen[(i, j)] != value:
            violations.append(TableViolation(
                "domain", (i, j), f"({i}, {j}) is given twice with different values", (seen[(i, j)], value)
            ))
            continue
        seen[(i, j)] = value

    for (i, j), value in sorted(seen.items()):
        if i * j == 0 and value != 1:
            violations.append(TableViolation(
                "boundary", (i, j), f"Gamma({i}, {j}) must be 1, got {format_rational(value)}", (value,)
            ))

    for i, j in GammaTable.interior_indices(n):
        upper, lower = seen.get((i, j)), seen.get((j, i))
        if upper is None and lower is None:
            violations.append(TableViolation("domain", (i, j), f"Gamma({i}, {j}) is missing"))
        elif i != j and upper is not None and lower is not None and upper != lower:
            violations.append(TableViolation(
                "symmetry", (i, j), f"Gamma({i}, {j}) != Gamma({j}, {i})", (upper, lower)
            ))

    if violations:
        logger.warning(f"Gamma table invalid: {len(violations)} violations")
        return ValidationReport(n, violations)

    entries = {
        (i, j): seen[(i, j)] if (i, j) in seen else seen[(j, i)]
        for i, j in GammaTable.interior_indices(n)
    }
    return ValidationReport(n, [], GammaTable(n, entries))


def check_cocycle(table: GammaTable) -> CocycleReport:
    """
    Exhaustively check Gamma(i+j,k)Gamma(i,j) = Gamma(i,j+k)Gamma(j,k) for i+j+k <= n.

    Every failing triple is reported with both side values.
    """
    n = table.n
    logger.info(f"Checking cocycle identity: n={n}")
    violations = []
    checked = 0
    for i in range(n + 1):
        for j in range(n + 1 - i):
            for k in range(n + 1 - i - j):
                checked += 1
                left = table(i + j, k) * table(i, j)
                right = table(i, j + k) * table(j, k)
                if left != right:
                    violations.append(CocycleViolation(i, j, k, left, right))
    logger.info(f"Cocycle check finished: {checked} triples, {len(violations)} violations")
    return CocycleReport(n, checked, violations)


def order_condition_failures(table: GammaTable) -> List[int]:
    """Orders k in 2..n where every interior Gamma(i, k-i) is zero."""
    return [
        k for k in range(2, table.n + 1)
        if all(table(i, k - i) == 0 for i in range(1, k))
    ]


def check_order_condition(table: GammaTable) -> bool:
    """True iff each order k in 2..n has some nonzero interior Gamma(i, k-i)."""
    return not order_condition_failures(table)


def factorize(table: GammaTable) -> Factorization:
    """
    Factor a nowhere-zero table as Gamma(i,j) = gamma(i+j) / (gamma(i) gamma(j)).

    gamma(k) is the product of Gamma(l, 1) for l = 1..k-1, so
    gamma(0) = gamma(1) = 1. Succeeds exactly when the table satisfies the
    cocycle identity.

    Raises:
        ZeroEntryError: if an interior entry is zero
    """
    zeros = table.zero_entries()
    if zeros:
        i, j = zeros[0]
        raise ZeroEntryError(f"Gamma({i}, {j}) is zero; only nowhere-zero tables factor", zeros[0])

    gamma = [Fraction(1), Fraction(1)]
    for k in range(2, table.n + 1):
        gamma.append(gamma[-1] * table(k - 1, 1))

    for i, j in GammaTable.interior_indices(table.n):
        factored = gamma[i + j] / (gamma[i] * gamma[j])
        if table(i, j) != factored:
            logger.info(f"Factorization mismatch at ({i}, {j})")
            return Factorization(mismatch=FactorizationMismatch(i, j, table(i, j), factored))

    return Factorization(gamma=GammaVector(tuple(gamma[:table.n + 1])))


def synthesize(g: GammaVector) -> GammaTable:
    """The table gamma(i+j) / (gamma(i) gamma(j)) on Delta_n."""
    if g.n < 1:
        raise InputError(f"Synthesis needs gamma up to order >= 1, got n={g.n}")
    return GammaTable(g.n, {
        (i, j): g[i + j] / (g[i] * g[j]) for i, j in GammaTable.interior_indices(g.n)
    })


def _random_nonzero(rng: random.Random, bound: int = 9) -> Fraction:
    numerator = rng.choice([v for v in range(-bound, bound + 1) if v])
    return Fraction(numerator, rng.randint(1, bound))


def random_gamma_vector(n: int, rng: random.Random) -> GammaVector:
    """gamma(0) = 1 followed by random nonzero rationals."""
    return GammaVector((Fraction(1), *(_random_nonzero(rng) for _ in range(n))))


def perturb_table(table: GammaTable, rng: random.Random) -> GammaTable:
    """Multiply one random interior entry by a nonzero factor other than 1."""
    index = rng.choice(GammaTable.interior_indices(table.n))
    factor = Fraction(1)
    while factor == 1:
        factor = _random_nonzero(rng)
    return table.with_entry(index[0], index[1], table.entries[index] * factor)
