"""
Exact sparse linear solves over the rationals.
"""
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

from loguru import logger
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

Column = Mapping[Hashable, Fraction]


def to_qq(value: Fraction):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def from_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def solve_sparse(
    columns: Sequence[Column], target: Column
) -> list[Fraction] | None:
    """
    Solve ``sum_j x_j * columns[j] == target`` exactly.

    Columns and target are sparse vectors keyed by arbitrary hashable row
    labels. Free unknowns are set to zero, so the answer is deterministic
    for a fixed column order. Returns ``None`` if the system is
    inconsistent.

    Example:
        >>> solve_sparse([{"a": 1}, {"a": 1, "b": 2}], {"a": 2, "b": 2})
        [Fraction(1, 1), Fraction(1, 1)]
    """
    n = len(columns)
    rows: dict[Hashable, int] = {}
    for column in columns:
        for key in column:
            rows.setdefault(key, len(rows))
    for key, value in target.items():
        if value and key not in rows:
            return None

    data: dict[int, dict[int, object]] = {}
    for j, column in enumerate(columns):
        for key, value in column.items():
            if value:
                data.setdefault(rows[key], {})[j] = to_qq(value)
    for key, value in target.items():
        if value:
            data.setdefault(rows[key], {})[n] = to_qq(value)
    if not data:
        return [Fraction(0)] * n

    logger.debug(f"sparse solve: {len(rows)} rows x {n} unknowns")
    matrix = DomainMatrix(data, (len(rows), n + 1), QQ)
    reduced, pivots = matrix.rref()
    if n in pivots:
        return None
    entries = reduced.to_sparse().rep
    solution = [Fraction(0)] * n
    for row, col in enumerate(pivots):
        value = entries.get(row, {}).get(n)
        if value is not None:
            solution[col] = from_qq(value)
    return solution
