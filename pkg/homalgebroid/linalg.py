"""Exact matrix helpers over QQ or a rational function field (sympy DomainMatrix)."""

from functools import lru_cache
from typing import Callable, List, Optional, Sequence

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from homalgebroid.errors import DegenerateError
from homalgebroid.ring import FRACTION, CoefficientRing, RingElement

Matrix = List[List[RingElement]]
Vector = List[RingElement]


@lru_cache(maxsize=None)
def _domain(ring: CoefficientRing):
    if ring.is_scalar:
        return QQ
    return ring.field.to_domain()


def to_domain_matrix(rows: Sequence[Sequence[RingElement]], ring: CoefficientRing) -> DomainMatrix:
    domain = _domain(ring.fraction_ring())
    converted = [[ring(entry).value if ring.is_scalar else entry.lift(ring.fraction_ring()).value
                  for entry in row] for row in rows]
    shape = (len(converted), len(converted[0]) if converted else 0)
    return DomainMatrix(converted, shape, domain)


def _element(x, ring: CoefficientRing) -> RingElement:
    if ring.is_scalar:
        return RingElement(ring, QQ.convert(x))
    target = ring.polynomial_ring() if ring.kind != FRACTION else ring
    return RingElement(target, x)


def from_domain_matrix(matrix: DomainMatrix, ring: CoefficientRing) -> Matrix:
    return [[_element(x, ring) for x in row] for row in matrix.to_list()]


def identity(n: int, ring: CoefficientRing) -> Matrix:
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int, ring: CoefficientRing) -> Matrix:
    return [[ring.zero for _ in range(cols)] for _ in range(rows)]


def transpose(matrix: Matrix) -> Matrix:
    return [list(column) for column in zip(*matrix)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    inner = len(b)
    result = []
    for row in a:
        out = []
        for j in range(len(b[0])):
            total = None
            for k in range(inner):
                if row[k] and b[k][j]:
                    term = row[k] * b[k][j]
                    total = term if total is None else total + term
            out.append(total if total is not None else row[0].ring.zero)
        result.append(out)
    return result


def matvec(a: Matrix, v: Vector) -> Vector:
    return [column[0] for column in matmul(a, [[x] for x in v])]


def subtract(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(c, a: Matrix) -> Matrix:
    return [[c * x for x in row] for row in a]


def entrywise(fn: Callable[[RingElement], RingElement], a: Matrix) -> Matrix:
    return [[fn(x) for x in row] for row in a]


def is_zero_matrix(a: Matrix) -> bool:
    return all(x.is_zero for row in a for x in row)


def first_nonzero(a: Matrix) -> Optional[tuple]:
    """(row, col, value) of the first nonzero entry in row-major order."""
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            if not x.is_zero:
                return i, j, x
    return None


def determinant(a: Matrix, ring: CoefficientRing) -> RingElement:
    if not a:
        return ring.one
    return _element(to_domain_matrix(a, ring).det(), ring)


def rank(a: Matrix, ring: CoefficientRing) -> int:
    if not a or not a[0]:
        return 0
    return to_domain_matrix(a, ring).rank()


def dependent_row(a: Matrix, ring: CoefficientRing) -> Optional[int]:
    """Index of the first row lying in the span of the rows before it."""
    previous = 0
    for i in range(len(a)):
        current = rank(a[:i + 1], ring)
        if current == previous:
            return i
        previous = current
    return None


def inverse(a: Matrix, ring: CoefficientRing, what: str = 'matrix') -> Matrix:
    """Inverse over the fraction field.

    Raises:
        DegenerateError: when ``a`` is singular; ``minor`` names a dependent row.
    """
    if determinant(a, ring).is_zero:
        row = dependent_row(a, ring)
        raise DegenerateError(f"{what} is singular (row {row} is dependent)", minor=(row,))
    return from_domain_matrix(to_domain_matrix(a, ring).inv(), ring)


def solve(a: Matrix, b: Vector, ring: CoefficientRing, what: str = 'system') -> Vector:
    """Solve a x = b for square nonsingular ``a``."""
    if determinant(a, ring).is_zero:
        row = dependent_row(a, ring)
        raise DegenerateError(f"{what} is singular (row {row} is dependent)", minor=(row,))
    rhs = to_domain_matrix([[x] for x in b], ring)
    solution = to_domain_matrix(a, ring).lu_solve(rhs)
    return [row[0] for row in from_domain_matrix(solution, ring)]


def nullspace(a: Matrix, ring: CoefficientRing) -> List[Vector]:
    """Basis of the kernel of ``a`` (vectors v with a v = 0) over the fraction field."""
    if not a:
        return []
    basis = to_domain_matrix(a, ring).nullspace()
    if basis.shape[0] == 0:
        return []
    return from_domain_matrix(basis, ring)


def row_space_contains(rows: Matrix, vector: Vector, ring: CoefficientRing) -> bool:
    if not rows:
        return all(x.is_zero for x in vector)
    return rank(rows + [vector], ring) == rank(rows, ring)


def coordinates_in(basis: Matrix, vector: Vector, ring: CoefficientRing) -> Optional[Vector]:
    """Coefficients c with sum_k c_k basis[k] == vector, or None outside the span."""
    if not basis:
        return [] if all(x.is_zero for x in vector) else None
    if not row_space_contains(basis, vector, ring):
        return None
    # normal equations (B B^T) c = B v are nonsingular for independent rows
    b = basis
    gram = matmul(b, transpose(b))
    rhs = matvec(b, vector)
    return solve(gram, rhs, ring, 'basis Gram matrix')


def format_matrix(a: Matrix) -> str:
    return '[' + ', '.join('[' + ', '.join(str(x) for x in row) + ']' for row in a) + ']'
