"""Hom-bundles, hom-(Lie-)algebroid structures and their axiom verifiers.

A structure is stored by its values on the standard basis e_1..e_n: the
twist matrix Phi (phi_A(e_i) = sum_j Phi[j][i] e_j), the bracket or product
table and one twisted derivation per basis section for the anchor.
Everything else follows from the extension rules

    phi_A(f X)   = phi*(f) phi_A(X)
    [X, f Y]     = phi*(f) [X, Y] + a(phi_A X)(f) phi_A(Y)
    [f X, Y]     = phi*(f) [X, Y] - a(phi_A Y)(f) phi_A(X)      (lie kind)
    (f X) . Y    = phi*(f) (X . Y)                               (product kind)

Verifiers never raise on a failed law: they return a VerificationReport
whose entries carry the first failing witness and its exact residual.
"""

import itertools
import logging
from typing import Iterable, List, Optional, Sequence

from homalgebroid.config import DEFAULT_SEED
from homalgebroid.errors import DegenerateError, InvalidStructureError
from homalgebroid.linalg import (Matrix, coordinates_in, determinant, dependent_row, entrywise,
                                 format_matrix, identity, inverse, matmul, rank,
                                 row_space_contains, solve, transpose)
from homalgebroid.report import LawCheck, VerificationReport
from homalgebroid.ring import CoefficientRing, RingElement, RingEndomorphism, TwistedDerivation
from homalgebroid.sampling import Sampler

logger = logging.getLogger(__name__)

LIE = 'lie'
PRODUCT = 'product'


def _coefficient_text(c: RingElement) -> str:
    text = str(c)
    if c.is_constant or not any(op in text.lstrip('-') for op in '+- '):
        return text
    return f"({text})"


class Section:
    """Coordinates of a section in the standard basis."""

    __slots__ = ('coords',)

    def __init__(self, coords: Iterable[RingElement]):
        object.__setattr__(self, 'coords', tuple(coords))

    def __setattr__(self, name, value):
        raise AttributeError("Section is immutable")

    @classmethod
    def zero(cls, ring: CoefficientRing, rank: int) -> 'Section':
        return cls(ring.zero for _ in range(rank))

    @classmethod
    def basis(cls, ring: CoefficientRing, rank: int, index: int) -> 'Section':
        return cls(ring.one if k == index else ring.zero for k in range(rank))

    @property
    def rank(self) -> int:
        return len(self.coords)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, index):
        return self.coords[index]

    def __add__(self, other: 'Section') -> 'Section':
        return Section(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: 'Section') -> 'Section':
        return Section(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> 'Section':
        return Section(-a for a in self.coords)

    def scaled(self, f) -> 'Section':
        """Pointwise multiple f X."""
        return Section(f * a for a in self.coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Section):
            return NotImplemented
        return len(self) == len(other) and all(a == b for a, b in zip(self.coords, other.coords))

    def __hash__(self) -> int:
        return hash(self.coords)

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coords):
            if c.is_zero:
                continue
            label = f"e{k + 1}"
            if c == 1:
                terms.append(label)
            elif c == -1:
                terms.append(f"-{label}")
            else:
                terms.append(f"{_coefficient_text(c)}*{label}")
        if not terms:
            return '0'
        return ' + '.join(terms).replace('+ -', '- ')

    def __repr__(self) -> str:
        return f"Section({self})"


def combine(columns: Matrix, weights: Sequence[RingElement], ring: CoefficientRing) -> Section:
    """sum_j weights[j] * (column j of ``columns``), no twisting."""
    total = [ring.zero for _ in range(len(columns))]
    for j, w in enumerate(weights):
        if not w:
            continue
        for i in range(len(columns)):
            if columns[i][j]:
                total[i] = total[i] + w * columns[i][j]
    return Section(total)


def pairing(matrix: Matrix, x: Section, y: Section) -> RingElement:
    """x^T M y for a bilinear form given by its Gram matrix."""
    total = None
    for i, xi in enumerate(x.coords):
        if not xi:
            continue
        for j, yj in enumerate(y.coords):
            if yj and matrix[i][j]:
                term = xi * matrix[i][j] * yj
                total = term if total is None else total + term
    if total is None:
        return matrix[0][0].ring.zero if matrix else x.coords[0].ring.zero
    return total


class HomBundle:
    """Free module of rank n with a phi*-semilinear invertible twist.

    Args:
        ring: Coefficient ring.
        rank: Number of basis sections.
        endomorphism: phi*, acting on coefficients.
        twist: Phi with phi_A(e_i) = sum_j Phi[j][i] e_j.
        twist_inverse: Psi with phi_A^{-1}(Y) = Psi . (phi*)^{-1}(y); defaults to
            (phi*)^{-1} applied entrywise to Phi^{-1}.

    Raises:
        InvalidStructureError: on shape mismatch or a declared inverse that
            does not invert the twist.
        DegenerateError: when Phi is singular.
    """

    def __init__(self, ring: CoefficientRing, rank: int, endomorphism: RingEndomorphism,
                 twist: Matrix, twist_inverse: Optional[Matrix] = None):
        if rank < 1:
            raise InvalidStructureError(f"Rank must be positive, got {rank}")
        self.ring = ring
        self.rank = rank
        self.endomorphism = endomorphism
        self.twist = self._square(twist, 'Phi')
        if determinant(self.twist, ring).is_zero:
            row = dependent_row(transpose(self.twist), ring)
            raise DegenerateError(f"Phi is singular (column {row} is dependent)", minor=(row,))
        if twist_inverse is None:
            twist_inverse = entrywise(endomorphism.apply_inverse, inverse(self.twist, ring, 'Phi'))
            self.twist_inverse = twist_inverse
        else:
            self.twist_inverse = self._square(twist_inverse, 'Phi_inverse')
            self._validate_inverse()

    def _square(self, matrix: Matrix, what: str) -> Matrix:
        if len(matrix) != self.rank or any(len(row) != self.rank for row in matrix):
            raise InvalidStructureError(f"{what} must be {self.rank}x{self.rank}")
        return [[self.ring(x) for x in row] for row in matrix]

    def _validate_inverse(self) -> None:
        phi = self.endomorphism
        one = identity(self.rank, self.ring)
        forward = matmul(self.twist, entrywise(phi, self.twist_inverse))
        backward = matmul(self.twist_inverse, entrywise(phi.apply_inverse, self.twist))
        for product in (forward, backward):
            for i in range(self.rank):
                for j in range(self.rank):
                    if product[i][j] != one[i][j]:
                        raise InvalidStructureError(
                            f"Phi_inverse does not invert Phi: entry ({i + 1},{j + 1}) of the "
                            f"composition is {product[i][j]}", entry=(i, j))

    def basis(self, index: int) -> Section:
        return Section.basis(self.ring, self.rank, index)

    def basis_sections(self) -> List[Section]:
        return [self.basis(i) for i in range(self.rank)]

    def zero_section(self) -> Section:
        return Section.zero(self.ring, self.rank)

    def apply(self, x: Section) -> Section:
        """phi_A(X) = Phi . phi*(x)."""
        return combine(self.twist, [self.endomorphism(c) for c in x.coords], self.ring)

    def apply_inverse(self, y: Section) -> Section:
        return combine(self.twist_inverse, [self.endomorphism.apply_inverse(c) for c in y.coords],
                       self.ring)

    def power(self, x: Section, exponent: int) -> Section:
        step = self.apply if exponent >= 0 else self.apply_inverse
        for _ in range(abs(exponent)):
            x = step(x)
        return x

    def dual(self) -> 'HomBundle':
        """The dual bundle with twist (phi_A)^dagger: <phi^dagger a, Y> = phi*<a, phi_A^{-1} Y>."""
        return HomBundle(self.ring, self.rank, self.endomorphism,
                         transpose(entrywise(self.endomorphism, self.twist_inverse)))


class HomAlgebroidStructure:
    """Hom-Lie algebroid (kind ``lie``) or hom-algebroid (kind ``product``).

    ``table[i][j]`` is the Section [e_i, e_j] (or e_i . e_j); ``anchors[i]``
    is the twisted derivation a(e_i).
    """

    def __init__(self, bundle: HomBundle, table: Sequence[Sequence], anchors:
                 Optional[Sequence[TwistedDerivation]] = None, kind: str = LIE, name: str = ''):
        if kind not in (LIE, PRODUCT):
            raise InvalidStructureError(f"Unknown structure kind '{kind}'")
        n = bundle.rank
        self.bundle = bundle
        self.kind = kind
        self.name = name
        if len(table) != n or any(len(row) != n for row in table):
            raise InvalidStructureError(f"Bracket table must be {n}x{n}")
        self.table = [[entry if isinstance(entry, Section) else Section(bundle.ring(c) for c in entry)
                       for entry in row] for row in table]
        for i, row in enumerate(self.table):
            for j, entry in enumerate(row):
                if entry.rank != n:
                    raise InvalidStructureError(
                        f"Bracket entry ({i + 1},{j + 1}) has {entry.rank} coordinates", entry=(i, j))
        if kind == LIE:
            for i in range(n):
                for j in range(i, n):
                    if self.table[i][j] != -self.table[j][i]:
                        raise InvalidStructureError(
                            f"Bracket is not skew at ({i + 1},{j + 1})", entry=(i, j))
        if anchors is None:
            anchors = [TwistedDerivation.zero(bundle.endomorphism) for _ in range(n)]
        if len(anchors) != n:
            raise InvalidStructureError(f"Anchor needs {n} entries, got {len(anchors)}")
        for i, derivation in enumerate(anchors):
            if derivation.endomorphism != bundle.endomorphism:
                raise InvalidStructureError(
                    f"Anchor of e{i + 1} is twisted by a different endomorphism", entry=(i,))
        self.anchors = list(anchors)
        self.has_anchor = any(not d.is_zero for d in self.anchors)

    # -- shape ----------------------------------------------------------

    @property
    def ring(self) -> CoefficientRing:
        return self.bundle.ring

    @property
    def rank(self) -> int:
        return self.bundle.rank

    @property
    def endomorphism(self) -> RingEndomorphism:
        return self.bundle.endomorphism

    @property
    def is_lie(self) -> bool:
        return self.kind == LIE

    def basis(self, index: int) -> Section:
        return self.bundle.basis(index)

    def basis_sections(self) -> List[Section]:
        return self.bundle.basis_sections()

    def zero_section(self) -> Section:
        return self.bundle.zero_section()

    def section(self, coords: Iterable) -> Section:
        return Section(self.ring(c) for c in coords)

    # -- operations -----------------------------------------------------

    def phi(self, x: Section) -> Section:
        return self.bundle.apply(x)

    def phi_inverse(self, y: Section) -> Section:
        return self.bundle.apply_inverse(y)

    def anchor(self, x: Section) -> TwistedDerivation:
        """a(X) as a single twisted derivation."""
        return TwistedDerivation.combination(x.coords, self.anchors, self.endomorphism)

    def anchor_apply(self, x: Section, f: RingElement) -> RingElement:
        """a(X)(f) = sum_k x_k a(e_k)(f)."""
        result = self.ring.zero
        if not self.has_anchor:
            return result
        for xk, derivation in zip(x.coords, self.anchors):
            if xk and not derivation.is_zero:
                result = result + xk * derivation(f)
        return result

    def _anchor_column(self, x: Section, functions: Sequence[RingElement]) -> List[RingElement]:
        twisted = self.phi(x)
        return [self.anchor_apply(twisted, g) for g in functions]

    def bracket(self, x: Section, y: Section) -> Section:
        """[X, Y] (or X . Y for a product structure) from the basis table."""
        phi = self.endomorphism
        fx = [phi(f) for f in x.coords]
        gy = [phi(g) for g in y.coords]
        total = [self.ring.zero for _ in range(self.rank)]
        for i, fi in enumerate(fx):
            if not fi:
                continue
            for j, gj in enumerate(gy):
                if not gj:
                    continue
                entry = self.table[i][j]
                if entry.is_zero:
                    continue
                weight = fi * gj
                for k, c in enumerate(entry.coords):
                    if c:
                        total[k] = total[k] + weight * c
        result = Section(total)
        if self.has_anchor:
            result = result + combine(self.bundle.twist, self._anchor_column(x, y.coords), self.ring)
            if self.is_lie:
                result = result - combine(self.bundle.twist, self._anchor_column(y, x.coords), self.ring)
        return result

    def product(self, x: Section, y: Section) -> Section:
        return self.bracket(x, y)

    def describe(self) -> str:
        lines = [f"{self.name or 'structure'}: {self.kind} kind, rank {self.rank} over {self.ring}",
                 f"  phi*: {self.endomorphism.describe()}",
                 f"  Phi: {format_matrix(self.bundle.twist)}"]
        symbol = '[{a},{b}]' if self.is_lie else '{a}.{b}'
        for i in range(self.rank):
            start = i + 1 if self.is_lie else 0
            for j in range(start, self.rank):
                if not self.table[i][j].is_zero:
                    lhs = symbol.format(a=f"e{i + 1}", b=f"e{j + 1}")
                    lines.append(f"  {lhs} = {self.table[i][j]}")
        for i, derivation in enumerate(self.anchors):
            if not derivation.is_zero:
                lines.append(f"  a(e{i + 1}) = {derivation.describe()}")
        return '\n'.join(lines)


def bracket(S: HomAlgebroidStructure, X: Section, Y: Section) -> Section:
    return S.bracket(X, Y)


# -- sampling helpers ------------------------------------------------------

def stream(sampler: Optional[Sampler], name: str) -> Sampler:
    """Per-check random stream; a default seed when no sampler is given."""
    base = sampler or Sampler(DEFAULT_SEED)
    return base.for_check(name)


def random_sections(S: HomAlgebroidStructure, sampler: Sampler,
                    count: Optional[int] = None) -> List[Section]:
    return [Section(v) for v in sampler.vectors(S.ring, S.rank, count)]


def sample_functions(ring: CoefficientRing, sampler: Sampler,
                   count: Optional[int] = None) -> List[RingElement]:
    """The generators followed by random functions (constants over QQ)."""
    count = sampler.batch_size if count is None else count
    functions = [] if ring.is_scalar else ring.gens()
    return functions + [sampler.function(ring) for _ in range(count)]


def _pairs(n: int):
    return itertools.product(range(n), repeat=2)


def _triples(n: int):
    return itertools.product(range(n), repeat=3)


# -- hom-Lie algebra and hom-Lie algebroid ---------------------------------

def _jacobi(S: HomAlgebroidStructure, x: Section, y: Section, z: Section) -> Section:
    return (S.bracket(S.phi(x), S.bracket(y, z)) + S.bracket(S.phi(y), S.bracket(z, x)) +
            S.bracket(S.phi(z), S.bracket(x, y)))


def check_hom_lie_algebra(S: HomAlgebroidStructure, sampler: Optional[Sampler] = None,
                          prefix: str = 'homliealgebra') -> VerificationReport:
    """Skew-symmetry, hom-Jacobi and multiplicativity on basis tuples and random sections."""
    sampler = stream(sampler, prefix)
    skew = LawCheck(f'{prefix}.skew_symmetry')
    jacobi = LawCheck(f'{prefix}.hom_jacobi')
    multiplicative = LawCheck(f'{prefix}.multiplicativity')
    basis = S.basis_sections()
    for i, j in _pairs(S.rank):
        x, y = basis[i], basis[j]
        skew.record((x, y), S.bracket(x, y) + S.bracket(y, x))
        multiplicative.record((x, y), S.phi(S.bracket(x, y)) - S.bracket(S.phi(x), S.phi(y)))
    for i, j, k in _triples(S.rank):
        x, y, z = basis[i], basis[j], basis[k]
        jacobi.record((x, y, z), _jacobi(S, x, y, z))
    samples = random_sections(S, sampler, 3 * sampler.batch_size)
    for t in range(sampler.batch_size):
        x, y, z = samples[3 * t:3 * t + 3]
        skew.record((x, y), S.bracket(x, y) + S.bracket(y, x))
        multiplicative.record((x, y), S.phi(S.bracket(x, y)) - S.bracket(S.phi(x), S.phi(y)))
        jacobi.record((x, y, z), _jacobi(S, x, y, z))
    report = VerificationReport(S.name, sampler.seed)
    report.add_all([skew, jacobi, multiplicative])
    return report


def check_hom_lie_algebroid(S: HomAlgebroidStructure, sampler: Optional[Sampler] = None,
                            prefix: str = 'homliealgebroid') -> VerificationReport:
    """Hom-Lie algebra laws plus the Leibniz rule and the anchor laws.

    The anchor must satisfy phi* a(X) = a(phi_A X) phi* and
    a([X, Y]) phi* = a(phi_A X) a(Y) - a(phi_A Y) a(X).
    """
    algebra_prefix = 'homliealgebra' if prefix == 'homliealgebroid' else f'{prefix}.algebra'
    report = check_hom_lie_algebra(S, sampler, algebra_prefix)
    sampler = stream(sampler, prefix)
    phi = S.endomorphism
    leibniz = LawCheck(f'{prefix}.leibniz')
    compatibility = LawCheck(f'{prefix}.anchor_compatibility')
    morphism = LawCheck(f'{prefix}.anchor_bracket')

    functions = sample_functions(S.ring, sampler)
    basis = S.basis_sections()
    samples = random_sections(S, sampler, 2 * sampler.batch_size)
    pairs = [(x, y) for x in basis for y in basis]
    pairs += [(samples[2 * t], samples[2 * t + 1]) for t in range(sampler.batch_size)]

    for index, (x, y) in enumerate(pairs):
        f = functions[index % len(functions)]
        expected = S.bracket(x, y).scaled(phi(f)) + S.phi(y).scaled(S.anchor_apply(S.phi(x), f))
        leibniz.record((x, y, f), S.bracket(x, y.scaled(f)) - expected)
        xy = S.bracket(x, y)
        h = f
        lhs = S.anchor_apply(xy, phi(h))
        rhs = (S.anchor_apply(S.phi(x), S.anchor_apply(y, h)) -
               S.anchor_apply(S.phi(y), S.anchor_apply(x, h)))
        morphism.record((x, y, h), lhs - rhs)
    for x in basis + samples[:sampler.batch_size]:
        for h in functions:
            compatibility.record((x, h), phi(S.anchor_apply(x, h)) - S.anchor_apply(S.phi(x), phi(h)))

    report.add_all([leibniz, compatibility, morphism])
    return report


# -- hom-algebroids (product kind) ----------------------------------------

def check_hom_algebroid(S: HomAlgebroidStructure, sampler: Optional[Sampler] = None,
                        prefix: str = 'homalgebroid') -> VerificationReport:
    """The three defining rules of a hom-algebroid on basis pairs with random f."""
    sampler = stream(sampler, prefix)
    phi = S.endomorphism
    left = LawCheck(f'{prefix}.left_leibniz')
    right = LawCheck(f'{prefix}.right_linearity')
    compatibility = LawCheck(f'{prefix}.anchor_compatibility')
    functions = sample_functions(S.ring, sampler)
    basis = S.basis_sections()
    samples = random_sections(S, sampler)
    for index, (x, y) in enumerate((x, y) for x in basis + samples[:2] for y in basis):
        f = functions[index % len(functions)]
        xy = S.product(x, y)
        left.record((x, y, f), S.product(x, y.scaled(f)) - xy.scaled(phi(f)) -
                    S.phi(y).scaled(S.anchor_apply(S.phi(x), f)))
        right.record((x, y, f), S.product(x.scaled(f), y) - xy.scaled(phi(f)))
    for x in basis + samples:
        for h in functions[:S.ring.ngens + 3]:
            compatibility.record((x, h), phi(S.anchor_apply(x, h)) - S.anchor_apply(S.phi(x), phi(h)))
    report = VerificationReport(S.name, sampler.seed)
    report.add_all([left, right, compatibility])
    return report


def associator(S: HomAlgebroidStructure, x: Section, y: Section, z: Section) -> Section:
    """ass(X, Y, Z) = (X.Y).phi_A(Z) - phi_A(X).(Y.Z)."""
    return S.product(S.product(x, y), S.phi(z)) - S.product(S.phi(x), S.product(y, z))


def check_hom_left_symmetric_algebra(S: HomAlgebroidStructure,
                                     prefix: str = 'homleftsymmetric') -> VerificationReport:
    """ass(X,Y,Z) = ass(Y,X,Z) on all basis triples."""
    law = LawCheck(f'{prefix}.associator')
    basis = S.basis_sections()
    for i, j, k in _triples(S.rank):
        x, y, z = basis[i], basis[j], basis[k]
        law.record((x, y, z), associator(S, x, y, z) - associator(S, y, x, z))
    report = VerificationReport(S.name)
    report.add(law)
    return report


def check_left_symmetric(S: HomAlgebroidStructure, omega: Matrix,
                         sampler: Optional[Sampler] = None,
                         prefix: str = 'leftsymmetric') -> VerificationReport:
    """Omega-weighted left-symmetry of a product structure on basis 4-tuples.

    Omega(ass(X,Y,Z) - ass(Y,X,Z), phi^2 Z')
        = a(phi^2 Z) a(phi Z') Omega(X,Y) - phi* a(Z.Z') Omega(X,Y)
    """
    report = check_hom_algebroid(S, sampler, f'{prefix}.homalgebroid')
    phi = S.endomorphism
    law = LawCheck(f'{prefix}.product_identity')
    basis = S.basis_sections()
    omega = [[S.ring(x) for x in row] for row in omega]
    for i, j, k, l in itertools.product(range(S.rank), repeat=4):
        x, y, z, w = basis[i], basis[j], basis[k], basis[l]
        value = omega[i][j]
        lhs = pairing(omega, associator(S, x, y, z) - associator(S, y, x, z), S.bundle.power(w, 2))
        rhs = (S.anchor_apply(S.bundle.power(z, 2), S.anchor_apply(S.phi(w), value)) -
               phi(S.anchor_apply(S.product(z, w), value)))
        law.record((x, y, z, w), lhs - rhs)
    report.add(law)
    return report


# -- sub-bundles ----------------------------------------------------------

def completion(rows: Matrix, ring: CoefficientRing) -> List[int]:
    """Standard basis indices that complete ``rows`` to a basis."""
    extra = []
    current = list(rows)
    n = len(rows[0])
    for k in range(n):
        unit = [ring.one if m == k else ring.zero for m in range(n)]
        if not row_space_contains(current, unit, ring):
            current.append(unit)
            extra.append(k)
    return extra


def span_residual(rows: Matrix, extra: Sequence[int], v: Section, ring: CoefficientRing):
    """Components of ``v`` along the completing basis vectors (zero iff v is in the span)."""
    n = len(v)
    units = [[ring.one if m == k else ring.zero for m in range(n)] for k in extra]
    full = list(rows) + units
    coords = solve(transpose(full), list(v.coords), ring, 'completed basis')
    return Section(coords[len(rows):]) if extra else Section([])


def span_coordinates(rows: Matrix, v: Section, ring: CoefficientRing) -> Optional[List[RingElement]]:
    """Coefficients of ``v`` in the basis ``rows``, or None outside the span."""
    return coordinates_in(rows, list(v.coords), ring)


def check_subalgebroid(S: HomAlgebroidStructure, B: Sequence, sampler: Optional[Sampler] = None,
                       prefix: str = 'subalgebroid') -> VerificationReport:
    """phi_A(B) in span B and [B, B] in span B.

    Residuals are the components outside span B with respect to a completion
    of B by standard basis vectors.
    """
    sampler = stream(sampler, prefix)
    ring = S.ring
    rows = [[ring(c) for c in (b.coords if isinstance(b, Section) else b)] for b in B]
    report = VerificationReport(S.name, sampler.seed)
    independent = LawCheck(f'{prefix}.independent')
    stable = LawCheck(f'{prefix}.twist_stable')
    closed = LawCheck(f'{prefix}.bracket_closed')
    if any(len(row) != S.rank for row in rows):
        raise InvalidStructureError(f"Subalgebroid vectors must have {S.rank} coordinates")
    if not rows:
        raise InvalidStructureError("Subalgebroid basis is empty")
    independent.cases = 1
    if rank(rows, ring) != len(rows):
        row = dependent_row(rows, ring)
        independent.fail((f"b{row + 1}",), "basis vectors are linearly dependent")
        report.add_all([independent, stable, closed])
        return report
    extra = completion(rows, ring)
    along = ', '.join(f"e{k + 1}" for k in extra) or 'none'
    sections = [Section(row) for row in rows]
    for a, b in enumerate(sections):
        stable.record((f"b{a + 1}",), span_residual(rows, extra, S.phi(b), ring))
    for a, c in _pairs(len(sections)):
        closed.record((f"b{a + 1}", f"b{c + 1}"),
                      span_residual(rows, extra, S.bracket(sections[a], sections[c]), ring))
    for _ in range(min(sampler.batch_size, 10)):
        weights_x = sampler.vector(ring, len(rows))
        weights_y = sampler.vector(ring, len(rows))
        x = _from_weights(sections, weights_x, ring, S.rank)
        y = _from_weights(sections, weights_y, ring, S.rank)
        closed.record((x, y), span_residual(rows, extra, S.bracket(x, y), ring))
    if extra:
        stable.detail = closed.detail = f"residual components along {along}"
    report.add_all([independent, stable, closed])
    return report


def _from_weights(sections: Sequence[Section], weights: Sequence[RingElement],
                  ring: CoefficientRing, n: int) -> Section:
    total = Section.zero(ring, n)
    for w, s in zip(weights, sections):
        total = total + s.scaled(w)
    return total


def restrict(S: HomAlgebroidStructure, B: Sequence, name: str = '') -> HomAlgebroidStructure:
    """The structure induced on the free submodule spanned by ``B``.

    Raises:
        InvalidStructureError: when span B is not phi_A-stable or not closed
            under the bracket.
    """
    ring = S.ring
    rows = [[ring(c) for c in (b.coords if isinstance(b, Section) else b)] for b in B]
    sections = [Section(row) for row in rows]
    m = len(rows)

    def coordinates(v: Section, what: str) -> List[RingElement]:
        coords = span_coordinates(rows, v, ring)
        if coords is None:
            raise InvalidStructureError(f"Submodule is not closed: {what} = {v} leaves the span")
        return coords

    twist_columns = [coordinates(S.phi(b), f"phi(b{a + 1})") for a, b in enumerate(sections)]
    twist = transpose(twist_columns)
    bundle = HomBundle(ring, m, S.endomorphism, twist)
    table = [[Section(coordinates(S.bracket(sections[a], sections[c]), f"[b{a + 1},b{c + 1}]"))
              for c in range(m)] for a in range(m)]
    anchors = [S.anchor(b) for b in sections]
    return HomAlgebroidStructure(bundle, table, anchors, S.kind, name or f"{S.name}|sub")


# -- metrics and symplectic forms -----------------------------------------

def _matrix(S: HomAlgebroidStructure, matrix: Matrix, what: str) -> Matrix:
    if len(matrix) != S.rank or any(len(row) != S.rank for row in matrix):
        raise InvalidStructureError(f"{what} must be {S.rank}x{S.rank}")
    return [[S.ring(x) for x in row] for row in matrix]


def _nondegenerate(law: LawCheck, matrix: Matrix, ring: CoefficientRing, what: str) -> None:
    law.cases += 1
    if determinant(matrix, ring).is_zero:
        row = dependent_row(matrix, ring)
        law.witness = [f"row {row + 1}"]
        law.detail = f"{what} is degenerate"


def _invariance(S: HomAlgebroidStructure, matrix: Matrix, law: LawCheck,
                sampler: Sampler) -> None:
    """<phi X, phi Y> = phi* <X, Y> on basis pairs and random sections."""
    phi = S.endomorphism
    twist = S.bundle.twist
    moved = matmul(matmul(transpose(twist), matrix), twist)
    basis = S.basis_sections()
    for i, j in _pairs(S.rank):
        law.record((basis[i], basis[j]), moved[i][j] - phi(matrix[i][j]))
    samples = random_sections(S, sampler, 2 * sampler.batch_size)
    for t in range(sampler.batch_size):
        x, y = samples[2 * t], samples[2 * t + 1]
        law.record((x, y), pairing(matrix, S.phi(x), S.phi(y)) - phi(pairing(matrix, x, y)))


def check_metric(S: HomAlgebroidStructure, G: Matrix, sampler: Optional[Sampler] = None,
                 prefix: str = 'metric') -> VerificationReport:
    """Symmetry, nondegeneracy and phi-invariance of a metric."""
    sampler = stream(sampler, prefix)
    G = _matrix(S, G, 'metric')
    symmetric = LawCheck(f'{prefix}.symmetric')
    nondegenerate = LawCheck(f'{prefix}.nondegenerate')
    invariant = LawCheck(f'{prefix}.invariant')
    basis = S.basis_sections()
    for i, j in _pairs(S.rank):
        symmetric.record((basis[i], basis[j]), G[i][j] - G[j][i])
    _nondegenerate(nondegenerate, G, S.ring, 'metric')
    _invariance(S, G, invariant, sampler)
    report = VerificationReport(S.name, sampler.seed)
    report.add_all([symmetric, nondegenerate, invariant])
    return report


def cocycle(S: HomAlgebroidStructure, omega: Matrix, x: Section, y: Section,
            z: Section) -> RingElement:
    """The six-term 2-cocycle expression; zero for a closed form."""
    a = S.anchor_apply
    px, py, pz = S.phi(x), S.phi(y), S.phi(z)
    return (a(px, pairing(omega, y, z)) - a(py, pairing(omega, x, z)) + a(pz, pairing(omega, x, y))
            - pairing(omega, S.bracket(x, y), pz) + pairing(omega, S.bracket(x, z), py)
            - pairing(omega, S.bracket(y, z), px))


def check_symplectic(S: HomAlgebroidStructure, omega: Matrix, sampler: Optional[Sampler] = None,
                     prefix: str = 'symplectic') -> VerificationReport:
    """Antisymmetry, nondegeneracy, phi-invariance and the cocycle identity."""
    sampler = stream(sampler, prefix)
    omega = _matrix(S, omega, 'symplectic form')
    antisymmetric = LawCheck(f'{prefix}.antisymmetric')
    nondegenerate = LawCheck(f'{prefix}.nondegenerate')
    invariant = LawCheck(f'{prefix}.invariant')
    closed = LawCheck(f'{prefix}.cocycle')
    basis = S.basis_sections()
    for i, j in _pairs(S.rank):
        antisymmetric.record((basis[i], basis[j]), omega[i][j] + omega[j][i])
    _nondegenerate(nondegenerate, omega, S.ring, 'symplectic form')
    _invariance(S, omega, invariant, sampler)
    for i, j, k in _triples(S.rank):
        x, y, z = basis[i], basis[j], basis[k]
        closed.record((x, y, z), cocycle(S, omega, x, y, z))
    samples = random_sections(S, sampler, 3 * sampler.batch_size)
    for t in range(sampler.batch_size):
        x, y, z = samples[3 * t:3 * t + 3]
        closed.record((x, y, z), cocycle(S, omega, x, y, z))
    report = VerificationReport(S.name, sampler.seed)
    report.add_all([antisymmetric, nondegenerate, invariant, closed])
    return report


def canonical_symplectic_form(rank: int, ring: CoefficientRing) -> Matrix:
    """[[0, I], [-I, 0]] on A + A*: omega(X + a, Y + b) = <b, X> - <a, Y>."""
    n = 2 * rank
    matrix = [[ring.zero for _ in range(n)] for _ in range(n)]
    for k in range(rank):
        matrix[k][rank + k] = ring.one
        matrix[rank + k][k] = -ring.one
    return matrix
