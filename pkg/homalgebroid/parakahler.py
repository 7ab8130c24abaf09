"""Almost product, para-Hermitian and para-Kähler structures on hom-Lie algebroids.

K is an R-linear endomorphism of sections given by its matrix; the operator
that has to square to the identity is P = phi_A o K, so P(x) = Phi phi*(K x).
"""

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from homalgebroid.algebroid import (HomAlgebroidStructure, HomBundle, Section,
                                    canonical_symplectic_form, check_hom_left_symmetric_algebra,
                                    check_hom_lie_algebroid, check_metric, check_subalgebroid,
                                    check_symplectic, combine, completion, pairing,
                                    random_sections, restrict, span_residual, stream)
from homalgebroid.connection import (Connection, Representation, check_representation,
                                     dual_representation, left_symmetric_connection, levi_civita,
                                     restrict_connection, verify_levi_civita)
from homalgebroid.errors import (AlgebroidError, AttachmentError, DegenerateError,
                                 InvalidStructureError, PreconditionError)
from homalgebroid.linalg import (Matrix, determinant, entrywise, identity, matmul, nullspace, rank,
                                 add, subtract, transpose)
from homalgebroid.report import LawCheck, VerificationReport
from homalgebroid.ring import TwistedDerivation
from homalgebroid.sampling import Sampler

logger = logging.getLogger(__name__)


class ProductStructure:
    """An endomorphism K of sections, acting by its matrix without twisting."""

    def __init__(self, structure: HomAlgebroidStructure, matrix: Matrix):
        n = structure.rank
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise InvalidStructureError(f"Product structure K must be {n}x{n}")
        self.structure = structure
        self.matrix = [[structure.ring(x) for x in row] for row in matrix]

    def apply(self, x: Section) -> Section:
        return combine(self.matrix, list(x.coords), self.structure.ring)

    def twisted(self, x: Section) -> Section:
        """(phi_A o K)(x)."""
        return self.structure.phi(self.apply(x))

    __call__ = twisted

    def twisted_matrix(self) -> Matrix:
        """Columns are (phi_A o K)(e_j): Phi . phi*(K)."""
        S = self.structure
        return matmul(S.bundle.twist, entrywise(S.endomorphism, self.matrix))


@dataclass
class AdaptedSplit:
    """Bases of A^1 = ker(phi_A o K - Id) and A^-1 = ker(phi_A o K + Id)."""
    plus: List[Section]
    minus: List[Section]

    @property
    def dimensions(self) -> Tuple[int, int]:
        return len(self.plus), len(self.minus)

    @property
    def is_paracomplex(self) -> bool:
        return len(self.plus) == len(self.minus)

    def basis_change(self) -> Matrix:
        """Columns are the adapted basis: A^1 first, then A^-1."""
        return transpose([list(b.coords) for b in self.plus + self.minus])

    @staticmethod
    def rows(sections: Sequence[Section]) -> Matrix:
        return [list(b.coords) for b in sections]


@dataclass
class ParaKahlerData:
    structure: HomAlgebroidStructure
    metric: Matrix
    product: ProductStructure
    connection: Connection
    split: AdaptedSplit
    form: Optional[Matrix] = None


def _square_residual(product: ProductStructure) -> Matrix:
    S = product.structure
    P = product.twisted_matrix()
    return subtract(matmul(P, entrywise(S.endomorphism, P)), identity(S.rank, S.ring))


def check_almost_product(S: HomAlgebroidStructure, K: Matrix,
                         prefix: str = 'almostproduct') -> VerificationReport:
    """(phi_A o K)^2 = Id and phi_A o K = K o phi_A on basis sections."""
    product = K if isinstance(K, ProductStructure) else ProductStructure(S, K)
    square = LawCheck(f'{prefix}.square')
    commutes = LawCheck(f'{prefix}.commutes')
    basis = S.basis_sections()
    squared = _square_residual(product)
    swapped = subtract(product.twisted_matrix(), matmul(product.matrix, S.bundle.twist))
    for j, e in enumerate(basis):
        square.record((e,), Section(row[j] for row in squared))
        commutes.record((e,), Section(row[j] for row in swapped))
    report = VerificationReport(S.name)
    report.add_all([square, commutes])
    return report


def projectors(S: HomAlgebroidStructure, product: ProductStructure) -> Tuple[Matrix, Matrix]:
    """P+ = (Id + phi_A K)/2 and P- = (Id - phi_A K)/2 as matrices on basis coordinates."""
    half = S.ring(1) / 2
    one = identity(S.rank, S.ring)
    P = product.twisted_matrix()
    plus = [[x * half for x in row] for row in add(one, P)]
    minus = [[x * half for x in row] for row in subtract(one, P)]
    return plus, minus


def _verify_split(S: HomAlgebroidStructure, product: ProductStructure,
                  split: AdaptedSplit) -> None:
    for sign, sections, label in ((1, split.plus, 'A^1'), (-1, split.minus, 'A^-1')):
        for a, b in enumerate(sections):
            if b.rank != S.rank:
                raise InvalidStructureError(f"{label} vector {a + 1} needs {S.rank} coordinates")
            image = product.twisted(b)
            expected = b if sign > 0 else -b
            if image != expected:
                raise InvalidStructureError(
                    f"Declared {label} vector {a + 1} is not an eigenvector: phi_A(K b) = {image}",
                    entry=(a,))
    rows = AdaptedSplit.rows(split.plus + split.minus)
    if len(rows) != S.rank or rank(rows, S.ring) != S.rank:
        raise InvalidStructureError(
            f"Declared split spans rank {rank(rows, S.ring) if rows else 0}, expected {S.rank}")


def compute_split(S: HomAlgebroidStructure, K, declared: Optional[AdaptedSplit] = None
                  ) -> AdaptedSplit:
    """Eigen-summands of phi_A o K.

    Over the scalar ring they are computed as exact kernels; over polynomial
    rings the fixed points of a semilinear map need not form a free
    submodule, so a declared split is required and only verified.

    Raises:
        AttachmentError: polynomial ring without a declared split.
        InvalidStructureError: the declared or computed split is not a basis of eigenvectors.
    """
    product = K if isinstance(K, ProductStructure) else ProductStructure(S, K)
    if declared is None:
        if not S.ring.is_scalar:
            raise AttachmentError("Eigen-split over a polynomial ring must be declared in the file")
        P = product.twisted_matrix()
        one = identity(S.rank, S.ring)
        plus = [Section(v) for v in nullspace(subtract(P, one), S.ring)]
        minus = [Section(v) for v in nullspace(add(P, one), S.ring)]
        declared = AdaptedSplit(plus, minus)
    _verify_split(S, product, declared)
    logger.debug("Split of %s has dimensions %s", S.name, declared.dimensions)
    return declared


def check_para_complex(S: HomAlgebroidStructure, K, split: Optional[AdaptedSplit] = None,
                       prefix: str = 'paracomplex') -> VerificationReport:
    """Eigen-split exists, projectors are complementary idempotents, dimensions agree."""
    product = K if isinstance(K, ProductStructure) else ProductStructure(S, K)
    report = VerificationReport(S.name)
    eigensplit = LawCheck(f'{prefix}.split')
    idempotent = LawCheck(f'{prefix}.projectors')
    balanced = LawCheck(f'{prefix}.equal_dimensions')
    try:
        split = compute_split(S, product, split)
    except InvalidStructureError as e:
        eigensplit.fail(('phi_A K',), str(e))
        report.add_all([eigensplit, idempotent, balanced])
        return report
    eigensplit.cases = 1
    plus, minus = projectors(S, product)
    one = identity(S.rank, S.ring)
    for name, residual in (('P+^2 - P+', subtract(matmul(plus, plus), plus)),
                           ('P-^2 - P-', subtract(matmul(minus, minus), minus)),
                           ('P+ P-', matmul(plus, minus)),
                           ('P+ + P- - Id', subtract(add(plus, minus), one))):
        idempotent.record((name,), residual)
    if split.is_paracomplex:
        balanced.cases = 1
    else:
        n_plus, n_minus = split.dimensions
        balanced.fail((f"dim A^1 = {n_plus}", f"dim A^-1 = {n_minus}"), "eigen-summands differ in rank")
    report.add_all([eigensplit, idempotent, balanced])
    return report


def nijenhuis(S: HomAlgebroidStructure, K, x: Section, y: Section) -> Section:
    """N(X,Y) = [PX,PY] - P[PX,Y] - P[X,PY] + [X,Y] with P = phi_A o K."""
    P = K if isinstance(K, ProductStructure) else ProductStructure(S, K)
    px, py = P(x), P(y)
    return S.bracket(px, py) - P(S.bracket(px, y)) - P(S.bracket(x, py)) + S.bracket(x, y)


def check_nijenhuis(S: HomAlgebroidStructure, product: ProductStructure,
                    sampler: Optional[Sampler] = None,
                    name: str = 'parahermitian.integrability') -> VerificationReport:
    """N on basis pairs, plus the informational tensoriality check on random multiples."""
    sampler = stream(sampler, 'nijenhuis')
    integrable = LawCheck(name)
    tensorial = LawCheck('nijenhuis.tensoriality', informational=True)
    basis = S.basis_sections()
    for x, y in itertools.product(basis, repeat=2):
        integrable.record((x, y), nijenhuis(S, product, x, y))
    twice = S.endomorphism.power(2)
    samples = random_sections(S, sampler, 2 * sampler.batch_size)
    for t in range(sampler.batch_size):
        x, y = samples[2 * t], samples[2 * t + 1]
        f = sampler.function(S.ring)
        residual = nijenhuis(S, product, x.scaled(f), y) - nijenhuis(S, product, x, y).scaled(twice(f))
        tensorial.record((x, y, f), residual)
    report = VerificationReport(S.name, sampler.seed)
    report.add_all([integrable, tensorial])
    return report


def check_para_hermitian(S: HomAlgebroidStructure, G: Matrix, K, split: Optional[AdaptedSplit] = None,
                         sampler: Optional[Sampler] = None,
                         prefix: str = 'parahermitian') -> VerificationReport:
    """Almost product, metric, compatibility <PX,PY> = -<X,Y> and N = 0, layered in that order."""
    product = K if isinstance(K, ProductStructure) else ProductStructure(S, K)
    G = [[S.ring(x) for x in row] for row in G]
    report = check_almost_product(S, product)
    report.seed = sampler.seed if sampler else None
    report.extend(check_metric(S, G, sampler))
    if S.ring.is_scalar or split is not None:
        report.extend(check_para_complex(S, product, split))
    compatible = LawCheck(f'{prefix}.compatibility')
    basis = S.basis_sections()
    P = product.twisted_matrix()
    moved = add(matmul(matmul(transpose(P), G), P), G)
    for i, j in itertools.product(range(S.rank), repeat=2):
        compatible.record((basis[i], basis[j]), moved[i][j])
    report.add(compatible)
    report.extend(check_nijenhuis(S, product, sampler, f'{prefix}.integrability'))
    return report


def _fundamental_matrix(S: HomAlgebroidStructure, G: Matrix, product: ProductStructure) -> Matrix:
    return matmul(transpose(product.twisted_matrix()), [[S.ring(x) for x in row] for row in G])


def fundamental_form(D: ParaKahlerData) -> Matrix:
    """Omega(X, Y) = <(phi_A o K) X, Y>.

    Raises:
        DegenerateError: Omega is degenerate, which a nondegenerate G satisfying
            the compatibility condition rules out.
    """
    S = D.structure
    omega = _fundamental_matrix(S, D.metric, D.product)
    if determinant(omega, S.ring).is_zero:
        raise DegenerateError("Fundamental form is degenerate; metric and K are inconsistent")
    return omega


def check_para_kahler(S: HomAlgebroidStructure, G: Matrix, K, split: Optional[AdaptedSplit] = None,
                      sampler: Optional[Sampler] = None, prefix: str = 'parakahler'
                      ) -> Tuple[Optional[ParaKahlerData], VerificationReport]:
    """The para-Hermitian layer, Levi-Civita and parallelism of phi_A o K.

    Returns the assembled ParaKahlerData whenever the Levi-Civita connection
    and the split exist, even if some law fails, so that the claim suite can
    localize the failure; None otherwise.
    """
    product = K if isinstance(K, ProductStructure) else ProductStructure(S, K)
    G = [[S.ring(x) for x in row] for row in G]
    report = check_para_hermitian(S, G, product, split, sampler)
    parallel = LawCheck(f'{prefix}.parallel')
    consequences = LawCheck(f'{prefix}.parallel_consequences')
    try:
        nabla = levi_civita(S, G)
    except DegenerateError as e:
        parallel.fail(('G',), str(e))
        report.add(parallel)
        return None, report
    report.extend(verify_levi_civita(S, G, nabla, sampler))
    basis = S.basis_sections()
    P = product.twisted
    for x, y in itertools.product(basis, repeat=2):
        parallel.record((x, y), nabla(x, P(y)) - P(nabla(x, y)))
        px = P(x)
        consequences.record((px, y), nabla(px, P(y)) - P(nabla(px, y)))
        consequences.record((x, y), nabla(x, y) - P(nabla(x, P(y))))
    report.add_all([parallel, consequences])
    try:
        split = compute_split(S, product, split)
    except AlgebroidError as e:
        logger.warning("No adapted split for %s: %s", S.name, e)
        return None, report
    data = ParaKahlerData(S, G, product, nabla, split)
    try:
        data.form = fundamental_form(data)
    except DegenerateError as e:
        logger.warning("%s", e)
        return None, report
    return data, report


# -- the claim suite ------------------------------------------------------

def _outside(S: HomAlgebroidStructure, sections: Sequence[Section]):
    rows = AdaptedSplit.rows(sections)
    extra = completion(rows, S.ring) if rows else list(range(S.rank))
    return rows, extra


def _preserves(law: LawCheck, S: HomAlgebroidStructure, sections: Sequence[Section], image) -> None:
    if not sections:
        return
    rows, extra = _outside(S, sections)
    for b in sections:
        for x, value in image(b):
            law.record(x + (b,), span_residual(rows, extra, value, S.ring))


def _lagrangian(law: LawCheck, S: HomAlgebroidStructure, omega: Matrix,
                sections: Sequence[Section], label: str) -> None:
    """Omega vanishes on the summand and the summand is its own Omega-orthogonal."""
    for b, c in itertools.product(sections, repeat=2):
        law.record((b, c), pairing(omega, b, c))
    law.cases += 1
    rows = AdaptedSplit.rows(sections)
    if 2 * len(rows) != S.rank:
        law.fail((label,), f"rank {len(rows)} is not half of {S.rank}")
        return
    orthogonal = nullspace(matmul(rows, omega), S.ring) if rows else identity(S.rank, S.ring)
    if len(orthogonal) != len(rows):
        law.fail((label,), f"Omega-orthogonal has rank {len(orthogonal)}, expected {len(rows)}")


def _duality(law: LawCheck, S: HomAlgebroidStructure, G: Matrix, split: AdaptedSplit) -> None:
    """X_bar -> <X_bar, .> restricted to A^1 is invertible and intertwines the twists."""
    law.cases += 1
    if not split.is_paracomplex:
        law.fail(('A^-1', 'A^1'), "summands differ in rank")
        return
    pairing_matrix = [[pairing(G, xbar, y) for y in split.plus] for xbar in split.minus]
    if pairing_matrix and determinant(pairing_matrix, S.ring).is_zero:
        law.fail(('A^-1', 'A^1'), "pairing A^-1 x A^1 is degenerate")
        return
    phi = S.endomorphism
    for xbar, y in itertools.product(split.minus, split.plus):
        law.record((xbar, y), pairing(G, S.phi(xbar), y) - phi(pairing(G, xbar, S.phi_inverse(y))))


def _summand(S: HomAlgebroidStructure, nabla: Connection, sections: Sequence[Section], label: str):
    restricted = restrict(S, sections, f"{S.name}|{label}")
    return restricted, restrict_connection(nabla, sections, restricted)


def verify_parakahler_suite(D: ParaKahlerData, sampler: Optional[Sampler] = None,
                            prefix: str = 'parakahler') -> VerificationReport:
    """Every consequence of the para-Kähler condition, one named entry per claim.

    nijenhuis, isotropic, lagrangian, subalgebroid.{plus,minus}, parallel_split,
    twist_split, parahermitian, duality, connection_agreement,
    summand_left_symmetric, representation, phase_space and fundamental_form.
    """
    S, G, split = D.structure, D.metric, D.split
    nabla = D.connection
    omega = D.form if D.form is not None else fundamental_form(D)
    report = VerificationReport(S.name, sampler.seed if sampler else None)
    basis = S.basis_sections()
    summands = (('plus', split.plus), ('minus', split.minus))

    torsion_free = LawCheck(f'{prefix}.nijenhuis')
    for x, y in itertools.product(basis, repeat=2):
        torsion_free.record((x, y), nijenhuis(S, D.product, x, y))
    report.add(torsion_free)

    isotropic = LawCheck(f'{prefix}.isotropic')
    lagrangian = LawCheck(f'{prefix}.lagrangian')
    for label, sections in summands:
        for b, c in itertools.product(sections, repeat=2):
            isotropic.record((b, c), pairing(G, b, c))
        _lagrangian(lagrangian, S, omega, sections, label)
    report.add_all([isotropic, lagrangian])
    for label, sections in summands:
        if sections:
            report.extend(check_subalgebroid(S, sections, sampler, f'{prefix}.subalgebroid.{label}'))

    parallel = LawCheck(f'{prefix}.parallel_split')
    twist = LawCheck(f'{prefix}.twist_split')
    for _, sections in summands:
        _preserves(parallel, S, sections, lambda b: [((x,), nabla(x, b)) for x in basis])
        _preserves(twist, S, sections, lambda b: [((), S.phi(b))])
    report.add_all([parallel, twist])

    hermitian = LawCheck(f'{prefix}.parahermitian')
    layer = check_para_hermitian(S, G, D.product, split, sampler)
    hermitian.cases = len(layer.entries)
    if not layer.passed:
        first = layer.failures()[0]
        hermitian.fail((first.name,), f"{len(layer.failures())} para-Hermitian entries fail")
    report.add(hermitian)

    duality = LawCheck(f'{prefix}.duality')
    _duality(duality, S, G, split)
    report.add(duality)

    agreement = LawCheck(f'{prefix}.connection_agreement')
    symmetric = LawCheck(f'{prefix}.summand_left_symmetric')
    try:
        nabla_a = left_symmetric_connection(S, omega)
    except DegenerateError as e:
        agreement.fail(('Omega',), str(e))
        nabla_a = None
    if nabla_a is not None:
        for _, sections in summands:
            for x, y in itertools.product(sections, repeat=2):
                agreement.record((x, y), nabla(x, y) - nabla_a(x, y))
        for label, sections in summands:
            if not sections:
                continue
            try:
                restricted, local = _summand(S, nabla_a, sections, label)
            except InvalidStructureError as e:
                symmetric.fail((label,), str(e))
                continue
            local_report = check_hom_left_symmetric_algebra(local.as_product_structure())
            for entry in local_report.failures():
                symmetric.fail((label,) + tuple(entry.witness or ()), entry.residual or entry.detail)
            symmetric.cases += sum(e.cases for e in local_report.entries)
    report.add_all([agreement, symmetric])

    for label, sections in summands:
        if not sections:
            continue
        name = f'{prefix}.representation.{label}'
        try:
            restricted, local = _summand(S, nabla, sections, label)
        except InvalidStructureError as e:
            law = LawCheck(name)
            law.fail((label,), str(e))
            report.add(law)
            continue
        report.extend(check_representation(restricted, local, sampler, name))
        if label == 'plus':
            report.extend(_phase_space_claim(restricted, local, sampler, f'{prefix}.phase_space'))

    report.extend(check_symplectic(S, omega, sampler, f'{prefix}.fundamental_form'))
    return report


def _phase_space_claim(A1: HomAlgebroidStructure, nabla: Connection, sampler: Optional[Sampler],
                       prefix: str) -> VerificationReport:
    try:
        phase = build_phase_space(A1, nabla, sampler=sampler)
    except PreconditionError as e:
        law = LawCheck(prefix)
        law.fail((e.law or 'representation',), str(e))
        report = VerificationReport(A1.name)
        report.add(law)
        return report
    report = check_hom_lie_algebroid(phase, sampler, prefix)
    report.extend(check_symplectic(phase, canonical_symplectic_form(A1.rank, A1.ring), sampler,
                                   f'{prefix}.symplectic'))
    return report


# -- phase space ------------------------------------------------------------

def build_phase_space(A1: HomAlgebroidStructure, nabla: Representation, name: str = '',
                      sampler: Optional[Sampler] = None) -> HomAlgebroidStructure:
    """The hom-Lie algebroid A1 + A1* with [X + a, Y + b] = [X,Y] + nabla~_X b - nabla~_Y a.

    nabla~ is the dual representation; the twist is phi_A1 + phi_A1^dagger and
    the anchor ignores the dual summand.

    Raises:
        PreconditionError: nabla is not a representation of A1 on itself;
            ``law`` names the first failing law.
    """
    if nabla.target.rank != A1.rank:
        raise PreconditionError("Phase space needs a representation of A1 on itself", 'representation')
    precondition = check_representation(A1, nabla, sampler)
    if not precondition.passed:
        failure = precondition.failures()[0]
        raise PreconditionError(
            f"Connection is not a representation: {failure.name} fails at "
            f"({', '.join(failure.witness or ())}) with residual {failure.residual}", failure.name)
    ring = A1.ring
    m = A1.rank
    n = 2 * m
    dual = dual_representation(A1, nabla)
    twist = [[ring.zero for _ in range(n)] for _ in range(n)]
    for i in range(m):
        for j in range(m):
            twist[i][j] = A1.bundle.twist[i][j]
            twist[m + i][m + j] = dual.target.twist[i][j]
    zero = Section.zero(ring, m)
    table = [[Section.zero(ring, n) for _ in range(n)] for _ in range(n)]
    for r in range(m):
        for s in range(m):
            table[r][s] = Section(list(A1.table[r][s].coords) + list(zero.coords))
        for k in range(m):
            mixed = Section(list(zero.coords) + list(dual.table[r][k].coords))
            table[r][m + k] = mixed
            table[m + k][r] = -mixed
    anchors = list(A1.anchors) + [TwistedDerivation.zero(A1.endomorphism) for _ in range(m)]
    bundle = HomBundle(ring, n, A1.endomorphism, twist)
    logger.info("Built rank-%d phase space of %s", n, A1.name)
    return HomAlgebroidStructure(bundle, table, anchors, name=name or f"{A1.name}:phase-space")
