"""A-connections, representations and the connections built from a metric or a symplectic form.

A representation of S on a hom-bundle E (twist mu) is stored as
rho(e_i) e_a for basis sections plus one twisted derivation d_i per e_i,
the symbol of rho(e_i). It acts on arbitrary sections by

    rho(sum f_i e_i)(sum g_a e_a) = sum phi*(f_i) phi*(g_a) rho(e_i) e_a
                                    + mu(sum_i phi*(f_i) d_i(g))

An A-connection is the representation-shaped object whose symbols are
a(phi_A e_i); the same rule then reads nabla_X(f Z) = phi*(f) nabla_X Z
+ a(phi_A X)(f) phi_E(Z).
"""

import itertools
import logging
from typing import List, Optional, Sequence

from homalgebroid.algebroid import (PRODUCT, HomAlgebroidStructure, HomBundle, Section,
                                    check_left_symmetric, combine, pairing, sample_functions,
                                    random_sections, span_coordinates, stream)
from homalgebroid.errors import InvalidStructureError
from homalgebroid.linalg import Matrix, inverse, matmul, matvec, solve, transpose
from homalgebroid.report import LawCheck, VerificationReport
from homalgebroid.ring import RingElement, TwistedDerivation
from homalgebroid.sampling import Sampler

logger = logging.getLogger(__name__)

SOLVE = 'solve'
FLAT = 'flat'


class Representation:
    """rho: Gamma(A) x Gamma(E) -> Gamma(E) given on basis sections."""

    def __init__(self, structure: HomAlgebroidStructure, target: HomBundle,
                 table: Sequence[Sequence], symbols: Optional[Sequence[TwistedDerivation]] = None,
                 name: str = ''):
        n, m = structure.rank, target.rank
        if len(table) != n or any(len(row) != m for row in table):
            raise InvalidStructureError(f"Operator table must be {n}x{m}")
        self.structure = structure
        self.target = target
        self.name = name
        self.table = [[entry if isinstance(entry, Section) else Section(target.ring(c) for c in entry)
                       for entry in row] for row in table]
        for i, row in enumerate(self.table):
            for a, entry in enumerate(row):
                if entry.rank != m:
                    raise InvalidStructureError(
                        f"Entry ({i + 1},{a + 1}) has {entry.rank} coordinates, expected {m}",
                        entry=(i, a))
        if symbols is None:
            symbols = [structure.anchor(structure.phi(e)) for e in structure.basis_sections()]
        if len(symbols) != n:
            raise InvalidStructureError(f"Need {n} symbols, got {len(symbols)}")
        self.symbols = list(symbols)
        self.has_symbol = any(not d.is_zero for d in self.symbols)

    @property
    def ring(self):
        return self.structure.ring

    def target_basis(self) -> List[Section]:
        return self.target.basis_sections()

    def mu(self, z: Section) -> Section:
        return self.target.apply(z)

    def mu_inverse(self, z: Section) -> Section:
        return self.target.apply_inverse(z)

    def symbol_apply(self, x: Section, h: RingElement) -> RingElement:
        """The anchor part of rho(X) applied to h: sum phi*(x_i) d_i(h)."""
        phi = self.structure.endomorphism
        result = self.ring.zero
        for xi, derivation in zip(x.coords, self.symbols):
            if xi and not derivation.is_zero:
                result = result + phi(xi) * derivation(h)
        return result

    def apply(self, x: Section, z: Section) -> Section:
        phi = self.structure.endomorphism
        fx = [phi(f) for f in x.coords]
        gz = [phi(g) for g in z.coords]
        total = [self.ring.zero for _ in range(self.target.rank)]
        for i, fi in enumerate(fx):
            if not fi:
                continue
            for a, ga in enumerate(gz):
                if not ga:
                    continue
                entry = self.table[i][a]
                if entry.is_zero:
                    continue
                weight = fi * ga
                for k, c in enumerate(entry.coords):
                    if c:
                        total[k] = total[k] + weight * c
        result = Section(total)
        if self.has_symbol:
            derived = [self.symbol_apply(x, g) for g in z.coords]
            result = result + combine(self.target.twist, derived, self.ring)
        return result

    def __call__(self, x: Section, z: Section) -> Section:
        return self.apply(x, z)

    def coefficient_table(self) -> List[List[Section]]:
        return [list(row) for row in self.table]

    def describe(self) -> str:
        lines = [f"{self.name or 'representation'} on a rank-{self.target.rank} bundle"]
        for i, row in enumerate(self.table):
            for a, entry in enumerate(row):
                if not entry.is_zero:
                    lines.append(f"  rho(e{i + 1}) e{a + 1} = {entry}")
        return '\n'.join(lines)


class AdjointRepresentation(Representation):
    """L_X Z = [X, Z] on A itself, with mu = phi_A and symbols a(phi_A e_i)."""

    def __init__(self, structure: HomAlgebroidStructure):
        super().__init__(structure, structure.bundle, structure.table, name='adjoint')

    def apply(self, x: Section, z: Section) -> Section:
        return self.structure.bracket(x, z)


class Connection(Representation):
    """A-connection with nabla_{e_i} e_a = table[i][a]."""

    def __init__(self, structure: HomAlgebroidStructure, table: Sequence[Sequence],
                 target: Optional[HomBundle] = None, name: str = ''):
        super().__init__(structure, target or structure.bundle, table, None, name)

    def covariant(self, x: Section, z: Section) -> Section:
        """nabla_X Z."""
        return self.apply(x, z)

    def perturbed(self, i: int, a: int, k: int, delta=1) -> 'Connection':
        """Copy with the coefficient of e_k in nabla_{e_i} e_a shifted by ``delta``."""
        table = [[list(entry.coords) for entry in row] for row in self.table]
        table[i][a][k] = table[i][a][k] + self.ring(delta)
        return Connection(self.structure, table, self.target, self.name)

    def as_product_structure(self, name: str = '') -> HomAlgebroidStructure:
        """The hom-algebroid X . Y = nabla_X Y (needs target = A)."""
        if self.target.rank != self.structure.rank:
            raise InvalidStructureError("Only a connection on A itself defines a product on A")
        return HomAlgebroidStructure(self.structure.bundle, self.table, self.structure.anchors,
                                     PRODUCT, name or f"{self.structure.name}:product")

    def same_table(self, other: 'Connection') -> bool:
        return all(a == b for ra, rb in zip(self.table, other.table) for a, b in zip(ra, rb))


def lie_derivative_representation(S: HomAlgebroidStructure) -> AdjointRepresentation:
    return AdjointRepresentation(S)


# -- representations --------------------------------------------------------

def check_representation(S: HomAlgebroidStructure, R: Representation,
                         sampler: Optional[Sampler] = None,
                         prefix: str = 'representation') -> VerificationReport:
    """The three representation laws.

    symbol(rho(X)) = a(phi_A X), rho(phi_A X) mu = mu rho(X) and
    rho([X, Y]) mu = rho(phi_A X) rho(Y) - rho(phi_A Y) rho(X), for X, Y
    basis sections and Z basis or random sections of E.
    """
    sampler = stream(sampler, prefix)
    anchor_law = LawCheck(f'{prefix}.anchor')
    twist_law = LawCheck(f'{prefix}.twist')
    bracket_law = LawCheck(f'{prefix}.bracket')
    basis = S.basis_sections()
    targets = R.target_basis()
    samples = [Section(v) for v in sampler.vectors(S.ring, R.target.rank)]
    functions = sample_functions(S.ring, sampler, 5)
    for x in basis + random_sections(S, sampler, 5):
        twisted = S.phi(x)
        for h in functions:
            anchor_law.record((x, h), R.symbol_apply(x, h) - S.anchor_apply(twisted, h))
    for x in basis:
        for z in targets + samples:
            twist_law.record((x, z), R.apply(S.phi(x), R.mu(z)) - R.mu(R.apply(x, z)))
    for x, y in itertools.product(basis, repeat=2):
        xy = S.bracket(x, y)
        px, py = S.phi(x), S.phi(y)
        for z in targets + samples[:5]:
            lhs = R.apply(xy, R.mu(z))
            rhs = R.apply(px, R.apply(y, z)) - R.apply(py, R.apply(x, z))
            bracket_law.record((x, y, z), lhs - rhs)
    report = VerificationReport(S.name, sampler.seed)
    report.add_all([anchor_law, twist_law, bracket_law])
    return report


def dual_representation(S: HomAlgebroidStructure, R: Representation) -> Representation:
    """rho~ on E* with twist mu^dagger.

    <rho~(X) xi, Y> = a(phi_A X) <xi, mu^{-1} Y> - phi* <xi, rho(phi_A^{-1} X)(mu^{-2} Y)>

    Raises:
        DegenerateError: when mu is singular (already rejected by HomBundle).
    """
    phi = S.endomorphism
    dual_bundle = R.target.dual()
    m = R.target.rank
    targets = R.target_basis()
    once = [R.mu_inverse(y) for y in targets]
    twice = [R.mu_inverse(y) for y in once]
    table = []
    for x in S.basis_sections():
        twisted = S.phi(x)
        pulled = S.phi_inverse(x)
        acted = [R.apply(pulled, y) for y in twice]
        row = []
        for k in range(m):
            values = [S.anchor_apply(twisted, once[l].coords[k]) - phi(acted[l].coords[k])
                      for l in range(m)]
            row.append(Section(values))
        table.append(row)
    symbols = [S.anchor(S.phi(x)) for x in S.basis_sections()]
    return Representation(S, dual_bundle, table, symbols, name=f"dual of {R.name or 'rho'}")


# -- Levi-Civita --------------------------------------------------------------

def levi_civita(S: HomAlgebroidStructure, G: Matrix) -> Connection:
    """Solve Koszul's formula basis pair by basis pair.

    2<nabla_X Y, phi Z> = a(phi X)<Y,Z> + a(phi Y)<Z,X> - a(phi Z)<X,Y>
                          + <[X,Y], phi Z> + <[Z,X], phi Y> + <[Z,Y], phi X>

    Raises:
        DegenerateError: when the pairing Phi^T G is singular.
    """
    ring = S.ring
    G = [[ring(x) for x in row] for row in G]
    basis = S.basis_sections()
    twisted = [S.phi(e) for e in basis]
    system = inverse(matmul(transpose(S.bundle.twist), G), ring, 'metric pairing Phi^T G')
    half = ring(1) / 2
    n = S.rank
    table = []
    for i in range(n):
        row = []
        for j in range(n):
            rhs = []
            for k in range(n):
                value = (S.anchor_apply(twisted[i], G[j][k]) + S.anchor_apply(twisted[j], G[k][i])
                         - S.anchor_apply(twisted[k], G[i][j])
                         + pairing(G, S.table[i][j], twisted[k])
                         + pairing(G, S.table[k][i], twisted[j])
                         + pairing(G, S.table[k][j], twisted[i]))
                rhs.append(value * half)
            row.append(Section(matvec(system, rhs)))
        table.append(row)
    logger.debug("Levi-Civita connection solved for %s", S.name)
    return Connection(S, table, name='levi-civita')


def verify_levi_civita(S: HomAlgebroidStructure, G: Matrix, nabla: Connection,
                       sampler: Optional[Sampler] = None,
                       prefix: str = 'levicivita') -> VerificationReport:
    """Torsion-freeness and metric compatibility on basis tuples and random sections."""
    sampler = stream(sampler, prefix)
    G = [[S.ring(x) for x in row] for row in G]
    torsion = LawCheck(f'{prefix}.torsion_free')
    compatible = LawCheck(f'{prefix}.metric_compatible')
    basis = S.basis_sections()

    def record_compatibility(x, y, z):
        residual = (S.anchor_apply(S.phi(x), pairing(G, y, z)) - pairing(G, nabla(x, y), S.phi(z))
                    - pairing(G, S.phi(y), nabla(x, z)))
        compatible.record((x, y, z), residual)

    for x, y in itertools.product(basis, repeat=2):
        torsion.record((x, y), S.bracket(x, y) - nabla(x, y) + nabla(y, x))
        for z in basis:
            record_compatibility(x, y, z)
    samples = random_sections(S, sampler, 3 * sampler.batch_size)
    for t in range(sampler.batch_size):
        x, y, z = samples[3 * t:3 * t + 3]
        torsion.record((x, y), S.bracket(x, y) - nabla(x, y) + nabla(y, x))
        record_compatibility(x, y, z)
    report = VerificationReport(S.name, sampler.seed)
    report.add_all([torsion, compatible])
    return report


# -- the symplectic left-symmetric connection ------------------------------

def flat(omega: Matrix, y: Section) -> Section:
    """omega(Y, .) in dual-basis coordinates."""
    return Section(matvec(transpose(omega), list(y.coords)))


def left_symmetric_connection(S: HomAlgebroidStructure, omega: Matrix,
                              route: str = SOLVE) -> Connection:
    """The connection defined by omega(nabla_X Y, phi Z) = a(phi X) omega(Y,Z) - omega(phi Y, [X,Z]).

    ``route='solve'`` solves this identity directly; ``route='flat'``
    conjugates the dual of the adjoint representation by omega-flat.

    Raises:
        DegenerateError: when omega is degenerate.
    """
    ring = S.ring
    omega = [[ring(x) for x in row] for row in omega]
    basis = S.basis_sections()
    n = S.rank
    if route == FLAT:
        dual = dual_representation(S, lie_derivative_representation(S))
        musical = transpose(omega)
        table = [[Section(solve(musical, list(dual(basis[i], flat(omega, basis[j])).coords), ring,
                                'symplectic form'))
                  for j in range(n)] for i in range(n)]
        return Connection(S, table, name='left-symmetric')
    if route != SOLVE:
        raise ValueError(f"Unknown route '{route}'")
    twisted = [S.phi(e) for e in basis]
    system = inverse(transpose(matmul(omega, S.bundle.twist)), ring, 'symplectic form')
    table = []
    for i in range(n):
        row = []
        for j in range(n):
            rhs = [S.anchor_apply(twisted[i], omega[j][l]) - pairing(omega, twisted[j], S.table[i][l])
                   for l in range(n)]
            row.append(Section(matvec(system, rhs)))
        table.append(row)
    return Connection(S, table, name='left-symmetric')


def verify_left_symmetric_connection(S: HomAlgebroidStructure, omega: Matrix, nabla: Connection,
                                     sampler: Optional[Sampler] = None,
                                     prefix: str = 'leftsymmetric') -> VerificationReport:
    """The defining identity, the torsion, bracket and flatness identities, and left-symmetry.

    With T(X,Y) = nabla_X Y - nabla_Y X - [X,Y]:
      omega(T(X,Y), phi Z) = -a(phi Z) omega(X,Y)
      omega(phi^2 Z', [T(X,Y), phi Z]) = -a(phi^2 Z) a(phi Z') omega(X,Y)
                                          + a(phi nabla_Z Z') omega(phi X, phi Y)
      nabla_{phi Y} nabla_X Z - nabla_{phi X} nabla_Y Z + nabla_{nabla_X Y} phi Z
          - nabla_{nabla_Y X} phi Z = [T(X,Y), phi Z]
    """
    ring = S.ring
    omega = [[ring(x) for x in row] for row in omega]
    basis = S.basis_sections()
    phi = S.phi
    a = S.anchor_apply
    defining = LawCheck(f'{prefix}.defining_identity')
    torsion = LawCheck(f'{prefix}.torsion_identity')
    bracket_identity = LawCheck(f'{prefix}.bracket_identity')
    flatness = LawCheck(f'{prefix}.flatness_identity')
    isolated = LawCheck(f'{prefix}.bracket_identity_isolated', informational=True)

    def T(x, y):
        return nabla(x, y) - nabla(y, x) - S.bracket(x, y)

    for x, y, z in itertools.product(basis, repeat=3):
        defining.record((x, y, z), pairing(omega, nabla(x, y), phi(z))
                        - a(phi(x), pairing(omega, y, z)) + pairing(omega, phi(y), S.bracket(x, z)))
        torsion.record((x, y, z), pairing(omega, T(x, y), phi(z)) + a(phi(z), pairing(omega, x, y)))
        lhs = (nabla(phi(y), nabla(x, z)) - nabla(phi(x), nabla(y, z))
               + nabla(nabla(x, y), phi(z)) - nabla(nabla(y, x), phi(z)))
        flatness.record((x, y, z), lhs - S.bracket(T(x, y), phi(z)))
    for x, y, z, w in itertools.product(basis, repeat=4):
        value = pairing(omega, x, y)
        residual = (pairing(omega, S.bundle.power(w, 2), S.bracket(T(x, y), phi(z)))
                    + a(S.bundle.power(z, 2), a(phi(w), value))
                    - a(phi(nabla(z, w)), pairing(omega, phi(x), phi(y))))
        bracket_identity.record((x, y, z, w), residual)

    report = VerificationReport(S.name, sampler.seed if sampler else None)
    report.add_all([defining, torsion, bracket_identity, flatness])
    if not bracket_identity.ok and torsion.ok and flatness.ok:
        isolated.record(bracket_identity.witness, bracket_identity.residual)
        isolated.detail = "bracket identity fails while the torsion and flatness identities hold"
    else:
        isolated.cases = 1
    report.add(isolated)
    product = nabla.as_product_structure()
    report.extend(check_left_symmetric(product, omega, sampler, prefix))
    return report


def check_left_symmetric_connection(S: HomAlgebroidStructure, omega: Matrix,
                                    sampler: Optional[Sampler] = None,
                                    prefix: str = 'leftsymmetric') -> VerificationReport:
    """Build the connection by both routes, compare them and verify the identities."""
    solved = left_symmetric_connection(S, omega, SOLVE)
    conjugated = left_symmetric_connection(S, omega, FLAT)
    agreement = LawCheck(f'{prefix}.route_agreement')
    for i, j in itertools.product(range(S.rank), repeat=2):
        agreement.record((S.basis(i), S.basis(j)), solved.table[i][j] - conjugated.table[i][j])
    report = verify_left_symmetric_connection(S, omega, solved, sampler, prefix)
    report.add(agreement)
    return report


# -- restriction ------------------------------------------------------------

def restrict_connection(nabla: Connection, B: Sequence, restricted: HomAlgebroidStructure) -> Connection:
    """nabla on span B, expressed in the basis B.

    Raises:
        InvalidStructureError: when nabla_{b_a} b_c leaves span B.
    """
    ring = nabla.ring
    rows = [[ring(c) for c in (b.coords if isinstance(b, Section) else b)] for b in B]
    sections = [Section(row) for row in rows]
    table = []
    for a, x in enumerate(sections):
        row = []
        for c, y in enumerate(sections):
            value = nabla(x, y)
            coords = span_coordinates(rows, value, ring)
            if coords is None:
                raise InvalidStructureError(
                    f"Connection does not preserve the submodule: nabla_b{a + 1} b{c + 1} = {value}",
                    entry=(a, c))
            row.append(Section(coords))
        table.append(row)
    return Connection(restricted, table, name=f"{nabla.name}|sub")
