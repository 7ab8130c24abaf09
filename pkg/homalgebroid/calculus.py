"""Cartan calculus of a hom-Lie algebroid: d, the hom-Schouten bracket, Lie derivatives.

Forms and multivectors keep one value per strictly increasing basis index
tuple. The exterior derivative and the form Lie derivative are computed by
evaluating their defining formulas on basis sections, with phi_A^{-1}
inserted where the formulas ask for it; no tensoriality is assumed.
"""

import itertools
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from homalgebroid.algebroid import (HomAlgebroidStructure, Section, sample_functions,
                                    random_sections, stream)
from homalgebroid.config import VerificationConfig
from homalgebroid.errors import InvalidStructureError
from homalgebroid.report import LawCheck, VerificationReport
from homalgebroid.ring import CoefficientRing, RingElement
from homalgebroid.sampling import Sampler

logger = logging.getLogger(__name__)

GRADED = 'graded'
VERBATIM = 'verbatim'
CONVENTIONS = (GRADED, VERBATIM)

Indices = Tuple[int, ...]


def sort_with_sign(indices: Sequence[int]) -> Tuple[Optional[Indices], int]:
    """Sorted tuple and permutation sign; (None, 0) on a repeated index."""
    if len(set(indices)) != len(indices):
        return None, 0
    values = list(indices)
    sign = 1
    for i in range(len(values)):
        for j in range(len(values) - 1 - i):
            if values[j] > values[j + 1]:
                values[j], values[j + 1] = values[j + 1], values[j]
                sign = -sign
    return tuple(values), sign


def permutation_sign(perm: Sequence[int]) -> int:
    return sort_with_sign(perm)[1]


class AlternatingTensor:
    """Antisymmetric coefficient table over basis index tuples."""

    label = 'e'

    def __init__(self, ring: CoefficientRing, rank: int, degree: int,
                 values: Optional[Dict[Sequence[int], RingElement]] = None):
        if degree < 0:
            raise InvalidStructureError(f"Negative degree {degree}")
        self.ring = ring
        self.rank = rank
        self.degree = degree
        self.values: Dict[Indices, RingElement] = {}
        for indices, value in (values or {}).items():
            self._accumulate(tuple(indices), ring(value))

    def _accumulate(self, indices: Sequence[int], value: RingElement) -> None:
        if len(indices) != self.degree:
            raise InvalidStructureError(
                f"Index tuple {tuple(indices)} does not have degree {self.degree}")
        if any(i < 0 or i >= self.rank for i in indices):
            raise InvalidStructureError(f"Index tuple {tuple(indices)} out of range")
        key, sign = sort_with_sign(indices)
        if key is None or not value:
            return
        total = self.values.get(key, self.ring.zero) + (value if sign > 0 else -value)
        if total:
            self.values[key] = total
        else:
            self.values.pop(key, None)

    def _new(self, degree: Optional[int] = None, values=None):
        return type(self)(self.ring, self.rank, self.degree if degree is None else degree, values)

    def component(self, indices: Sequence[int]) -> RingElement:
        key, sign = sort_with_sign(indices)
        if key is None:
            return self.ring.zero
        value = self.values.get(key, self.ring.zero)
        return value if sign > 0 else -value

    def items(self) -> List[Tuple[Indices, RingElement]]:
        return sorted(self.values.items())

    @property
    def is_zero(self) -> bool:
        return not self.values

    def _check_compatible(self, other: 'AlternatingTensor') -> None:
        if type(other) is not type(self) or other.degree != self.degree or other.rank != self.rank:
            raise InvalidStructureError(
                f"Cannot combine {type(self).__name__} of degree {self.degree} with "
                f"{type(other).__name__} of degree {other.degree}")

    def __add__(self, other):
        self._check_compatible(other)
        result = self._new(values=self.values)
        for key, value in other.values.items():
            result._accumulate(key, value)
        return result

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._new(values={k: -v for k, v in self.values.items()})

    def scaled(self, f):
        return self._new(values={k: f * v for k, v in self.values.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlternatingTensor):
            return NotImplemented
        try:
            return (self - other).is_zero
        except InvalidStructureError:
            return False

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.degree, tuple(self.items())))

    def _basis_label(self, indices: Indices) -> str:
        return f"{self.label}(" + ','.join(str(i + 1) for i in indices) + ')'

    def __str__(self) -> str:
        if not self.values:
            return '0'
        terms = []
        for indices, value in self.items():
            label = self._basis_label(indices)
            if value == 1:
                terms.append(label)
            elif value == -1:
                terms.append(f"-{label}")
            else:
                text = str(value)
                if not value.is_constant and any(op in text.lstrip('-') for op in '+- '):
                    text = f"({text})"
                terms.append(f"{text}*{label}")
        return ' + '.join(terms).replace('+ -', '- ')

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.degree}, {self})"


class Form(AlternatingTensor):
    """A q-form: omega(e_I) for increasing index tuples I."""

    label = 'e^'

    @classmethod
    def function(cls, f: RingElement, rank: int) -> 'Form':
        return cls(f.ring, rank, 0, {(): f})

    @classmethod
    def dual_basis(cls, ring: CoefficientRing, rank: int, index: int) -> 'Form':
        return cls(ring, rank, 1, {(index,): ring.one})

    @classmethod
    def from_matrix(cls, matrix, ring: CoefficientRing) -> 'Form':
        """The 2-form with omega(e_i, e_j) = matrix[i][j] (upper triangle is read)."""
        n = len(matrix)
        return cls(ring, n, 2, {(i, j): ring(matrix[i][j]) for i in range(n) for j in range(i + 1, n)})

    def to_matrix(self) -> List[List[RingElement]]:
        if self.degree != 2:
            raise InvalidStructureError("Only 2-forms have a Gram matrix")
        return [[self.component((i, j)) for j in range(self.rank)] for i in range(self.rank)]

    def evaluate(self, sections: Sequence[Section]) -> RingElement:
        """omega(z_1, ..., z_q) by alternating multilinear expansion."""
        if len(sections) != self.degree:
            raise InvalidStructureError(
                f"A {self.degree}-form takes {self.degree} arguments, got {len(sections)}")
        if self.degree == 0:
            return self.values.get((), self.ring.zero)
        total = self.ring.zero
        perms = [(p, permutation_sign(p)) for p in itertools.permutations(range(self.degree))]
        for indices, value in self.values.items():
            minor = self.ring.zero
            for perm, sign in perms:
                term = value
                for k, position in enumerate(perm):
                    coordinate = sections[k].coords[indices[position]]
                    if not coordinate:
                        term = None
                        break
                    term = term * coordinate
                if term is not None:
                    minor = minor + term if sign > 0 else minor - term
            total = total + minor
        return total


class Multivector(AlternatingTensor):
    """A p-vector: coefficients of e_I = e_{i1} ^ ... ^ e_{ip}."""

    label = 'e_'

    @classmethod
    def from_section(cls, x: Section, ring: CoefficientRing) -> 'Multivector':
        return cls(ring, len(x), 1, {(k,): c for k, c in enumerate(x.coords) if c})

    @classmethod
    def wedge_basis(cls, ring: CoefficientRing, rank: int, indices: Sequence[int]) -> 'Multivector':
        return cls(ring, rank, len(indices), {tuple(indices): ring.one})

    def wedge(self, other: 'Multivector') -> 'Multivector':
        result = Multivector(self.ring, self.rank, self.degree + other.degree)
        if self.degree + other.degree > self.rank:
            return result
        for left, a in self.values.items():
            for right, b in other.values.items():
                result._accumulate(left + right, a * b)
        return result

    def decomposable_terms(self) -> List[List[Section]]:
        """(u_I e_{i1}) ^ e_{i2} ^ ... per increasing tuple I."""
        terms = []
        for indices, value in self.items():
            factors = []
            for position, i in enumerate(indices):
                coords = [self.ring.zero] * self.rank
                coords[i] = value if position == 0 else self.ring.one
                factors.append(Section(coords))
            terms.append(factors)
        return terms


def wedge_sections(ring: CoefficientRing, rank: int, sections: Sequence[Section]) -> Multivector:
    result = Multivector(ring, rank, 0, {(): ring.one})
    for x in sections:
        result = result.wedge(Multivector(ring, rank, 1, {(k,): c for k, c in enumerate(x.coords) if c}))
    return result


def twist_multivector(S: HomAlgebroidStructure, u: Multivector) -> Multivector:
    """phi_A on multivectors: phi_A(u_I e_I) = phi*(u_I) phi_A(e_{i1}) ^ ... ^ phi_A(e_{ip})."""
    images = [S.phi(e) for e in S.basis_sections()]
    result = Multivector(S.ring, S.rank, u.degree)
    for indices, value in u.items():
        term = wedge_sections(S.ring, S.rank, [images[i] for i in indices])
        result = result + term.scaled(S.endomorphism(value))
    return result


# -- exterior derivative --------------------------------------------------

def _twisted_form_value(S: HomAlgebroidStructure, omega: Form, sections: Sequence[Section]) -> RingElement:
    """(phi_A^dagger omega)(y_1..y_q) = phi*(omega(phi_A^{-1} y_1, ...))."""
    return S.endomorphism(omega.evaluate([S.phi_inverse(y) for y in sections]))


def evaluate_exterior_derivative(S: HomAlgebroidStructure, omega: Form,
                                 sections: Sequence[Section]) -> RingElement:
    """d omega (z_1..z_{q+1}) from the defining two-sum formula."""
    q = omega.degree
    if len(sections) != q + 1:
        raise InvalidStructureError(f"d of a {q}-form takes {q + 1} arguments")
    pulled = [S.phi_inverse(z) for z in sections]
    total = S.ring.zero
    for i in range(q + 1):
        rest = pulled[:i] + pulled[i + 1:]
        term = S.anchor_apply(sections[i], omega.evaluate(rest))
        total = total + term if i % 2 == 0 else total - term
    for i, j in itertools.combinations(range(q + 1), 2):
        rest = [z for k, z in enumerate(sections) if k not in (i, j)]
        term = _twisted_form_value(S, omega, [S.bracket(pulled[i], pulled[j])] + rest)
        total = total + term if (i + j) % 2 == 0 else total - term
    return total


def exterior_derivative(S: HomAlgebroidStructure, omega: Form) -> Form:
    """d^A omega, stored by evaluation on increasing basis tuples."""
    q = omega.degree
    result = Form(S.ring, S.rank, q + 1)
    basis = S.basis_sections()
    for indices in itertools.combinations(range(S.rank), q + 1):
        value = evaluate_exterior_derivative(S, omega, [basis[i] for i in indices])
        result._accumulate(indices, value)
    return result


def differential(S: HomAlgebroidStructure, f: RingElement) -> Form:
    """d^A f for a function, with (d f)(z) = a(z) f."""
    return exterior_derivative(S, Form.function(S.ring(f), S.rank))


# -- Lie derivatives -------------------------------------------------------

def evaluate_lie_derivative_form(S: HomAlgebroidStructure, z: Section, omega: Form,
                                 sections: Sequence[Section]) -> RingElement:
    """(L_z omega)(z_1..z_q) = a(phi z) omega(phi^{-1} z_.) - sum_i phi^dagger omega(.., [z, phi^{-1} z_i], ..)."""
    q = omega.degree
    if len(sections) != q:
        raise InvalidStructureError(f"L_z of a {q}-form takes {q} arguments")
    pulled = [S.phi_inverse(x) for x in sections]
    total = S.anchor_apply(S.phi(z), omega.evaluate(pulled))
    for i in range(q):
        arguments = list(sections)
        arguments[i] = S.bracket(z, pulled[i])
        total = total - _twisted_form_value(S, omega, arguments)
    return total


def lie_derivative_form(S: HomAlgebroidStructure, z: Section, omega: Form) -> Form:
    result = Form(S.ring, S.rank, omega.degree)
    basis = S.basis_sections()
    for indices in itertools.combinations(range(S.rank), omega.degree):
        result._accumulate(indices, evaluate_lie_derivative_form(S, z, omega, [basis[i] for i in indices]))
    return result


def schouten_decomposable(S: HomAlgebroidStructure, u: Sequence[Section], v: Sequence[Section],
                          convention: str = GRADED) -> Multivector:
    """Schouten bracket of u_1 ^ .. ^ u_p with v_1 ^ .. ^ v_q."""
    p, q = len(u), len(v)
    result = Multivector(S.ring, S.rank, p + q - 1)
    if p + q - 1 > S.rank:
        return result
    twisted_u = [S.phi(x) for x in u]
    twisted_v = [S.phi(y) for y in v]
    for i in range(p):
        for j in range(q):
            bracket = S.bracket(u[i], v[j])
            if bracket.is_zero:
                continue
            factors = [bracket] + twisted_u[:i] + twisted_u[i + 1:] + twisted_v[:j] + twisted_v[j + 1:]
            term = wedge_sections(S.ring, S.rank, factors)
            result = result + term if (i + j) % 2 == 0 else result - term
    if convention == VERBATIM and p % 2 == 0:
        result = -result
    return result


def schouten_bracket(S: HomAlgebroidStructure, u: Multivector, v: Multivector,
                     convention: str = GRADED) -> Multivector:
    """Hom-Schouten bracket, expanded over (u_I e_{i1}) ^ e_{i2} ^ ... terms.

    ``graded`` uses sum (-1)^{i+j} [u_i, v_j] ^ phi(rest); ``verbatim``
    multiplies by (-1)^{p+1}. A degree above the rank gives the zero
    multivector.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"Unknown Schouten convention '{convention}'")
    if u.degree < 1 or v.degree < 1:
        raise InvalidStructureError("Schouten bracket needs multivectors of degree >= 1")
    result = Multivector(S.ring, S.rank, u.degree + v.degree - 1)
    for left in u.decomposable_terms():
        for right in v.decomposable_terms():
            result = result + schouten_decomposable(S, left, right, convention)
    return result


def lie_derivative_multivector(S: HomAlgebroidStructure, u: Section, v: Multivector,
                               convention: str = GRADED) -> Multivector:
    """L_u v = [u, v] through the Schouten bracket."""
    return schouten_bracket(S, Multivector.from_section(u, S.ring), v, convention)


# -- checks ----------------------------------------------------------------

def check_exterior(S: HomAlgebroidStructure, sampler: Optional[Sampler] = None,
                   prefix: str = 'exterior') -> VerificationReport:
    """Function-level identities of d and L, the informational d^2 residual and the
    Schouten properties in the configured sign convention."""
    sampler = stream(sampler, prefix)
    functions = sample_functions(S.ring, sampler, 5)
    sections = random_sections(S, sampler, 5)
    differential_law = LawCheck(f'{prefix}.function_differential')
    lie_law = LawCheck(f'{prefix}.lie_derivative_function')
    square = LawCheck(f'{prefix}.d_squared', informational=True)
    for f in functions:
        df = differential(S, f)
        for z in S.basis_sections() + sections:
            differential_law.record((f, z), df.evaluate([z]) - S.anchor_apply(z, f))
            lie_law.record((f, z), evaluate_lie_derivative_form(S, z, Form.function(f, S.rank), [])
                           - S.anchor_apply(S.phi(z), f))
    starters = [Form.dual_basis(S.ring, S.rank, k) for k in range(S.rank)]
    starters += [Form.function(g, S.rank) for g in ([] if S.ring.is_scalar else S.ring.gens())]
    for form in starters:
        if form.degree + 2 > S.rank:
            square.cases += 1
            continue
        square.record((form,), exterior_derivative(S, exterior_derivative(S, form)))
    report = VerificationReport(S.name, sampler.seed)
    report.add_all([differential_law, lie_law, square])
    report.extend(check_schouten_properties(S, sampler.settings.schouten_convention,
                                            schouten_degree_bound(S, sampler.settings), f'{prefix}.schouten'))
    return report


def schouten_degree_bound(S: HomAlgebroidStructure, settings: VerificationConfig) -> int:
    """Highest bracket degree the exterior check covers: the configured cap, else the rank."""
    cap = settings.schouten_max_degree
    return S.rank if cap is None else max(1, min(S.rank, cap))


def check_schouten_properties(S: HomAlgebroidStructure, convention: str = GRADED,
                              max_degree: Optional[int] = None,
                              prefix: str = 'schouten') -> VerificationReport:
    """Graded antisymmetry and the graded Leibniz rule on wedge-basis inputs.

    Every pair (triple) whose bracket has degree at most ``max_degree``
    (default: the rank) is evaluated. Brackets of basis wedges are computed
    once; v ^ z of two basis wedges is again one, up to sign, or zero.
    """
    n = S.rank
    max_degree = n if max_degree is None else max_degree
    wedges = {c: Multivector.wedge_basis(S.ring, n, c)
              for p in range(1, n + 1) for c in itertools.combinations(range(n), p)}
    brackets: Dict[Tuple[Indices, Indices], Multivector] = {}
    twisted: Dict[Indices, Multivector] = {}

    def bracket_of(a: Indices, b: Indices) -> Multivector:
        if (a, b) not in brackets:
            brackets[(a, b)] = schouten_bracket(S, wedges[a], wedges[b], convention)
        return brackets[(a, b)]

    def twist_of(c: Indices) -> Multivector:
        if c not in twisted:
            twisted[c] = twist_multivector(S, wedges[c])
        return twisted[c]

    antisymmetry = LawCheck(f'{prefix}.graded_antisymmetry')
    leibniz = LawCheck(f'{prefix}.graded_leibniz')
    highest = 0
    for a, b in itertools.product(wedges, repeat=2):
        p, q = len(a), len(b)
        if p + q - 1 > max_degree:
            continue
        sign = -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1
        antisymmetry.record((wedges[a], wedges[b]), bracket_of(a, b) - bracket_of(b, a).scaled(sign))
        highest = max(highest, min(p + q - 1, n))
    for a, b, c in itertools.product(wedges, repeat=3):
        p, q, r = len(a), len(b), len(c)
        if p + q + r - 1 > max_degree:
            continue
        merged, order = sort_with_sign(b + c)
        if merged is None or len(merged) > n:
            lhs = Multivector(S.ring, n, p + q + r - 1)
        else:
            lhs = bracket_of(a, merged).scaled(order)
        sign = 1 if ((p - 1) * q) % 2 == 0 else -1
        rhs = (bracket_of(a, b).wedge(twist_of(c)) +
               twist_of(b).wedge(bracket_of(a, c)).scaled(sign))
        leibniz.record((wedges[a], wedges[b], wedges[c]), lhs - rhs)
        highest = max(highest, min(p + q + r - 1, n))
    detail = f"bracket degrees up to {highest}"
    antisymmetry.detail = leibniz.detail = detail
    logger.debug("Schouten properties of %s checked %s", S.name, detail)
    report = VerificationReport(S.name)
    report.add_all([antisymmetry, leibniz])
    return report
