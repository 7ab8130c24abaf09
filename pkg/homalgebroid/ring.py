"""Exact coefficient rings, substitution endomorphisms and twisted derivations."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, FracField
from sympy.polys.orderings import grlex

from homalgebroid.errors import InvalidStructureError, RingMismatchError

logger = logging.getLogger(__name__)

SCALAR = 'scalar'
POLYNOMIAL = 'polynomial'
FRACTION = 'fraction'
KINDS = (SCALAR, POLYNOMIAL, FRACTION)

Scalar = Union[int, Fraction, 'RingElement']


@lru_cache(maxsize=None)
def _fraction_field(variables: Tuple[str, ...]) -> FracField:
    """One FracField per variable tuple so elements always share a parent."""
    return FracField(variables, QQ, grlex)


def to_qq(value) -> object:
    """Convert an int, Fraction or QQ element to a QQ element."""
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


def qq_to_str(value) -> str:
    numerator, denominator = int(value.numerator), int(value.denominator)
    if denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


@dataclass(frozen=True)
class CoefficientRing:
    """Exact coefficient ring: QQ, QQ[x1..xk] or QQ(x1..xk)."""
    kind: str = SCALAR
    variables: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'variables', tuple(self.variables))
        if self.kind not in KINDS:
            raise InvalidStructureError(f"Unknown ring kind '{self.kind}'")
        if self.kind == SCALAR and self.variables:
            raise InvalidStructureError("Scalar ring takes no variables")
        if self.kind != SCALAR and not self.variables:
            raise InvalidStructureError(f"A {self.kind} ring needs at least one variable")
        seen = set()
        for name in self.variables:
            if not name or not name.isidentifier():
                raise InvalidStructureError(f"Invalid variable name '{name}'")
            if name in seen:
                raise InvalidStructureError(f"Duplicate variable '{name}'")
            seen.add(name)

    @classmethod
    def scalar(cls) -> 'CoefficientRing':
        return cls(SCALAR, ())

    @classmethod
    def polynomial(cls, variables: Sequence[str]) -> 'CoefficientRing':
        return cls(POLYNOMIAL, tuple(variables))

    @classmethod
    def fractions(cls, variables: Sequence[str]) -> 'CoefficientRing':
        return cls(FRACTION, tuple(variables))

    @property
    def is_scalar(self) -> bool:
        return self.kind == SCALAR

    @property
    def field(self) -> FracField:
        if self.is_scalar:
            raise RingMismatchError("The scalar ring has no rational function field")
        return _fraction_field(self.variables)

    @property
    def ngens(self) -> int:
        return len(self.variables)

    def fraction_ring(self) -> 'CoefficientRing':
        if self.is_scalar or self.kind == FRACTION:
            return self
        return CoefficientRing(FRACTION, self.variables)

    def polynomial_ring(self) -> 'CoefficientRing':
        if self.is_scalar or self.kind == POLYNOMIAL:
            return self
        return CoefficientRing(POLYNOMIAL, self.variables)

    @property
    def zero(self) -> 'RingElement':
        return self(0)

    @property
    def one(self) -> 'RingElement':
        return self(1)

    def gen(self, index: int) -> 'RingElement':
        """The ``index``-th variable as a ring element."""
        return RingElement(self.polynomial_ring(), self.field.gens[index])

    def gens(self) -> List['RingElement']:
        return [self.gen(i) for i in range(self.ngens)]

    def __call__(self, value) -> 'RingElement':
        """Coerce an int, Fraction, QQ element, RingElement or expression string."""
        if isinstance(value, RingElement):
            if self.kind == POLYNOMIAL and not value.is_polynomial:
                # promotes like arithmetic does
                return value.lift(self.fraction_ring())
            return value.lift(self)
        if isinstance(value, str):
            from homalgebroid.expression import parse_expression
            return parse_expression(value, self)
        constant = to_qq(value)
        if self.is_scalar:
            return RingElement(self, constant)
        return RingElement(self, self.field.ground_new(constant))

    def __str__(self) -> str:
        if self.is_scalar:
            return 'QQ'
        names = ','.join(self.variables)
        return f"QQ[{names}]" if self.kind == POLYNOMIAL else f"QQ({names})"


def _normalize(field: FracField, value: FracElement) -> FracElement:
    """Scale numerator and denominator so the denominator is monic."""
    lc = value.denom.LC
    if lc == field.domain.one:
        return value
    return field.raw_new(value.numer.quo_ground(lc), value.denom.quo_ground(lc))


def _render_polynomial(poly, variables: Tuple[str, ...]) -> str:
    terms = poly.terms()
    if not terms:
        return '0'
    pieces = []
    for position, (monom, coeff) in enumerate(terms):
        negative = coeff < 0
        magnitude = -coeff if negative else coeff
        factors = []
        for name, power in zip(variables, monom):
            if power == 1:
                factors.append(name)
            elif power > 1:
                factors.append(f"{name}^{power}")
        if not factors:
            body = qq_to_str(magnitude)
        elif magnitude == 1:
            body = '*'.join(factors)
        else:
            body = '*'.join([qq_to_str(magnitude)] + factors)
        if position == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return ''.join(pieces)


class RingElement:
    """Immutable element of a CoefficientRing in canonical form.

    Scalars hold a QQ element. Polynomial and fraction elements hold a
    sympy FracElement whose numerator and denominator are coprime with a
    monic denominator; polynomial elements additionally have denominator 1.
    """

    __slots__ = ('ring', 'value')

    def __init__(self, ring: CoefficientRing, value):
        if not ring.is_scalar:
            value = _normalize(ring.field, value)
            if ring.kind == POLYNOMIAL and value.denom != ring.field.ring.one:
                ring = ring.fraction_ring()
        object.__setattr__(self, 'ring', ring)
        object.__setattr__(self, 'value', value)

    def __setattr__(self, name, value):
        raise AttributeError("RingElement is immutable")

    # -- coercion -------------------------------------------------------

    def lift(self, target: CoefficientRing) -> 'RingElement':
        """Embed into ``target`` (scalar into anything, polynomial into fractions)."""
        source = self.ring
        if source == target:
            return self
        if source.is_scalar:
            return target(self.value)
        if target.is_scalar:
            if self.is_constant:
                return RingElement(target, self.constant())
            raise RingMismatchError(f"Cannot embed {self} from {source} into {target}")
        if source.variables != target.variables:
            raise RingMismatchError(f"Rings {source} and {target} have different variables")
        if target.kind == POLYNOMIAL and not self.is_polynomial:
            raise RingMismatchError(f"{self} is not a polynomial")
        return RingElement(target, self.value)

    def _unify(self, other) -> Tuple['RingElement', 'RingElement']:
        if not isinstance(other, RingElement):
            other = self.ring(other)
        a, b = self.ring, other.ring
        if a == b:
            return self, other
        if a.is_scalar:
            return self.lift(b), other
        if b.is_scalar:
            return self, other.lift(a)
        if a.variables != b.variables:
            raise RingMismatchError(f"No common ring for {a} and {b}")
        target = a.fraction_ring()
        return self.lift(target), other.lift(target)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        a, b = self._unify(other)
        return RingElement(a.ring, a.value + b.value)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._unify(other)
        return RingElement(a.ring, a.value - b.value)

    def __rsub__(self, other):
        a, b = self._unify(other)
        return RingElement(a.ring, b.value - a.value)

    def __mul__(self, other):
        a, b = self._unify(other)
        return RingElement(a.ring, a.value * b.value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._unify(other)
        if b.is_zero:
            raise ZeroDivisionError(f"Division of {a} by zero")
        return RingElement(a.ring, a.value / b.value)

    def __rtruediv__(self, other):
        a, b = self._unify(other)
        return b / a

    def __neg__(self):
        return RingElement(self.ring, -self.value)

    def __pos__(self):
        return self

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.ring.one / (self ** -exponent)
        return RingElement(self.ring, self.value ** exponent)

    # -- inspection -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.value

    def __bool__(self) -> bool:
        return bool(self.value)

    @property
    def is_polynomial(self) -> bool:
        return self.ring.is_scalar or self.value.denom == self.ring.field.ring.one

    @property
    def is_constant(self) -> bool:
        if self.ring.is_scalar:
            return True
        return self.is_polynomial and self.value.numer.is_ground

    def constant(self):
        """The QQ value of a constant element."""
        if self.ring.is_scalar:
            return self.value
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        numer = self.value.numer
        return numer.get(numer.ring.zero_monom, QQ.zero)

    def to_fraction(self) -> Fraction:
        value = self.constant()
        return Fraction(int(value.numerator), int(value.denominator))

    def diff(self, index: int) -> 'RingElement':
        """Partial derivative with respect to the ``index``-th variable."""
        if self.ring.is_scalar:
            return self.ring.zero
        field = self.ring.field
        return RingElement(self.ring, self.value.diff(field.gens[index]))

    @property
    def numerator(self):
        return self.value.numer

    @property
    def denominator(self):
        return self.value.denom

    def __eq__(self, other) -> bool:
        if not isinstance(other, (RingElement, int, Fraction)):
            return NotImplemented
        try:
            a, b = self._unify(other)
        except RingMismatchError:
            return False
        return a.value == b.value

    def __ne__(self, other) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self) -> int:
        if self.is_constant:
            return hash(self.to_fraction())
        return hash((self.ring.variables, self.value))

    def __str__(self) -> str:
        if self.ring.is_scalar:
            return qq_to_str(self.value)
        variables = self.ring.variables
        numer = _render_polynomial(self.value.numer, variables)
        if self.is_polynomial:
            return numer
        denom = _render_polynomial(self.value.denom, variables)
        if len(self.value.numer) > 1:
            numer = f"({numer})"
        # a bare x^k needs no parentheses; x*y would reparse as (1/x)*y
        monoms = self.value.denom.monoms()
        if len(monoms) > 1 or sum(1 for power in monoms[0] if power) > 1:
            denom = f"({denom})"
        return f"{numer}/{denom}"

    def __repr__(self) -> str:
        return f"RingElement({self.ring}, {self})"


class RingEndomorphism:
    """Substitution endomorphism x_i -> p_i with a declared inverse x_i -> q_i.

    Both images are polynomials. Construction checks that each composition
    fixes every variable, so the map is an automorphism of the polynomial
    ring and extends to the fraction field.
    """

    def __init__(self, ring: CoefficientRing, images: Sequence = (),
                 inverse_images: Optional[Sequence] = None):
        self.ring = ring.polynomial_ring()
        self.images = tuple(self._as_polynomial(p) for p in images)
        if inverse_images is None:
            inverse_images = images if self._is_identity_list(self.images) else None
        if inverse_images is None:
            raise InvalidStructureError("A non-identity substitution needs a declared inverse")
        self.inverse_images = tuple(self._as_polynomial(p) for p in inverse_images)
        if len(self.images) != ring.ngens or len(self.inverse_images) != ring.ngens:
            raise InvalidStructureError(
                f"Substitution needs one image per variable ({ring.ngens})")
        self._validate()

    def _as_polynomial(self, value) -> RingElement:
        element = self.ring(value)
        if not element.is_polynomial:
            raise InvalidStructureError(f"Substitution image {element} is not a polynomial")
        return element

    def _is_identity_list(self, images) -> bool:
        return all(img == gen for img, gen in zip(images, self.ring.gens()))

    @classmethod
    def identity(cls, ring: CoefficientRing) -> 'RingEndomorphism':
        gens = ring.gens() if not ring.is_scalar else []
        return cls(ring, gens, gens)

    @staticmethod
    def _substitute(value: RingElement, images: Tuple[RingElement, ...]) -> RingElement:
        ring = value.ring
        if ring.is_scalar:
            return value
        field = ring.field
        pairs = list(zip(field.ring.gens, [img.value.numer for img in images]))
        numer = value.value.numer.compose(pairs)
        denom = value.value.denom.compose(pairs)
        return RingElement(ring, field.new(numer, denom))

    def _validate(self) -> None:
        for i, gen in enumerate(self.ring.gens()):
            there_and_back = self._substitute(self.inverse_images[i], self.images)
            back_and_there = self._substitute(self.images[i], self.inverse_images)
            if there_and_back != gen or back_and_there != gen:
                raise InvalidStructureError(
                    f"Declared inverse does not invert the substitution on "
                    f"{self.ring.variables[i]}", entry=(i,))

    def _check_ring(self, f: RingElement) -> None:
        if not f.ring.is_scalar and f.ring.variables != self.ring.variables:
            raise RingMismatchError(f"{f} is not in {self.ring}")

    def __call__(self, f: RingElement) -> RingElement:
        """Apply phi*: substitute then normalize."""
        self._check_ring(f)
        return self._substitute(f, self.images)

    def apply_inverse(self, f: RingElement) -> RingElement:
        self._check_ring(f)
        return self._substitute(f, self.inverse_images)

    def inverse(self) -> 'RingEndomorphism':
        return RingEndomorphism(self.ring, self.inverse_images, self.images)

    def power(self, exponent: int):
        """Callable applying the endomorphism ``exponent`` times (negative: inverse)."""
        def apply(f: RingElement) -> RingElement:
            step = self if exponent >= 0 else self.inverse()
            for _ in range(abs(exponent)):
                f = step(f)
            return f
        return apply

    @property
    def is_identity(self) -> bool:
        return self._is_identity_list(self.images)

    def __eq__(self, other) -> bool:
        return (isinstance(other, RingEndomorphism) and
                self.ring.variables == other.ring.variables and
                self.images == other.images)

    def __hash__(self) -> int:
        return hash((self.ring.variables, self.images))

    def describe(self) -> str:
        if self.ring.is_scalar or self.is_identity:
            return 'id'
        return ', '.join(f"{name} -> {img}" for name, img in zip(self.ring.variables, self.images))


@dataclass(frozen=True)
class TwistedDerivation:
    """(phi*, phi*)-derivation X = phi* o D with D = sum_i q_i d/dx_i."""
    endomorphism: RingEndomorphism
    coefficients: Tuple[RingElement, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'coefficients', tuple(self.coefficients))
        if len(self.coefficients) != self.endomorphism.ring.ngens:
            raise InvalidStructureError(
                f"Twisted derivation needs {self.endomorphism.ring.ngens} coefficients, "
                f"got {len(self.coefficients)}")

    @classmethod
    def zero(cls, endomorphism: RingEndomorphism) -> 'TwistedDerivation':
        ring = endomorphism.ring
        return cls(endomorphism, tuple(ring.zero for _ in range(ring.ngens)))

    @property
    def ring(self) -> CoefficientRing:
        return self.endomorphism.ring

    @property
    def is_zero(self) -> bool:
        return all(q.is_zero for q in self.coefficients)

    def untwisted(self, f: RingElement) -> RingElement:
        """The ordinary derivation D(f)."""
        result = f.ring.zero
        for i, q in enumerate(self.coefficients):
            if q:
                result = result + q * f.diff(i)
        return result

    def __call__(self, f: RingElement) -> RingElement:
        return self.endomorphism(self.untwisted(f))

    @classmethod
    def combination(cls, weights: Iterable[RingElement],
                    derivations: Sequence['TwistedDerivation'],
                    endomorphism: RingEndomorphism) -> 'TwistedDerivation':
        """sum_k w_k X_k, using w * phi*(D f) = phi*(phi*^{-1}(w) D f)."""
        ring = endomorphism.ring
        totals = [ring.zero for _ in range(ring.ngens)]
        for weight, derivation in zip(weights, derivations):
            if not weight:
                continue
            pulled = endomorphism.apply_inverse(weight)
            for i, q in enumerate(derivation.coefficients):
                if q:
                    totals[i] = totals[i] + pulled * q
        return cls(endomorphism, tuple(totals))

    def leibniz_residual(self, f: RingElement, g: RingElement) -> RingElement:
        phi = self.endomorphism
        return self(f * g) - self(f) * phi(g) - phi(f) * self(g)

    def describe(self) -> str:
        if self.is_zero:
            return '0'
        terms = [f"({q})*d/d{name}" for q, name in zip(self.coefficients, self.ring.variables) if q]
        prefix = '' if self.endomorphism.is_identity else 'phi* o '
        return prefix + ' + '.join(terms)


def ring_ops(a: RingElement, b: RingElement, op: str) -> RingElement:
    """Apply ``op`` ('+', '-', '*', '/') to two ring elements.

    Raises:
        ZeroDivisionError: on division by the zero element.
        RingMismatchError: when no common ring exists.
    """
    if op == '+':
        return a + b
    if op == '-':
        return a - b
    if op == '*':
        return a * b
    if op == '/':
        return a / b
    raise ValueError(f"Unknown ring operation '{op}'")


def apply_endomorphism(sigma: RingEndomorphism, f: RingElement) -> RingElement:
    return sigma(f)


def apply_twisted_derivation(derivation: TwistedDerivation, f: RingElement) -> RingElement:
    return derivation(f)
