"""Seeded random functions and sections for the randomized half of every check."""

import itertools
import zlib
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from homalgebroid.config import VerificationConfig
from homalgebroid.ring import CoefficientRing, RingElement

SEED_MASK = (1 << 64) - 1


def monomials(nvars: int, degree: int) -> List[Tuple[int, ...]]:
    """Exponent vectors of total degree <= ``degree``."""
    return [powers for powers in itertools.product(range(degree + 1), repeat=nvars)
            if sum(powers) <= degree]


class Sampler:
    """Draws exact random data from a numpy Generator.

    Every check gets its own stream via ``for_check`` so that the values a
    check sees do not depend on which other checks ran before it.
    """

    def __init__(self, seed: int, settings: Optional[VerificationConfig] = None,
                 stream: str = ''):
        self.seed = seed & SEED_MASK
        self.settings = settings or VerificationConfig()
        self.stream = stream
        self.rng = np.random.default_rng([self.seed, zlib.crc32(stream.encode('utf-8'))])

    def for_check(self, name: str) -> 'Sampler':
        return Sampler(self.seed, self.settings, name)

    @property
    def batch_size(self) -> int:
        return self.settings.random_batch_size

    @property
    def degree(self) -> int:
        return self.settings.max_random_degree

    def constant(self, nonzero: bool = False) -> Fraction:
        lo, hi = self.settings.coefficient_numerators
        dlo, dhi = self.settings.coefficient_denominators
        while True:
            numerator = int(self.rng.integers(lo, hi + 1))
            denominator = int(self.rng.integers(max(dlo, 1), max(dhi, 1) + 1))
            if numerator or not nonzero:
                return Fraction(numerator, denominator)

    def function(self, ring: CoefficientRing, degree: Optional[int] = None) -> RingElement:
        """Random polynomial of total degree <= ``degree`` (a constant over QQ)."""
        if ring.is_scalar:
            return ring(self.constant())
        degree = self.degree if degree is None else degree
        result = ring.zero
        gens = ring.gens()
        for powers in monomials(ring.ngens, degree):
            coefficient = self.constant()
            if not coefficient:
                continue
            term = ring(coefficient)
            for gen, power in zip(gens, powers):
                if power:
                    term = term * gen ** power
            result = result + term
        return result

    def nonzero_function(self, ring: CoefficientRing, degree: Optional[int] = None) -> RingElement:
        while True:
            value = self.function(ring, degree)
            if value:
                return value

    def vector(self, ring: CoefficientRing, length: int,
               degree: Optional[int] = None) -> List[RingElement]:
        return [self.function(ring, degree) for _ in range(length)]

    def vectors(self, ring: CoefficientRing, length: int, count: Optional[int] = None,
                degree: Optional[int] = None) -> List[List[RingElement]]:
        count = self.batch_size if count is None else count
        return [self.vector(ring, length, degree) for _ in range(count)]

    def choice(self, options: Sequence):
        return options[int(self.rng.integers(0, len(options)))]
