import unittest
import sys
import os
import itertools

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from homalgebroid.algebroid import Section
from homalgebroid.calculus import (GRADED, VERBATIM, Form, Multivector, check_exterior,
                                   check_schouten_properties, differential, exterior_derivative,
                                   lie_derivative_form, lie_derivative_multivector,
                                   schouten_bracket, sort_with_sign)
from homalgebroid.config import VerificationConfig
from homalgebroid.fixtures import load_fixture
from homalgebroid.parakahler import nijenhuis
from homalgebroid.report import INFO, PASS
from homalgebroid.sampling import Sampler
from tests import oracles

STRUCTURES = ['heisenberg_hom', 'rank2_affine', 'foliation_block', 'double_sheared_mutant',
              'poly_rank1_qscale']
SEEDS = range(50)


def random_values(sampler, S, degree):
    """A random degree-``degree`` alternating table, as {increasing tuple: value}."""
    values = {}
    for columns in itertools.combinations(range(S.rank), degree):
        value = sampler.function(S.ring, 1)
        if value:
            values[columns] = value
    return values


def as_dict(tensor):
    return dict(tensor.items())


class TestSignHelpers(unittest.TestCase):
    """Index sorting."""

    def test_sort_with_sign(self):
        """One transposition flips the sign, a repeat gives zero."""
        self.assertEqual(sort_with_sign((2, 0, 1)), ((0, 1, 2), 1))
        self.assertEqual(sort_with_sign((1, 0)), ((0, 1), -1))
        self.assertEqual(sort_with_sign((1, 1)), (None, 0))

    def test_form_matrix_round_trip(self):
        """A 2-form's Gram matrix is read back unchanged."""
        S = load_fixture('rank2_affine').structure
        matrix = [[0, 3], [-3, 0]]
        form = Form.from_matrix(matrix, S.ring)
        self.assertEqual(form.to_matrix(), [[S.ring(x) for x in row] for row in matrix])


class TestOracleAgreement(unittest.TestCase):
    """The calculus agrees with the naive implementations on 50 seeded inputs each."""

    def setUp(self):
        self.structures = [load_fixture(name).structure for name in STRUCTURES]

    def pick(self, seed):
        S = self.structures[seed % len(self.structures)]
        return S, Sampler(seed).for_check('oracle')

    def test_exterior_derivative(self):
        """d^A matches the two-sum formula evaluated naively."""
        for seed in SEEDS:
            S, sampler = self.pick(seed)
            degree = seed % (S.rank + 1)
            values = random_values(sampler, S, degree)
            omega = Form(S.ring, S.rank, degree, values)
            with self.subTest(seed=seed, structure=S.name, degree=degree):
                self.assertEqual(as_dict(exterior_derivative(S, omega)),
                                 oracles.exterior_derivative(S, values, degree))

    def test_lie_derivative_form(self):
        """L_z omega matches the covariant Lie derivative formula."""
        for seed in SEEDS:
            S, sampler = self.pick(seed)
            degree = seed % (S.rank + 1)
            values = random_values(sampler, S, degree)
            z = Section(sampler.vector(S.ring, S.rank, 1))
            omega = Form(S.ring, S.rank, degree, values)
            with self.subTest(seed=seed, structure=S.name, degree=degree):
                self.assertEqual(as_dict(lie_derivative_form(S, z, omega)),
                                 oracles.lie_derivative_form(S, z, values, degree))

    def test_schouten_both_conventions(self):
        """The Schouten bracket matches the naive expansion in both conventions."""
        for seed in SEEDS:
            S, sampler = self.pick(seed)
            p = 1 + seed % S.rank
            q = 1 + (seed // S.rank) % (S.rank - p + 1) if S.rank > 1 else 1
            u_values = random_values(sampler, S, p)
            v_values = random_values(sampler, S, q)
            u = Multivector(S.ring, S.rank, p, u_values)
            v = Multivector(S.ring, S.rank, q, v_values)
            for convention in (GRADED, VERBATIM):
                with self.subTest(seed=seed, structure=S.name, p=p, q=q, convention=convention):
                    self.assertEqual(as_dict(schouten_bracket(S, u, v, convention)),
                                     oracles.schouten(S, u_values, v_values, convention))

    def test_nijenhuis(self):
        """N(X,Y) matches the loop-based computation for random K, X, Y."""
        for seed in SEEDS:
            S, sampler = self.pick(seed)
            K = [sampler.vector(S.ring, S.rank, 0) for _ in range(S.rank)]
            x = Section(sampler.vector(S.ring, S.rank, 1))
            y = Section(sampler.vector(S.ring, S.rank, 1))
            with self.subTest(seed=seed, structure=S.name):
                self.assertEqual(nijenhuis(S, K, x, y), oracles.nijenhuis(S, K, x, y))


class TestCalculus(unittest.TestCase):
    """Worked values and the Schouten properties."""

    def setUp(self):
        self.heisenberg = load_fixture('heisenberg_hom').structure
        self.poly = load_fixture('poly_rank1_qscale').structure

    def test_differential_of_coordinate(self):
        """d x evaluated on e1 is a(e1)(x) = phi*(1) = 1."""
        x = self.poly.ring.gen(0)
        dx = differential(self.poly, x)
        self.assertEqual(dx.component((0,)), 1)
        self.assertEqual(dx.evaluate([Section([x])]), x)

    def test_lie_derivative_of_vector_is_bracket(self):
        """On 1-vectors L_u v = [u, v]."""
        S = self.heisenberg
        e1, e2 = S.basis(0), S.basis(1)
        result = lie_derivative_multivector(S, e1, Multivector.from_section(e2, S.ring))
        self.assertEqual(result, Multivector.from_section(S.bracket(e1, e2), S.ring))

    def test_schouten_bivector(self):
        """[e1, e1^e2] = -[e1,e2] ^ phi(e1) = 2 e1^e3 in the Heisenberg example."""
        S = self.heisenberg
        u = Multivector.wedge_basis(S.ring, 3, (0,))
        v = Multivector.wedge_basis(S.ring, 3, (0, 1))
        expected = Multivector(S.ring, 3, 2, {(0, 2): 2})
        self.assertEqual(schouten_bracket(S, u, v), expected)

    def test_degree_above_rank_is_zero(self):
        """A bracket landing above the rank is the zero multivector."""
        S = load_fixture('rank2_affine').structure
        u = Multivector.wedge_basis(S.ring, 2, (0, 1))
        v = Multivector.wedge_basis(S.ring, 2, (0, 1))
        self.assertEqual(schouten_bracket(S, u, v).degree, 3)
        self.assertTrue(schouten_bracket(S, u, v).is_zero)

    def test_graded_properties_hold(self):
        """Graded antisymmetry and the graded Leibniz rule hold in the graded convention."""
        for name in ('heisenberg_hom', 'rank2_affine', 'foliation_block'):
            S = load_fixture(name).structure
            report = check_schouten_properties(S, GRADED, max_degree=3)
            with self.subTest(structure=name):
                self.assertTrue(report.passed, report.render_text())

    def test_exterior_schouten_degree_defaults_to_rank(self):
        """The exterior check reaches the rank unless a lower cap is configured."""
        S = load_fixture('double_sheared_mutant').structure
        full = check_exterior(S, Sampler(3))
        capped = check_exterior(S, Sampler(3, VerificationConfig(schouten_max_degree=2)))
        for law in ('graded_antisymmetry', 'graded_leibniz'):
            with self.subTest(law=law):
                entry = full.get(f'exterior.schouten.{law}')
                self.assertEqual(entry.status, PASS)
                self.assertEqual(entry.detail, 'bracket degrees up to 4')
                self.assertGreater(entry.cases, capped.get(f'exterior.schouten.{law}').cases)
                self.assertEqual(capped.get(f'exterior.schouten.{law}').detail,
                                 'bracket degrees up to 2')

    def test_degree_three_leibniz_cases(self):
        """Leibniz triples with a degree-3 bracket are part of the rank-3 check."""
        S = self.heisenberg
        two = check_schouten_properties(S, GRADED, max_degree=2).get('schouten.graded_leibniz')
        three = check_schouten_properties(S, GRADED).get('schouten.graded_leibniz')
        self.assertEqual(three.status, PASS)
        # (deg 1, deg 1, deg 2) and permutations add 3 * 3 * 3 * 3 triples
        self.assertEqual(three.cases - two.cases, 81)

    def test_verbatim_breaks_antisymmetry(self):
        """The displayed prefactor breaks graded antisymmetry for p + q odd."""
        report = check_schouten_properties(self.heisenberg, VERBATIM)
        self.assertEqual(report.get('schouten.graded_antisymmetry').status, 'fail')

    def test_exterior_check(self):
        """The exterior check passes, with d^2 reported as information only."""
        for name in ('heisenberg_hom', 'poly_rank1_qscale', 'double_sheared_mutant'):
            report = check_exterior(load_fixture(name).structure, Sampler(7))
            with self.subTest(structure=name):
                self.assertTrue(report.passed, report.render_text())
                self.assertEqual(report.get('exterior.d_squared').status, INFO)
                self.assertEqual(report.get('exterior.schouten.graded_leibniz').status, PASS)


if __name__ == '__main__':
    unittest.main()
