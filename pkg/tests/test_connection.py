import unittest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from homalgebroid.algebroid import Section, restrict
from homalgebroid.connection import (FLAT, SOLVE, check_left_symmetric_connection,
                                     check_representation, dual_representation,
                                     left_symmetric_connection, levi_civita,
                                     lie_derivative_representation, restrict_connection,
                                     verify_left_symmetric_connection, verify_levi_civita)
from homalgebroid.errors import DegenerateError, InvalidStructureError
from homalgebroid.fixtures import load_fixture
from homalgebroid.report import FAIL, INFO, PASS
from homalgebroid.sampling import Sampler

METRIC_FIXTURES = ('abelian_n2', 'rank2_affine', 'poly_rank1_qscale', 'double_zero_poisson',
                   'double_sheared_mutant')
SYMPLECTIC_FIXTURES = ('abelian_n2', 'rank2_affine', 'double_zero_poisson')


class TestLeviCivita(unittest.TestCase):
    """The hom-Levi-Civita connection of a metric."""

    def setUp(self):
        self.sampler = Sampler(2024)

    def test_fixtures_verify(self):
        """The solved connection is torsion free and metric compatible."""
        for name in METRIC_FIXTURES:
            sf = load_fixture(name)
            nabla = levi_civita(sf.structure, sf.metric)
            report = verify_levi_civita(sf.structure, sf.metric, nabla, self.sampler)
            with self.subTest(structure=name):
                self.assertTrue(report.passed, report.render_text())

    def test_affine_values(self):
        """rank2_affine: nabla_e1 e1 = -e1, nabla_e1 e2 = e2, the rest vanish."""
        sf = load_fixture('rank2_affine')
        S = sf.structure
        nabla = levi_civita(S, sf.metric)
        e1, e2 = S.basis_sections()
        self.assertEqual(nabla(e1, e1), -e1)
        self.assertEqual(nabla(e1, e2), e2)
        self.assertTrue(nabla(e2, e1).is_zero)
        self.assertTrue(nabla(e2, e2).is_zero)

    def test_polynomial_values(self):
        """Over QQ[x] with metric 1/x^2: nabla_e1 e1 = -1/(8x) e1."""
        sf = load_fixture('poly_rank1_qscale')
        nabla = levi_civita(sf.structure, sf.metric)
        x = sf.ring.gen(0)
        self.assertEqual(nabla.table[0][0], Section([-1 / (8 * x)]))

    def test_mutant_moves_plus_into_minus(self):
        """In the sheared double nabla_e3 e1 = 1/4 e4."""
        sf = load_fixture('double_sheared_mutant')
        S = sf.structure
        nabla = levi_civita(S, sf.metric)
        self.assertEqual(nabla(S.basis(2), S.basis(0)), S.basis(3).scaled(S.ring(1) / 4))

    def test_uniqueness_under_perturbation(self):
        """Any change of one Christoffel coefficient breaks torsion or compatibility."""
        chooser = Sampler(99).for_check('perturb')
        for name in METRIC_FIXTURES:
            sf = load_fixture(name)
            S = sf.structure
            nabla = levi_civita(S, sf.metric)
            for trial in range(20):
                i, a, k = (int(chooser.rng.integers(0, S.rank)) for _ in range(3))
                delta = chooser.constant(nonzero=True)
                report = verify_levi_civita(S, sf.metric, nabla.perturbed(i, a, k, delta), self.sampler)
                with self.subTest(structure=name, trial=trial, entry=(i, a, k)):
                    self.assertFalse(report.passed)

    def test_degenerate_metric(self):
        """A singular metric has no Levi-Civita connection."""
        S = load_fixture('abelian_n2').structure
        with self.assertRaises(DegenerateError):
            levi_civita(S, [[1, 0], [0, 0]])


class TestLeftSymmetricConnection(unittest.TestCase):
    """The connection nabla^a defined by a symplectic form."""

    def setUp(self):
        self.sampler = Sampler(77)

    def test_routes_agree(self):
        """Solving the defining identity and conjugating by omega-flat give the same table."""
        for name in SYMPLECTIC_FIXTURES:
            sf = load_fixture(name)
            solved = left_symmetric_connection(sf.structure, sf.symplectic, SOLVE)
            flat = left_symmetric_connection(sf.structure, sf.symplectic, FLAT)
            with self.subTest(structure=name):
                self.assertTrue(solved.same_table(flat))

    def test_affine_values(self):
        """rank2_affine: omega(nabla_X Y, Z) = -omega(Y, [X, Z])."""
        sf = load_fixture('rank2_affine')
        S = sf.structure
        nabla = left_symmetric_connection(S, sf.symplectic)
        e1, e2 = S.basis_sections()
        self.assertEqual(nabla(e1, e1), -e1)
        self.assertTrue(nabla(e1, e2).is_zero)
        self.assertEqual(nabla(e2, e1), -e2)
        self.assertTrue(nabla(e2, e2).is_zero)

    def test_identities(self):
        """Defining, torsion, bracket and flatness identities plus left-symmetry."""
        for name in SYMPLECTIC_FIXTURES:
            sf = load_fixture(name)
            report = check_left_symmetric_connection(sf.structure, sf.symplectic, self.sampler)
            with self.subTest(structure=name):
                self.assertTrue(report.passed, report.render_text())
                for law in ('defining_identity', 'torsion_identity', 'bracket_identity',
                            'flatness_identity', 'route_agreement', 'product_identity'):
                    self.assertEqual(report.get(f'leftsymmetric.{law}').status, PASS)
                self.assertEqual(report.get('leftsymmetric.bracket_identity_isolated').status, INFO)

    def test_mutated_connection_fails(self):
        """Shifting one coefficient breaks the defining identity."""
        sf = load_fixture('rank2_affine')
        nabla = left_symmetric_connection(sf.structure, sf.symplectic).perturbed(0, 0, 0, 1)
        report = verify_left_symmetric_connection(sf.structure, sf.symplectic, nabla, self.sampler)
        entry = report.get('leftsymmetric.defining_identity')
        self.assertEqual(entry.status, FAIL)
        self.assertEqual(entry.witness, ['e1', 'e1', 'e2'])
        self.assertFalse(report.passed)

    def test_unknown_route(self):
        """Only the solve and flat routes exist."""
        sf = load_fixture('rank2_affine')
        with self.assertRaises(ValueError):
            left_symmetric_connection(sf.structure, sf.symplectic, 'guess')

    def test_degenerate_form(self):
        """A zero form cannot define the connection."""
        S = load_fixture('rank2_affine').structure
        with self.assertRaises(DegenerateError):
            left_symmetric_connection(S, [[0, 0], [0, 0]])


class TestRepresentations(unittest.TestCase):
    """Adjoint, coadjoint and restricted representations."""

    def setUp(self):
        self.sampler = Sampler(5)

    def test_adjoint_and_coadjoint(self):
        """L and its dual are representations."""
        for name in ('heisenberg_hom', 'poly_rank1_qscale', 'double_sheared_mutant', 'foliation_block'):
            S = load_fixture(name).structure
            adjoint = lie_derivative_representation(S)
            with self.subTest(structure=name):
                self.assertTrue(check_representation(S, adjoint, self.sampler).passed)
                coadjoint = dual_representation(S, adjoint)
                report = check_representation(S, coadjoint, self.sampler)
                self.assertTrue(report.passed, report.render_text())

    def test_double_dual(self):
        """Dualizing the adjoint representation twice gives it back."""
        for name in ('heisenberg_hom', 'double_sheared_mutant'):
            S = load_fixture(name).structure
            twice = dual_representation(S, dual_representation(S, lie_derivative_representation(S)))
            basis = S.basis_sections()
            with self.subTest(structure=name):
                for i, x in enumerate(basis):
                    for a, y in enumerate(basis):
                        self.assertEqual(twice.table[i][a], S.bracket(x, y))

    def test_coadjoint_values(self):
        """Heisenberg: <L~_e1 e^3, e2> = -<e^3, [phi^-1 e1, mu^-2 e2]> = -1/18."""
        S = load_fixture('heisenberg_hom').structure
        coadjoint = dual_representation(S, lie_derivative_representation(S))
        self.assertEqual(coadjoint.table[0][2].coords[1], S.ring(-1) / 18)

    def test_broken_representation(self):
        """rank2_affine with nabla_e1 = diag(-1, 1), nabla_e2 = E12: nabla_[e1,e2] != [nabla_e1, nabla_e2]."""
        sf = load_fixture('rank2_affine')
        nabla = levi_civita(sf.structure, sf.metric).perturbed(1, 1, 0, 1)
        report = check_representation(sf.structure, nabla, self.sampler)
        self.assertFalse(report.passed)
        self.assertEqual(report.get('representation.anchor').status, PASS)
        self.assertEqual(report.get('representation.twist').status, PASS)
        self.assertEqual(report.get('representation.bracket').status, FAIL)

    def test_restrict_connection(self):
        """The Levi-Civita connection of rank2_affine preserves span{e1} but not span{e1 + e2}."""
        sf = load_fixture('rank2_affine')
        S = sf.structure
        nabla = levi_civita(S, sf.metric)
        line = restrict(S, [[1, 0]])
        local = restrict_connection(nabla, [[1, 0]], line)
        self.assertEqual(local.table, [[Section([S.ring(-1)])]])
        diagonal = restrict(S, [[1, 1]])
        with self.assertRaises(InvalidStructureError):
            restrict_connection(nabla, [[1, 1]], diagonal)


if __name__ == '__main__':
    unittest.main()
