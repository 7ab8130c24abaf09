import unittest
import sys
import os
import json
import shutil
import tempfile

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from click.testing import CliRunner

from homalgebroid.cli import EXIT_FAIL, EXIT_PARSE, EXIT_PASS, EXIT_USAGE, cli
from homalgebroid.config import load_config
from homalgebroid.fixtures import fixture_document, fixture_names, fixture_text, write_fixture
from homalgebroid.report import REPORT_FORMAT
from homalgebroid.structure_file import parse_structure


class TestCLI(unittest.TestCase):
    """Exit codes and outputs of the homalgebroid command."""

    def setUp(self):
        self.runner = CliRunner()
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def example(self, name):
        path = os.path.join(self.tmp, f'{name}.json')
        write_fixture(name, path)
        return path

    def document(self, filename, document):
        path = os.path.join(self.tmp, filename)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(document, f)
        return path

    def invoke(self, *args):
        return self.runner.invoke(cli, list(args), obj={})

    def test_check_passes(self):
        """A valid structure exits 0 with a PASS verdict."""
        result = self.invoke('check', self.example('rank2_affine'))
        self.assertEqual(result.exit_code, EXIT_PASS, result.output)
        self.assertIn('Verdict: PASS', result.stdout)

    def test_check_fails(self):
        """A failing law exits 1."""
        result = self.invoke('check', self.example('double_sheared_mutant'))
        self.assertEqual(result.exit_code, EXIT_FAIL)
        self.assertIn('[FAIL] parakahler.parallel', result.stdout)

    def test_only_selects_checks(self):
        """--only runs just the named checks."""
        path = self.example('heisenberg_hom')
        result = self.invoke('check', path, '--only', 'homliealgebra,subalgebroid', '--json', '-')
        self.assertEqual(result.exit_code, EXIT_PASS)
        names = [entry['name'] for entry in json.loads(result.stdout)['checks']]
        self.assertTrue(all(name.startswith(('homliealgebra.', 'subalgebroid.')) for name in names))
        self.assertIn('subalgebroid.bracket_closed', names)

    def test_exterior_covers_every_bracket_degree(self):
        """On a rank-4 structure the Schouten properties are checked up to degree 4."""
        path = self.example('double_zero_poisson')
        result = self.invoke('check', path, '--only', 'exterior', '--json', '-')
        self.assertEqual(result.exit_code, EXIT_PASS, result.output)
        entries = {entry['name']: entry for entry in json.loads(result.stdout)['checks']}
        for law in ('graded_antisymmetry', 'graded_leibniz'):
            entry = entries[f'exterior.schouten.{law}']
            self.assertEqual(entry['status'], 'pass')
            self.assertEqual(entry['detail'], 'bracket degrees up to 4')

    def test_verdict_and_phase_space_are_logged(self):
        """The CLI logs the verdict and the phase-space write at INFO."""
        path = self.example('rank2_affine')
        output = os.path.join(self.tmp, 'phase.json')
        with self.assertLogs('homalgebroid', level='INFO') as logs:
            self.assertEqual(self.invoke('check', path, '--only', 'homliealgebra').exit_code, EXIT_PASS)
            self.assertEqual(self.invoke('phase-space', path, '-o', output).exit_code, EXIT_PASS)
        self.assertTrue(any('rank2_affine: verdict pass' in line for line in logs.output))
        self.assertTrue(any('written to' in line and 'phase.json' in line for line in logs.output))

    def test_unknown_check(self):
        """An unknown check name is a usage error."""
        result = self.invoke('check', self.example('rank2_affine'), '--only', 'octonionic')
        self.assertEqual(result.exit_code, EXIT_USAGE)

    def test_missing_attachment(self):
        """Asking for a check whose attachment is absent exits 2."""
        result = self.invoke('check', self.example('heisenberg_hom'), '--only', 'metric')
        self.assertEqual(result.exit_code, EXIT_USAGE)

    def test_parse_error(self):
        """Syntax errors exit 3."""
        path = os.path.join(self.tmp, 'broken.json')
        with open(path, 'w', encoding='utf-8') as f:
            f.write('{"format": "homalgebroid/1",')
        result = self.invoke('check', path)
        self.assertEqual(result.exit_code, EXIT_PARSE)

    def test_construction_error(self):
        """A singular twist is rejected at construction and exits 3."""
        document = fixture_document('rank2_affine')
        document['bundle']['Phi'] = [['1', '1'], ['1', '1']]
        result = self.invoke('check', self.document('singular.json', document))
        self.assertEqual(result.exit_code, EXIT_PARSE)

    def test_json_report_is_deterministic(self):
        """Same file and seed give byte-identical JSON."""
        path = self.example('poly_rank1_qscale')
        first = self.invoke('check', path, '--seed', '5', '--json', '-')
        second = self.invoke('check', path, '--seed', '5', '--json', '-')
        self.assertEqual(first.exit_code, EXIT_PASS)
        self.assertEqual(first.stdout, second.stdout)
        report = json.loads(first.stdout)
        self.assertEqual(report['format'], REPORT_FORMAT)
        self.assertEqual(report['seed'], 5)
        self.assertEqual(report['verdict'], 'pass')
        self.assertNotIn('timings', report)

    def test_json_file_and_timings(self):
        """--json PATH writes the report next to the text output."""
        out = os.path.join(self.tmp, 'report.json')
        result = self.invoke('check', self.example('abelian_n2'), '--json', out, '--timings')
        self.assertEqual(result.exit_code, EXIT_PASS)
        self.assertIn('time metric', result.stdout)
        with open(out, 'r', encoding='utf-8') as f:
            report = json.load(f)
        self.assertIn('metric', report['timings'])

    def test_seed_precedence(self):
        """The CLI seed beats the file's seed, which beats the configured one."""
        document = fixture_document('rank2_affine')
        seeded = self.document('seeded.json', dict(document, seed=7))
        plain = self.document('plain.json', document)
        args = ('--only', 'homliealgebra', '--json', '-')
        self.assertEqual(json.loads(self.invoke('check', seeded, *args).stdout)['seed'], 7)
        self.assertEqual(json.loads(self.invoke('check', seeded, '--seed', '9', *args).stdout)['seed'], 9)
        self.assertEqual(json.loads(self.invoke('check', plain, *args).stdout)['seed'],
                         load_config().verification.default_seed)

    def test_phase_space(self):
        """phase-space writes a rank-2n structure that checks clean."""
        out = os.path.join(self.tmp, 'phase.json')
        result = self.invoke('phase-space', self.example('rank2_affine'), '-o', out)
        self.assertEqual(result.exit_code, EXIT_PASS, result.output)
        self.assertIn('rank 4', result.stdout)
        sf = parse_structure(out)
        self.assertEqual(sf.structure.rank, 4)
        self.assertEqual(sf.attachments(), ['symplectic'])
        checked = self.invoke('check', out, '--only', 'homliealgebroid,symplectic')
        self.assertEqual(checked.exit_code, EXIT_PASS, checked.output)

    def test_phase_space_precondition(self):
        """A declared connection that is not a representation exits 1."""
        document = fixture_document('heisenberg_hom')
        document['connection'] = [[2, 2, 1, '1']]
        out = os.path.join(self.tmp, 'phase.json')
        result = self.invoke('phase-space', self.document('bad.json', document), '-o', out)
        self.assertEqual(result.exit_code, EXIT_FAIL)
        self.assertFalse(os.path.exists(out))

    def test_phase_space_needs_connection(self):
        """Without a metric or connection there is nothing to extend by."""
        out = os.path.join(self.tmp, 'phase.json')
        result = self.invoke('phase-space', self.example('heisenberg_hom'), '-o', out)
        self.assertEqual(result.exit_code, EXIT_USAGE)

    def test_describe(self):
        """describe prints the bracket table and attachments."""
        result = self.invoke('describe', self.example('heisenberg_hom'))
        self.assertEqual(result.exit_code, EXIT_PASS)
        self.assertIn('heisenberg_hom: lie kind, rank 3', result.stdout)
        self.assertIn('[e1,e2] = e3', result.stdout)
        self.assertIn('attachments: subalgebroid', result.stdout)

    def test_examples_list(self):
        """Every builtin example is listed."""
        result = self.invoke('examples', 'list')
        self.assertEqual(result.exit_code, EXIT_PASS)
        for name in fixture_names():
            self.assertIn(name, result.stdout)

    def test_examples_write(self):
        """examples write reproduces the builtin document."""
        out = os.path.join(self.tmp, 'foliation.json')
        result = self.invoke('examples', 'write', 'foliation_block', '-o', out)
        self.assertEqual(result.exit_code, EXIT_PASS)
        with open(out, 'r', encoding='utf-8') as f:
            self.assertEqual(f.read(), fixture_text('foliation_block'))
        printed = self.invoke('examples', 'write', 'abelian_n2')
        self.assertEqual(printed.stdout, fixture_text('abelian_n2'))

    def test_examples_write_unknown(self):
        """Unknown example names are usage errors."""
        result = self.invoke('examples', 'write', 'octonions')
        self.assertEqual(result.exit_code, EXIT_USAGE)


if __name__ == '__main__':
    unittest.main()
