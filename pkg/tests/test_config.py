import unittest
import sys
import os
import json
import tempfile
from unittest.mock import patch

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from homalgebroid.config import DEFAULT_SEED, AppConfig, load_config
from homalgebroid.sampling import Sampler


class TestConfig(unittest.TestCase):
    """config.json loading and environment overrides."""

    def write(self, data):
        handle = tempfile.NamedTemporaryFile('w', suffix='.json', delete=False)
        with handle:
            json.dump(data, handle)
        self.addCleanup(os.remove, handle.name)
        return handle.name

    def test_repository_config(self):
        """The shipped config.json matches the documented defaults."""
        with patch.dict(os.environ, {}, clear=True):
            config = load_config()
        self.assertEqual(config.name, 'homalgebroid')
        self.assertEqual(config.verification.random_batch_size, 25)
        self.assertEqual(config.verification.default_seed, DEFAULT_SEED)
        self.assertEqual(config.verification.coefficient_numerators, (-3, 3))
        self.assertEqual(config.verification.schouten_convention, 'graded')
        self.assertFalse(config.report.include_timings)

    def test_partial_file_and_unknown_keys(self):
        """Missing keys fall back to defaults; unknown keys are ignored."""
        path = self.write({'verification': {'random_batch_size': 4, 'colour': 'blue'},
                           'app_config': {'log_level': 'debug'}})
        with patch.dict(os.environ, {}, clear=True):
            config = load_config(path)
        self.assertEqual(config.verification.random_batch_size, 4)
        self.assertEqual(config.verification.max_random_degree, 2)
        self.assertEqual(config.log_level, 'DEBUG')
        self.assertEqual(config.report.indent, 2)

    def test_missing_file(self):
        """A missing config file yields the dataclass defaults."""
        with patch.dict(os.environ, {}, clear=True):
            config = load_config(os.path.join(tempfile.gettempdir(), 'no-such-homalgebroid.json'))
        self.assertEqual(config.version, AppConfig().version)
        self.assertEqual(config.verification.default_seed, DEFAULT_SEED)

    def test_environment_overrides(self):
        """HOMALGEBROID_* variables beat the file."""
        path = self.write({'verification': {'default_seed': 5, 'random_batch_size': 4}})
        env = {'HOMALGEBROID_SEED': '0x10', 'HOMALGEBROID_BATCH_SIZE': '6',
               'HOMALGEBROID_LOG_LEVEL': 'warning'}
        with patch.dict(os.environ, env, clear=True):
            config = load_config(path)
        self.assertEqual(config.verification.default_seed, 16)
        self.assertEqual(config.verification.random_batch_size, 6)
        self.assertEqual(config.log_level, 'WARNING')

    def test_config_path_from_environment(self):
        """HOMALGEBROID_CONFIG selects another file."""
        path = self.write({'report': {'indent': 4}})
        with patch.dict(os.environ, {'HOMALGEBROID_CONFIG': path}, clear=True):
            config = load_config()
        self.assertEqual(config.report.indent, 4)

    def test_sampler_uses_settings(self):
        """Batch size and coefficient ranges flow into the sampler."""
        path = self.write({'verification': {'random_batch_size': 3,
                                            'coefficient_numerators': [1, 1],
                                            'coefficient_denominators': [2, 2]}})
        with patch.dict(os.environ, {}, clear=True):
            config = load_config(path)
        sampler = Sampler(0, config.verification)
        self.assertEqual(sampler.batch_size, 3)
        self.assertEqual(str(sampler.constant()), '1/2')


if __name__ == '__main__':
    unittest.main()
