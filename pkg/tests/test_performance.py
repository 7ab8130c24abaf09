"""Performance checks for the verification runs.

Every builtin example must verify well within interactive latency:
- full default check selection per example
- the para-Kaehler claim suite on the rank-4 doubles
- phase-space construction
"""

import time
import unittest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from homalgebroid.config import load_config
from homalgebroid.connection import levi_civita
from homalgebroid.fixtures import fixture_names, load_fixture
from homalgebroid.parakahler import build_phase_space, check_para_kahler, verify_parakahler_suite
from homalgebroid.runner import run_checks
from homalgebroid.sampling import Sampler
from homalgebroid.timing import CheckTimings


class PerformanceTest(unittest.TestCase):
    """Wall-clock budgets for the builtin examples."""

    def setUp(self):
        self.config = load_config()

    def test_all_examples_under_budget(self):
        """Default checks on every example finish in under 10 seconds in total."""
        timings = CheckTimings()
        start_time = time.time()
        for name in fixture_names():
            run_checks(load_fixture(name), seed=1, config=self.config, timings=timings)
        elapsed = time.time() - start_time

        print(f"All examples: {elapsed:.2f}s")
        for name, seconds in sorted(timings.summary().items(), key=lambda item: -item[1])[:3]:
            print(f"  slowest check {name}: {seconds:.2f}s")

        self.assertLess(elapsed, 10.0)

    def test_parakahler_suite_latency(self):
        """The claim suite on a rank-4 double stays under 2 seconds."""
        sf = load_fixture('double_zero_poisson')
        sampler = Sampler(1, self.config.verification)
        start_time = time.time()
        data, _ = check_para_kahler(sf.structure, sf.metric, sf.product_structure, sf.split, sampler)
        verify_parakahler_suite(data, sampler)
        elapsed = time.time() - start_time

        print(f"Para-Kaehler suite: {elapsed:.2f}s")
        self.assertLess(elapsed, 2.0)

    def test_phase_space_latency(self):
        """Building a phase space is fast next to verifying it."""
        sf = load_fixture('rank2_affine')
        nabla = levi_civita(sf.structure, sf.metric)
        start_time = time.time()
        for _ in range(10):
            build_phase_space(sf.structure, nabla, sampler=Sampler(1))
        elapsed = time.time() - start_time

        print(f"Phase space x10: {elapsed:.2f}s")
        self.assertLess(elapsed, 5.0)


if __name__ == "__main__":
    unittest.main()
