"""Tests for the cut-set bounds and constant-gap expressions"""

import math
import os
import sys
import unittest

# Add the project root to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../../../')))

from relay_coding.cutset import (
    cutset_bound_relaxed,
    cutset_df_single_opt,
    cutset_exact,
    cutset_exact_search,
    describe_cuts,
    relaxed_cut_terms,
)
from relay_coding.exceptions import ConfigurationError
from relay_coding.gap_analysis import (
    VERIFY_TOL,
    gap_df_single,
    gap_empirical,
    gap_mnnc_delta1,
    gap_mnnc_delta2,
    gap_nnc_constant,
    stated_mnnc_constant,
)
from relay_coding.network_model import independent_inputs, validate_network
from relay_coding.pydantic_models import CompressionConfig


class TestSingleRelayGap(unittest.TestCase):
    """DF gap of the single-relay channel"""

    def test_reference_point(self):
        """g1=2, g2=g3=1: analytic gap C(1/4)"""
        report = gap_df_single(2.0, 1.0, 1.0)
        self.assertAlmostEqual(report.analytic_gap, 0.5 * math.log2(1.25), places=12)
        self.assertTrue(report.verified)
        self.assertGreaterEqual(report.empirical_gap, -1e-12)
        self.assertEqual(report.bound_formula_id, "df_single")
        self.assertIn(0, report.betas)

    def test_no_direct_link(self):
        """Without the direct link DF meets the cut-set bound"""
        report = gap_df_single(2.0, 1.0, 0.0)
        self.assertEqual(report.analytic_gap, 0.0)
        self.assertAlmostEqual(report.empirical_gap, 0.0, places=12)

    def test_strong_source_relay(self):
        """The gap vanishes as the source-relay link grows"""
        report = gap_df_single(100.0, 1.0, 1.0)
        self.assertLess(report.empirical_gap, 1e-3)
        self.assertTrue(report.verified)

    def test_grid_of_gains(self):
        """Empirical gap stays under the analytic one"""
        for g1 in (0.5, 1.0, 3.0):
            for g3 in (0.2, 1.0, 2.0):
                with self.subTest(g1=g1, g3=g3):
                    report = gap_df_single(g1, 1.0, g3, step=1e-2)
                    self.assertLessEqual(report.empirical_gap, report.analytic_gap + VERIFY_TOL)

    def test_zero_source_relay_gain(self):
        """g1 = 0 leaves the analytic bound undefined"""
        with self.assertRaises(ConfigurationError):
            gap_df_single(0.0, 1.0, 1.0)


class TestGapConstants(unittest.TestCase):
    """Gain-independent constants"""

    def test_nnc_constant(self):
        """0.63(N+2)"""
        for n, expected in [(0, 1.26), (1, 1.89), (4, 3.78)]:
            with self.subTest(n=n):
                self.assertAlmostEqual(gap_nnc_constant(n), expected, places=12)
        with self.assertRaises(ConfigurationError):
            gap_nnc_constant(-1)

    def test_stated_constant(self):
        """0.5N + 0.7"""
        self.assertAlmostEqual(stated_mnnc_constant(2), 1.7, places=12)

    def test_delta1(self):
        """Gain-independent term"""
        self.assertAlmostEqual(gap_mnnc_delta1(0, ()), 1.0, places=12)
        self.assertAlmostEqual(gap_mnnc_delta1(2, ()), 2.0, places=12)
        self.assertGreaterEqual(gap_mnnc_delta1(2, {1, 2}), gap_mnnc_delta1(2, ()))
        with self.assertRaises(ConfigurationError):
            gap_mnnc_delta1(2, {3})

    def test_delta2(self):
        """Gain-dependent term of a DF relay"""
        network = validate_network({"gains": [[1.0, 0.0], [1.0, 1.0]]})
        inputs = independent_inputs(network)
        self.assertAlmostEqual(gap_mnnc_delta2(network, inputs, ()), 0.5 * math.log2(1.5), places=12)
        self.assertEqual(gap_mnnc_delta2(network, inputs, {1}), 0.0)


class TestCutSet(unittest.TestCase):
    """Exact and relaxed cut-set bounds"""

    def setUp(self):
        self.network = validate_network({"gains": [[1.5, 0.0, 0.8], [1.2, 0.7, 0.0], [0.9, 1.1, 1.3]]})

    def test_exact_search_dominates_independent(self):
        """Optimizing the correlation can only raise the exact bound"""
        fixed = cutset_exact(self.network, independent_inputs(self.network))
        searched, betas = cutset_exact_search(self.network, (), step=0.1, restarts=1)
        self.assertGreaterEqual(searched + 1e-12, fixed)
        self.assertEqual(set(betas), {0, 1, 2})

    def test_relaxed_cuts(self):
        """Relaxed cuts range over V^c ⊆ S and carry the penalty"""
        terms = relaxed_cut_terms(self.network, independent_inputs(self.network), {2})
        self.assertEqual(set(terms), {frozenset({1}), frozenset({1, 2})})
        self.assertGreater(min(terms.values()), 1.0)
        labels = describe_cuts(terms)
        self.assertIn("cut[S={1}]", labels)

    def test_relaxed_rejects_complex(self):
        """Complex networks have no relaxed bound"""
        network = validate_network({"gains": [[[1.0, 1.0], 0.0], [1.0, 1.0]]})
        with self.assertRaises(ConfigurationError):
            cutset_bound_relaxed(network, (), step=0.5)

    def test_single_relay_opt(self):
        """Grid optimum of the closed-form bound"""
        value, beta = cutset_df_single_opt(2.0, 1.0, 1.0, 1.0, 1.0, step=0.01)
        self.assertGreaterEqual(value, 0.5 * math.log2(3.0))
        self.assertTrue(0.0 <= beta <= 1.0)


class TestEmpiricalGap(unittest.TestCase):
    """Relaxed bound against the searched MNNC rate"""

    def test_point_to_point(self):
        """Without relays the gap is at most one bit"""
        network = validate_network({"gains": [[2.0]]})
        report = gap_empirical(network, None, CompressionConfig(), (), step=0.1, restarts=1)
        self.assertLessEqual(report.empirical_gap, 1.0 + 1e-9)
        self.assertTrue(report.verified)
        self.assertAlmostEqual(report.delta1, 1.0, places=12)
        self.assertEqual(report.delta2, 0.0)

    def test_two_df_relays(self):
        """Report fields are consistent for two DF relays"""
        network = validate_network({"gains": [[10.0, 0.0, 0.5], [10.0, 0.5, 0.0], [1.0, 1.0, 1.0]]})
        report = gap_empirical(network, None, CompressionConfig.uniform(2), (), step=0.1, restarts=1)
        self.assertGreaterEqual(report.empirical_gap, -1e-9)
        self.assertAlmostEqual(report.analytic_gap, max(report.delta1, report.delta2), places=12)
        self.assertEqual(report.verified, report.empirical_gap <= report.analytic_gap + VERIFY_TOL)
        self.assertAlmostEqual(report.nnc_constant, 2.52, places=12)
        self.assertAlmostEqual(report.stated_constant, 1.7, places=12)
        self.assertIn("rate", report.per_subset_terms)
        self.assertEqual(set(report.betas), {0, 1, 2})


if __name__ == '__main__':
    unittest.main()
