"""Tests for composite sampling, decision regions, outage and ε-capacity"""

import math
import os
import sys
import unittest

import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../../../')))

from relay_coding.composite import channel
from relay_coding.composite.outage import (
    eps_capacity_bounds,
    error_lower_bound,
    network_rate_table,
    optimize_decision_region,
    outage_cf,
    outage_df,
    outage_direct,
    outage_scs_network,
    NETWORK_PILOT,
    outage_scs_relay,
    scheme_outage,
    select_relay_parameters,
    single_as_network,
)
from relay_coding.composite.regions import RegionContext, cf_masks, mask_of, region_registry, set_of
from relay_coding.composite.sampler import BLOCK, draw_theta, pilot_sample, sample_theta, splitmix64, table_sample
from relay_coding.exceptions import BracketError, ConfigurationError
from relay_coding.pydantic_models import (
    CompositeModel,
    DecisionRegion,
    MonteCarloConfig,
    SchemeParams,
    TableEntry,
)


def fixed_model(*entries):
    """Finite-table single-relay model from (g1, g2, g3, probability) rows"""
    table = [TableEntry(theta=[(g1, 0.0), (g2, 0.0), (g3, 0.0)], probability=p) for g1, g2, g3, p in entries]
    return CompositeModel(family="finite_table", table=table)


class TestSampler(unittest.TestCase):
    """Deterministic chunked sampling"""

    def setUp(self):
        self.model = CompositeModel(variance=2.0)

    def test_splitmix_reference(self):
        """splitmix64 first output for state 0"""
        self.assertEqual(splitmix64(0), 0xE220A8397B1DCDAF)

    def test_deterministic(self):
        """Same seed and range give the same draws"""
        first = sample_theta(self.model, 7, 0, 100)
        second = sample_theta(self.model, 7, 0, 100)
        np.testing.assert_array_equal(first.theta, second.theta)
        other = sample_theta(self.model, 8, 0, 100)
        self.assertFalse(np.array_equal(first.theta, other.theta))

    def test_chunk_invariance(self):
        """Any chunk size or worker count reproduces the stream"""
        whole = draw_theta(self.model, MonteCarloConfig(samples=BLOCK + 500, seed=3))
        for chunk, threads in [(37, 1), (1000, 2)]:
            with self.subTest(chunk=chunk, threads=threads):
                parts = draw_theta(self.model, MonteCarloConfig(samples=BLOCK + 500, seed=3,
                                                                chunk=chunk, threads=threads))
                np.testing.assert_array_equal(parts.theta, whole.theta)
        window = sample_theta(self.model, 3, BLOCK - 50, 200)
        np.testing.assert_array_equal(window.theta, whole.theta[BLOCK - 50:BLOCK + 150])

    def test_second_moment(self):
        """E|g|² matches the configured variance"""
        sample = draw_theta(self.model, MonteCarloConfig(samples=20000, seed=1))
        np.testing.assert_allclose(np.mean(np.abs(sample.theta) ** 2, axis=0), [2.0, 2.0, 2.0], atol=0.1)

    def test_finite_table(self):
        """Table draws come from the table with their indices"""
        model = fixed_model((1.0, 2.0, 3.0, 0.25), (4.0, 5.0, 6.0, 0.75))
        sample = sample_theta(model, 0, 0, 400)
        self.assertTrue(set(np.unique(sample.table_idx)) <= {0, 1})
        np.testing.assert_array_equal(sample.theta[sample.table_idx == 1][:, 0].real,
                                      np.full(np.count_nonzero(sample.table_idx == 1), 4.0))
        self.assertGreater(np.count_nonzero(sample.table_idx == 1), 200)

    def test_network_self_gains(self):
        """Self gains of network draws are zero"""
        model = CompositeModel(layout="network", n_relays=2, power=[1.0, 1.0, 1.0])
        theta = sample_theta(model, 0, 0, 50).theta
        self.assertEqual(theta.shape, (50, 9))
        np.testing.assert_array_equal(theta[:, [1, 5]], 0.0)

    def test_pilot_is_independent(self):
        """Pilot draws use their own stream"""
        config = MonteCarloConfig(samples=100, seed=5)
        pilot = pilot_sample(self.model, config, 100)
        self.assertFalse(np.array_equal(pilot.theta, draw_theta(self.model, config).theta))

    def test_bad_range(self):
        """Negative ranges are rejected"""
        with self.assertRaises(ConfigurationError):
            sample_theta(self.model, 0, -1, 10)
        self.assertEqual(len(sample_theta(self.model, 0, 0, 0)), 0)


class TestRegions(unittest.TestCase):
    """Decision region evaluators"""

    def test_masks(self):
        """CF masks and sets"""
        self.assertEqual(mask_of({1, 3}, 3), 0b101)
        self.assertEqual(set_of(0b110), frozenset({2, 3}))
        with self.assertRaises(ConfigurationError):
            mask_of({4}, 3)

    def test_registry(self):
        """Default families are registered"""
        self.assertEqual(set(region_registry.list_regions()),
                         {"threshold_on_magnitude", "analytic_DF_region", "indexed_partition"})
        with self.assertRaises(ConfigurationError):
            region_registry.get_region("nearest_neighbour")

    def test_analytic_threshold(self):
        """Relay decodes iff log2(1 + β|g|²P) > r"""
        level = math.sqrt(2.0 ** 0.5 - 1.0)
        ctx = RegionContext(n_relays=1, source_gains=np.array([[level - 0.01], [level + 0.01]]), rate=0.5)
        masks = cf_masks(DecisionRegion(family="analytic_DF_region"), ctx)
        np.testing.assert_array_equal(masks, [1, 0])

    def test_threshold_family(self):
        """Below the threshold the relay compresses"""
        ctx = RegionContext(n_relays=2, source_gains=np.array([[0.1, 2.0], [3.0, 0.5]]))
        region = DecisionRegion(family="threshold_on_magnitude", parameters={"thresholds": [1.0, None]})
        np.testing.assert_array_equal(cf_masks(region, ctx), [0b11, 0b10])
        with self.assertRaises(ConfigurationError):
            cf_masks(DecisionRegion(family="threshold_on_magnitude", parameters={"thresholds": [1.0]}), ctx)

    def test_indexed_needs_default_on_continuous(self):
        """A continuous model needs the '*' cell"""
        ctx = RegionContext(n_relays=1, source_gains=np.ones((3, 1)))
        region = DecisionRegion(family="indexed_partition", index={"0": frozenset({1})})
        with self.assertRaises(ConfigurationError):
            cf_masks(region, ctx)
        np.testing.assert_array_equal(cf_masks(DecisionRegion.constant({1}), ctx), [1, 1, 1])


class TestSingleRelayOutage(unittest.TestCase):
    """Outage of DF, CF and selective coding on the single-relay channel"""

    def setUp(self):
        self.model = CompositeModel()
        self.config = MonteCarloConfig(samples=2000, seed=11)
        self.sample = draw_theta(self.model, self.config)

    def test_extremes(self):
        """No outage at rate 0, certain outage at huge rates"""
        for fn in (lambda r: outage_direct(r, self.model, self.config, self.sample),
                   lambda r: outage_df(r, self.model, 0.5, self.config, self.sample),
                   lambda r: outage_cf(r, self.model, self.config, 1.0, self.sample)):
            self.assertEqual(fn(0.0).p_hat, 0.0)
            self.assertEqual(fn(1000.0).p_hat, 1.0)

    def test_constant_regions(self):
        """Threshold 0 is pure DF, an infinite threshold pure CF"""
        r = 1.0
        all_df = DecisionRegion(family="threshold_on_magnitude", parameters={"thresholds": [0.0]})
        all_cf = DecisionRegion(family="threshold_on_magnitude", parameters={"thresholds": [None]})
        scs_df = outage_scs_relay(r, self.model, 0.5, all_df, self.config, nhat=1.0, sample=self.sample)
        scs_cf = outage_scs_relay(r, self.model, 0.5, all_cf, self.config, nhat=1.0, sample=self.sample)
        self.assertEqual(scs_df.p_hat, outage_df(r, self.model, 0.5, self.config, self.sample).p_hat)
        self.assertEqual(scs_cf.p_hat, outage_cf(r, self.model, self.config, 1.0, self.sample).p_hat)

    def test_optimized_threshold_beats_both(self):
        """The searched threshold is no worse than either pure scheme"""
        r = 1.0
        params = SchemeParams(beta=0.5, nhat=1.0)
        region = optimize_decision_region(r, self.model, "threshold_on_magnitude", self.config,
                                          params, sample=self.sample)
        scs = outage_scs_relay(r, self.model, 0.5, region, self.config, nhat=1.0, sample=self.sample)
        df = outage_df(r, self.model, 0.5, self.config, self.sample)
        cf = outage_cf(r, self.model, self.config, 1.0, self.sample)
        self.assertLessEqual(scs.p_hat, min(df.p_hat, cf.p_hat))

    def test_analytic_region_close_to_best(self):
        """Selective coding stays within a few standard errors of the better pure scheme"""
        r = 1.0
        region = optimize_decision_region(r, self.model, "analytic_DF_region", self.config, SchemeParams(beta=0.5))
        scs = outage_scs_relay(r, self.model, 0.5, region, self.config, nhat=1.0, sample=self.sample)
        best = min(outage_df(r, self.model, 0.5, self.config, self.sample).p_hat,
                   outage_cf(r, self.model, self.config, 1.0, self.sample).p_hat)
        self.assertLessEqual(scs.p_hat, best + 3.0 * scs.std_err + 1e-12)

    def test_lower_bound_sandwich(self):
        """The cut-set outage lower-bounds every scheme"""
        for r in (0.5, 1.0, 2.0):
            with self.subTest(r=r):
                lower = error_lower_bound(r, self.model, self.config, self.sample).p_hat
                for name in ("df", "cf_partial", "cf_full", "scs_partial", "scs_full", "direct"):
                    params = SchemeParams(scheme=name, beta=0.5, nhat=1.0)
                    self.assertLessEqual(lower, scheme_outage(r, self.model, params, self.config, self.sample).p_hat)

    def test_monotone_in_rate(self):
        """Outage never decreases with the rate"""
        values = [outage_df(r, self.model, 0.5, self.config, self.sample).p_hat for r in np.linspace(0, 4, 9)]
        self.assertEqual(values, sorted(values))

    def test_full_csi_helps(self):
        """Per-draw compression is no worse than the best fixed one"""
        r = 1.0
        full = outage_cf(r, self.model, self.config, "optimal", self.sample).p_hat
        fixed = outage_cf(r, self.model, self.config, "fixed", self.sample).p_hat
        self.assertLessEqual(full, fixed + 3.0 * math.sqrt(0.25 / len(self.sample)))

    def test_csi_checked(self):
        """Unknown CSI modes are rejected"""
        with self.assertRaises(ConfigurationError):
            outage_scs_relay(1.0, self.model, 0.5, DecisionRegion.constant({1}), self.config,
                             csi="none", sample=self.sample)

    def test_indexed_partition(self):
        """Strong source-relay entries decode, weak ones compress"""
        model = fixed_model((1.0, 10.0, 1.0, 0.5), (1.0, 0.0, 1.0, 0.5))
        config = MonteCarloConfig(samples=64, seed=2)
        region = optimize_decision_region(0.3, model, "indexed_partition", config,
                                          SchemeParams(nhat=1.0), sample=draw_theta(model, config))
        self.assertEqual(region.index, {"0": frozenset(), "1": frozenset({1})})


class TestEpsCapacity(unittest.TestCase):
    """Bisection bounds on the ε-capacity"""

    def setUp(self):
        self.model = fixed_model((1.0, 1.0, 1.0, 1.0))
        self.config = MonteCarloConfig(samples=16, seed=0)

    def test_degenerate_channel(self):
        """A deterministic channel pins both bounds"""
        lower, upper = eps_capacity_bounds(0.1, self.model, SchemeParams(scheme="df", beta=1.0), self.config)
        self.assertAlmostEqual(lower, 1.0, places=6)
        self.assertAlmostEqual(upper, math.log2(3.0), places=6)

    def test_bracket_and_eps(self):
        """Bad brackets and ε values are rejected"""
        params = SchemeParams(scheme="df", beta=1.0)
        with self.assertRaises(BracketError):
            eps_capacity_bounds(0.1, self.model, params, self.config, bracket=(5.0, 20.0))
        for eps in (0.0, 1.0, -0.5):
            with self.subTest(eps=eps):
                with self.assertRaises(ConfigurationError):
                    eps_capacity_bounds(eps, self.model, params, self.config)

    def test_fading_bounds_ordered(self):
        """Achievable bound stays under the converse"""
        model = CompositeModel()
        config = MonteCarloConfig(samples=1000, seed=4)
        lower, upper = eps_capacity_bounds(0.1, model, SchemeParams(scheme="df", beta=0.5), config)
        self.assertLessEqual(lower, upper)
        self.assertGreater(upper, 0.0)


def network_table_model(*entries):
    """Finite-table one-relay network from (g_0r, g_0d, g_rd, probability) rows"""
    table = [TableEntry(theta=[(g0r, 0.0), (0.0, 0.0), (g0d, 0.0), (grd, 0.0)], probability=p)
             for g0r, g0d, grd, p in entries]
    return CompositeModel(layout="network", n_relays=1, family="finite_table", table=table)


class TestRelayParameterSelection(unittest.TestCase):
    """N̂ and relay β chosen per θ_r class under partial CSI"""

    def setUp(self):
        # two relay states, each with two destination states
        self.model = network_table_model((1.0, 0.5, 2.0, 0.25), (1.0, 0.2, 0.3, 0.25),
                                         (3.0, 0.5, 2.0, 0.25), (3.0, 1.0, 0.1, 0.25))
        self.params = SchemeParams(beta=0.5, nhat_grid_points=8, beta_grid_points=4)
        self.config = MonteCarloConfig(samples=40, seed=2)
        self.r = 1.0

    def test_default_grids(self):
        """Both relay-side grids default to 32 points"""
        params = SchemeParams()
        self.assertEqual(params.nhat_grid_points, 32)
        self.assertEqual(params.beta_grid_points, 32)

    def test_table_classes(self):
        """Finite tables are classified by their exact relay state"""
        policy = select_relay_parameters(self.r, self.model, self.params, self.config)
        sample, _ = table_sample(self.model)
        np.testing.assert_array_equal(policy.classes(self.model, sample), [0, 0, 1, 1])
        self.assertEqual(policy.nhat.shape, (2, 2))
        grid = np.geomspace(0.01, 100.0, 8)
        for value in policy.nhat.ravel():
            self.assertTrue(np.any(np.isclose(grid, value)))
        self.assertTrue(set(policy.relay_beta.ravel()) <= set(np.linspace(0.0, 1.0, 4)))

    def test_per_class_beats_any_common_choice(self):
        """The per-class N̂ has no more expected CF outage than any single grid value"""
        policy = select_relay_parameters(self.r, self.model, self.params, self.config)
        sample, probs = table_sample(self.model)
        classes = policy.classes(self.model, sample)
        chosen = 0.0
        for cls in (0, 1):
            rows = np.flatnonzero(classes == cls)
            rates = network_rate_table(self.model, sample.subset(rows), self.params, [policy.nhat[cls, 1]])[:, 1]
            chosen += float(np.sum(probs[rows] * (self.r > rates)))
        for nhat in np.geomspace(0.01, 100.0, 8):
            with self.subTest(nhat=nhat):
                rates = network_rate_table(self.model, sample, self.params, [nhat])[:, 1]
                self.assertLessEqual(chosen, float(np.sum(probs * (self.r > rates))) + 1e-12)

    def test_relay_beta_never_worse(self):
        """Moving the DF relay β off its configured value only happens on a gain"""
        policy = select_relay_parameters(self.r, self.model, self.params, self.config)
        sample, probs = table_sample(self.model)
        classes = policy.classes(self.model, sample)
        for cls in (0, 1):
            rows = sample.subset(np.flatnonzero(classes == cls))
            weights = probs[classes == cls]
            base = network_rate_table(self.model, rows, self.params, [policy.nhat[cls, 0]])[:, 0]
            shifted = self.params.model_copy(update={"relay_beta": float(policy.relay_beta[cls, 0])})
            moved = network_rate_table(self.model, rows, shifted, [policy.nhat[cls, 0]])[:, 0]
            with self.subTest(cls=cls):
                self.assertLessEqual(np.sum(weights * (self.r > moved)), np.sum(weights * (self.r > base)) + 1e-12)

    def test_full_csi_not_worse(self):
        """Per-draw search under full CSI is at least as good as the per-class choice"""
        sample = draw_theta(self.model, self.config)
        everyone = DecisionRegion.constant({1})
        partial = outage_scs_network(self.r, self.model, self.params, everyone, self.config, sample=sample)
        full = outage_scs_network(self.r, self.model, self.params, everyone, self.config, csi="full", sample=sample)
        self.assertLessEqual(full.p_hat, partial.p_hat)

    def test_pilot_cells(self):
        """Continuous relay states are split at the pilot median of |g_0r|"""
        model = CompositeModel(layout="network", n_relays=1)
        params = SchemeParams(nhat_grid_points=4, beta_grid_points=2)
        policy = select_relay_parameters(0.5, model, params, self.config)
        pilot = pilot_sample(model, self.config, NETWORK_PILOT)
        classes = policy.classes(model, pilot)
        self.assertEqual(set(classes), {0, 1})
        self.assertLessEqual(abs(int(np.sum(classes == 1)) - int(np.sum(classes == 0))), 1)
        self.assertEqual(policy.nhat.shape, (2, 2))


class TestNetworkOutage(unittest.TestCase):
    """Composite relay networks evaluated through the rate engine"""

    def test_single_relay_embedding(self):
        """The one-relay network reproduces the closed-form rates"""
        model = CompositeModel()
        config = MonteCarloConfig(samples=40, seed=9)
        sample = draw_theta(model, config)
        table = network_rate_table(model, sample, SchemeParams(beta=0.5, relay_beta=0.0), [1.0])
        g1, g2, g3 = channel.split_single(sample.theta)
        np.testing.assert_allclose(table[:, 0], channel.df_rate(g1, g2, g3, 0.5, 1.0, 1.0), atol=1e-8)
        np.testing.assert_allclose(table[:, 1], channel.cf_rate(g1, g2, g3, 1.0, 1.0, 1.0), atol=1e-8)

    def test_embedding_layout(self):
        """Single-relay gains land in the network gain matrix"""
        theta = np.array([[1.0 + 0j, 2.0 + 0j, 3.0 + 0j]])
        np.testing.assert_array_equal(single_as_network(theta), [[2.0, 0.0, 1.0, 3.0]])

    def test_noncoop_outage_not_lower(self):
        """Restricted decoding cannot reduce the outage"""
        model = CompositeModel(layout="network", n_relays=2, power=[1.0, 1.0, 1.0])
        config = MonteCarloConfig(samples=30, seed=1)
        sample = draw_theta(model, config)
        params = SchemeParams(beta=0.5, relay_beta=0.0, nhat=1.0)
        partition = DecisionRegion.constant({2})
        for r in (0.5, 1.5):
            with self.subTest(r=r):
                mnnc = outage_scs_network(r, model, params, partition, config, sample=sample)
                noncoop = outage_scs_network(r, model, params, partition, config, variant="noncoop", sample=sample)
                self.assertGreaterEqual(noncoop.p_hat, mnnc.p_hat)

    def test_threshold_partition_beats_constants(self):
        """Searched thresholds do at least as well as every constant partition"""
        model = CompositeModel(layout="network", n_relays=2, power=[1.0, 1.0, 1.0])
        config = MonteCarloConfig(samples=60, seed=6)
        sample = draw_theta(model, config)
        params = SchemeParams(beta=0.5, relay_beta=0.0, nhat=1.0)
        r = 1.0
        table = network_rate_table(model, sample, params, [1.0])
        region = optimize_decision_region(r, model, "threshold_on_magnitude", config, params, sample=sample)
        searched = outage_scs_network(r, model, params, region, config, sample=sample, table=table).p_hat
        for cf_set in (set(), {1}, {2}, {1, 2}):
            with self.subTest(cf_set=cf_set):
                constant = outage_scs_network(r, model, params, DecisionRegion.constant(cf_set), config,
                                              sample=sample, table=table).p_hat
                self.assertLessEqual(searched, constant)

    def test_network_lower_bound(self):
        """The network cut-set outage lower-bounds pure CF"""
        model = CompositeModel(layout="network", n_relays=1)
        config = MonteCarloConfig(samples=40, seed=3)
        sample = draw_theta(model, config)
        params = SchemeParams(scheme="cf_partial", nhat=1.0)
        for r in (0.5, 1.5):
            with self.subTest(r=r):
                lower = error_lower_bound(r, model, config, sample).p_hat
                self.assertLessEqual(lower, scheme_outage(r, model, params, config, sample).p_hat)


if __name__ == '__main__':
    unittest.main()
