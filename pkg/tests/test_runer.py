"""Tests for the command runners and the command line entry point"""

import contextlib
import io
import json
import math
import os
import sys
import tempfile
import unittest
from pathlib import Path

import pandas as pd

# Add the project root to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../')))

from relay_coding.cli import main
from relay_coding.config import parse_config
from relay_coding.network_model import independent_inputs
from relay_coding.pydantic_models import CompressionConfig
from relay_coding.rate_engine import rate_nnc
from utils.runer import (
    EPSCAP_COLUMNS,
    GAP_COLUMNS,
    OUTAGE_COLUMNS,
    RATE_COLUMNS,
    run_command,
    run_epscap,
    run_gap,
    run_outage,
    run_rate,
)

NETWORK = {"gains": [[2.0, 0.0], [1.0, 1.0]]}

OUTAGE_DOC = {
    "command": "outage",
    "model": {"family": "complex_gaussian"},
    "outage": {"rates": [0.5, 1.0], "schemes": ["df", "cf_partial", "scs_partial"]},
    "mc": {"samples": 300, "seed": 11},
}


class TestRunners(unittest.TestCase):
    """Runners return one table per command"""

    def test_rate_point(self):
        """Single DF point: min of the two cuts"""
        config = parse_config({"command": "rate", "network": NETWORK,
                               "strategy": {"scheme": "mnnc", "betas": [1.0, 0.0]}})
        frame = run_rate(config)
        self.assertEqual(list(frame.columns), RATE_COLUMNS)
        self.assertEqual(len(frame), 1)
        self.assertAlmostEqual(frame["rate_bits"].iloc[0], 0.5 * math.log2(3.0), places=9)

    def test_rate_sweep(self):
        """An nhat sweep reproduces direct NNC evaluations"""
        grid = [0.5, 1.0, 2.0]
        config = parse_config({"command": "rate", "network": NETWORK, "strategy": {"scheme": "nnc"},
                               "sweep": {"parameter": "nhat", "grid": grid}})
        frame = run_rate(config)
        self.assertEqual(list(frame.columns), ["nhat"] + RATE_COLUMNS)
        network = config.network.build()
        for value, rate in zip(grid, frame["rate_bits"]):
            with self.subTest(nhat=value):
                expected = rate_nnc(network, independent_inputs(network), CompressionConfig.uniform(1, value))
                self.assertAlmostEqual(rate, expected.rate, places=12)

    def test_gap(self):
        """One row with the report fields"""
        config = parse_config({"command": "gap", "network": NETWORK, "search": {"step": 0.1, "restarts": 1}})
        frame = run_gap(config)
        self.assertEqual(list(frame.columns), GAP_COLUMNS)
        self.assertEqual(len(frame), 1)
        self.assertEqual(frame["N"].iloc[0], 1)
        self.assertAlmostEqual(frame["nnc_constant"].iloc[0], 1.89, places=12)

    def test_outage(self):
        """Lower bound plus one row per scheme and rate"""
        frame = run_outage(parse_config(OUTAGE_DOC))
        self.assertEqual(list(frame.columns), OUTAGE_COLUMNS)
        self.assertEqual(len(frame), 2 * 4)
        self.assertTrue((frame["samples"] == 300).all())
        for r, group in frame.groupby("r"):
            with self.subTest(r=r):
                lower = group.loc[group["scheme"] == "lower_bound", "p_hat"].iloc[0]
                self.assertTrue((group["p_hat"] >= lower).all())

    def test_epscap(self):
        """One row per ε and scheme, lower below upper"""
        config = parse_config({
            "command": "epscap",
            "model": {"family": "complex_gaussian"},
            "epscap": {"eps": [0.05, 0.1], "schemes": ["df", "scs_partial"]},
            "mc": {"samples": 200, "seed": 2},
        })
        frame = run_epscap(config)
        self.assertEqual(list(frame.columns), EPSCAP_COLUMNS)
        self.assertEqual(len(frame), 4)
        self.assertTrue((frame["lower_bits"] <= frame["upper_bits"] + 1e-9).all())

    def test_dispatch(self):
        """run_command picks the runner of the config command"""
        frame = run_command(parse_config(OUTAGE_DOC))
        self.assertTrue(frame.equals(run_outage(parse_config(OUTAGE_DOC))))


class TestMain(unittest.TestCase):
    """End-to-end runs of the command line"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def _config(self, document, name="cfg.json"):
        path = self.tmp / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    def _run(self, argv):
        stderr = io.StringIO()
        with contextlib.redirect_stderr(stderr):
            status = main(argv)
        return status, stderr.getvalue()

    def test_rate_csv(self):
        """The rate command writes one CSV row"""
        cfg = self._config({"command": "rate", "network": NETWORK,
                            "strategy": {"scheme": "mnnc", "betas": [1.0, 0.0]}})
        out = self.tmp / "rate.csv"
        status, _ = self._run(["rate", "--config", cfg, "--out", str(out)])
        self.assertEqual(status, 0)
        frame = pd.read_csv(out)
        self.assertEqual(list(frame.columns), RATE_COLUMNS)
        self.assertAlmostEqual(frame["rate_bits"].iloc[0], 0.79248125, places=8)

    def test_configuration_error(self):
        """Bad configs exit with 2, print one JSON error line and write nothing"""
        cfg = self._config(dict(OUTAGE_DOC, mc={"samples": 0}))
        out = self.tmp / "outage.csv"
        status, stderr = self._run(["outage", "--config", cfg, "--out", str(out)])
        self.assertEqual(status, 2)
        self.assertFalse(out.exists())
        line = [text for text in stderr.splitlines() if text.strip()][-1]
        self.assertTrue(line.startswith('{"error"'))
        payload = json.loads(line)
        self.assertEqual(payload["error"], "ConfigurationError")
        self.assertIn(["mc.samples"], [item[:1] for item in payload["violations"]])

    def test_missing_config_file(self):
        """An unreadable config is a configuration error"""
        status, _ = self._run(["rate", "--config", str(self.tmp / "absent.json")])
        self.assertEqual(status, 2)

    def test_outage_reproducible(self):
        """Same seed, same bytes"""
        cfg = self._config(OUTAGE_DOC)
        first, second = self.tmp / "a.csv", self.tmp / "b.csv"
        self.assertEqual(self._run(["outage", "--config", cfg, "--out", str(first)])[0], 0)
        self.assertEqual(self._run(["outage", "--config", cfg, "--out", str(second)])[0], 0)
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_samples_override(self):
        """--samples replaces the configured sample count"""
        cfg = self._config(OUTAGE_DOC)
        out = self.tmp / "outage.csv"
        status, _ = self._run(["outage", "--config", cfg, "--out", str(out), "--samples", "120"])
        self.assertEqual(status, 0)
        self.assertTrue((pd.read_csv(out)["samples"] == 120).all())

    def test_curves_two_files(self):
        """curves writes both tables next to the stem"""
        cfg = self._config({
            "command": "curves",
            "curves": {"r_grid": [0.5, 1.0], "snr_grid": [0.0, 10.0], "eps": 0.1},
            "mc": {"samples": 100, "seed": 4},
        })
        stem = self.tmp / "fig"
        status, _ = self._run(["curves", "--config", cfg, "--out", str(stem)])
        self.assertEqual(status, 0)
        self.assertEqual(len(pd.read_csv(self.tmp / "fig_error_vs_rate.csv")), 2)
        self.assertEqual(len(pd.read_csv(self.tmp / "fig_epscap_vs_snr.csv")), 2)


if __name__ == '__main__':
    unittest.main()
