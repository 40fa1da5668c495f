"""Relay-Coding: mixed noisy network coding for Gaussian relay networks."""
