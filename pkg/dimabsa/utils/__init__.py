"""Helpers, report formatting and synthetic data."""
