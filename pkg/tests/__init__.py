"""Tests for the DimABSA toolkit."""
