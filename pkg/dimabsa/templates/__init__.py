"""Instruction registry data files."""
