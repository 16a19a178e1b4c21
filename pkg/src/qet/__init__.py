"""Exact expectation reasoning for quantum while-programs over the Clifford+T gate set."""

__version__ = "0.1.0"
