"""Exact computational Lie theory: the Duflo map and the arrow-diagram tensors behind it."""

__version__ = "0.1.0"
