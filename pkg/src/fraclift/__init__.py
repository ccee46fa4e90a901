"""Lifting bounded open sets one dimension up and studying the lifted boundary."""

__version__ = "0.1.0"
