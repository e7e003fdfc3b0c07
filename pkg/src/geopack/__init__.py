"""Multi-start NLP solver and certifier for geometric packing problems."""

__version__ = "0.1.0"
