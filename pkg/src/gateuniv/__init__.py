"""Decide and probe eventual universality of finite qudit gate sets."""

__version__ = "0.1.0"
