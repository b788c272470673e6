"""Weil and canonical heights in one-parameter families over Q(t)."""

__version__ = "0.1.0"
