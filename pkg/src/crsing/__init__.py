"""Exact symbolic tools for CR singularities of polynomial real submanifolds."""

__version__ = "0.1.0"
