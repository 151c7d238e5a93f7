"""Exact combinatorics of the phase tropical pair-of-pants and its gluing."""

__version__ = "0.1.0"
