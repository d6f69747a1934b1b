"""Exact polyhedral toolkit for tropical cycles, periodic PL functions and canonical measures."""

__version__ = "0.1.0"
