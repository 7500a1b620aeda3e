"""Exact finite Markov categories and checkers for their zero-one laws."""

__version__ = "0.1.0"
