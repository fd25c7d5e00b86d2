"""Exact computation of graded symmetry algebras of CR-quadrics."""

__version__ = "0.1.0"
