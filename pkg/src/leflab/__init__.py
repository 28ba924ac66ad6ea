"""Exact symplectic operator calculus and filtered cohomology on nilmanifold models."""

__version__ = "0.1.0"
