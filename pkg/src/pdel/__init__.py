"""Probabilistic dynamic epistemic logic over finite epistemic Heyting algebras."""

__version__ = "0.1.0"
