"""Formulas, algebraic semantics, translation and reduction to the static fragment."""

from .formula import parse, to_text
from .rewrite import rewrite_static, rewrite_with_trace
from .semantics import eval_algebraic
from .translate import lift, translate

__all__ = ["parse", "to_text", "eval_algebraic", "rewrite_static", "rewrite_with_trace", "translate", "lift"]
