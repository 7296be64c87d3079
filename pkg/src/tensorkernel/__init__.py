"""Symbolic tensor computer-algebra kernel."""
from .expr import Derivative, Index, Sum, Tensor, Term, free_indices, normalize
from .parser import parse_expr, parse_rule, parse_statement
from .printing import print_plain, print_tex
from .properties import PropertyTable
from .session import Session

__all__ = [
    "Derivative", "Index", "Sum", "Tensor", "Term", "free_indices", "normalize",
    "parse_expr", "parse_rule", "parse_statement", "print_plain", "print_tex",
    "PropertyTable", "Session",
]
