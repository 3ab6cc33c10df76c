"""Command-line frontend."""

from .main import main
from .parser import ParseError, ProblemFile, UndeclaredSymbol, parse_problem

__all__ = ["main", "ParseError", "ProblemFile", "UndeclaredSymbol", "parse_problem"]
