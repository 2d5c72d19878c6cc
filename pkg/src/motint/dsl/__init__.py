from .evaluator import Evaluator, ScriptError
from .syntax import ParseError, parse, parse_expr, pretty_print

__all__ = ["Evaluator", "ScriptError", "ParseError", "parse", "parse_expr", "pretty_print"]
