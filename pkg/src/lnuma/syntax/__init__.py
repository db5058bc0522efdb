from .nodes import *  # noqa: F401,F403
from .parser import parse_behaviour, parse_expr, parse_program, parse_type, tokenize  # noqa: F401
from .printer import pretty, pretty_behaviour, pretty_expr, pretty_program  # noqa: F401
