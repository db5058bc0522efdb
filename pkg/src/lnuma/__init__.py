"""Location-aware effects for NUMA-style actor programs.

Subpackages and modules:

* `lnuma.syntax`: AST, parser and pretty printer
* `lnuma.effects`: the behaviour algebra
* `lnuma.typer`: the type and effect checker
* `lnuma.runtime`: the small-step machine, schedulers and exhaustive explorer
* `lnuma.monitor`: global behaviours, well-formedness and per-step soundness
* `lnuma.cost`: pricing behaviours and traces against a cost matrix
"""
from .diagnostics import Diagnostic, DiagnosticError, ParseError, TypingError

__version__ = "0.1.0"

__all__ = ["Diagnostic", "DiagnosticError", "ParseError", "TypingError", "__version__"]
