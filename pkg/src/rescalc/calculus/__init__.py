"""Symbolic calculus of resource inequalities."""

from .axioms import Axiom, AxiomDB, axioms
from .dualities import DualityCheck, classical_dualities
from .derivation import (Derivation, ProofReport, Step, load_script, parse_script,
                         verify_derivation)
from .entexpr import Context, EntExpr, canonicalize, certify_nonnegative
from .parser import ParseError, from_notation, parse, parse_coeff, parse_context, parse_expr, \
    parse_inequality, parse_resource
from .resources import Inequality, ResourceExpr, ResourceTerm, swap_parties
from .rules import (RuleError, add, cancel, chain, compose, equate, feedback, refl, relabel,
                    reverse, rewrite, time_reverse)

__all__ = [
    "Axiom", "AxiomDB", "axioms", "DualityCheck", "classical_dualities", "Derivation", "ProofReport", "Step", "load_script",
    "parse_script", "verify_derivation", "Context", "EntExpr", "canonicalize",
    "certify_nonnegative", "ParseError", "from_notation", "parse", "parse_coeff",
    "parse_context", "parse_expr", "parse_inequality", "parse_resource", "Inequality",
    "ResourceExpr", "ResourceTerm", "swap_parties", "RuleError", "add", "cancel", "chain",
    "compose", "equate", "feedback", "refl", "relabel", "reverse", "rewrite", "time_reverse",
]
