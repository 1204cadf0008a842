"""Logical language: syntax trees, parsing and printing."""

from .syntax import (
    And, Atom, Const, DefeasibleRule, Exists, FALSE, Falsity, ForAll, Formula,
    Func, Iff, Implies, KnowledgeBase, Not, NotRule, Or, RuleInstance,
    RuleNegation, Term, TRUE, Truth, Var,
    formula_sort_key, free_vars, ground_instances, ground_terms,
    has_universal_claim, is_quantifier_free, neg, substitute, term_sort_key,
)
from .parser import (
    ArityError, FreeVariableError, KBError, ParseError, PreferenceCycleError,
    UnknownRuleError, parse_knowledge_base,
)
from .printer import (
    render_formula, render_rule, render_rule_instance, render_term,
)

__all__ = [
    "And", "Atom", "Const", "DefeasibleRule", "Exists", "FALSE", "Falsity",
    "ForAll", "Formula", "Func", "Iff", "Implies", "KnowledgeBase", "Not",
    "NotRule", "Or", "RuleInstance", "RuleNegation", "Term", "TRUE", "Truth",
    "Var",
    "formula_sort_key", "free_vars", "ground_instances", "ground_terms",
    "has_universal_claim", "is_quantifier_free", "neg", "substitute",
    "term_sort_key",
    "ArityError", "FreeVariableError", "KBError", "ParseError",
    "PreferenceCycleError", "UnknownRuleError", "parse_knowledge_base",
    "render_formula", "render_rule", "render_rule_instance", "render_term",
]
