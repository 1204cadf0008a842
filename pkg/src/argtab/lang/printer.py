"""Rendering of terms, formulas and rules back to concrete syntax.

`parse(render_formula(f))` is structurally equal to `f`; parentheses are
emitted only where precedence or associativity requires them.
"""

from __future__ import annotations

from .syntax import (
    And, Atom, Const, DefeasibleRule, Exists, Falsity, ForAll, Formula, Func,
    Iff, Implies, Not, NotRule, Or, RuleInstance, RuleNegation, Term, Truth, Var,
)

# precedence levels: higher binds tighter
_IFF, _IMP, _OR, _AND, _UNARY, _ATOM = 1, 2, 3, 4, 5, 6


def _prec(f: Formula) -> int:
    if isinstance(f, Iff):
        return _IFF
    if isinstance(f, Implies):
        return _IMP
    if isinstance(f, Or):
        return _OR
    if isinstance(f, And):
        return _AND
    if isinstance(f, (Not, ForAll, Exists)):
        return _UNARY
    return _ATOM


def render_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    assert isinstance(t, Func)
    return "%s(%s)" % (t.name, ",".join(render_term(a) for a in t.args))


def render_formula(f: Formula) -> str:
    return _render(f, 0)


def _render(f: Formula, required: int) -> str:
    p = _prec(f)
    if isinstance(f, Truth):
        s = "true"
    elif isinstance(f, Falsity):
        s = "false"
    elif isinstance(f, Atom):
        if f.args:
            s = "%s(%s)" % (f.pred, ",".join(render_term(a) for a in f.args))
        else:
            s = f.pred
    elif isinstance(f, Not):
        s = "~" + _render(f.sub, _UNARY)
    elif isinstance(f, ForAll):
        s = "forall %s. %s" % (f.var, _render(f.body, _UNARY))
    elif isinstance(f, Exists):
        s = "exists %s. %s" % (f.var, _render(f.body, _UNARY))
    elif isinstance(f, And):
        s = "%s & %s" % (_render(f.left, _AND), _render(f.right, _AND + 1))
    elif isinstance(f, Or):
        s = "%s | %s" % (_render(f.left, _OR), _render(f.right, _OR + 1))
    elif isinstance(f, Implies):
        # right associative
        s = "%s -> %s" % (_render(f.left, _IMP + 1), _render(f.right, _IMP))
    else:
        assert isinstance(f, Iff)
        s = "%s <-> %s" % (_render(f.left, _IFF), _render(f.right, _IFF + 1))
    if p < required:
        return "(" + s + ")"
    return s


def render_substitution(subst: tuple[tuple[str, Term], ...]) -> str:
    return ",".join("%s=%s" % (v, render_term(t)) for v, t in subst)


def render_rule_instance(inst: RuleInstance) -> str:
    name = inst.origin
    if inst.subst:
        name += "[%s]" % render_substitution(inst.subst)
    if isinstance(inst.consequent, NotRule):
        target = inst.consequent.rule_id
        if inst.consequent.subst:
            target += "[%s]" % render_substitution(inst.consequent.subst)
        return "%s: %s ~> not(%s)" % (name, render_formula(inst.antecedent), target)
    return "%s: %s ~> %s" % (name, render_formula(inst.antecedent),
                             render_formula(inst.consequent))


def render_rule(rule: DefeasibleRule) -> str:
    if isinstance(rule.consequent, RuleNegation):
        rhs = "not(%s)" % rule.consequent.target
    else:
        rhs = render_formula(rule.consequent)
    return "rule %s: %s ~> %s" % (rule.id, render_formula(rule.antecedent), rhs)
