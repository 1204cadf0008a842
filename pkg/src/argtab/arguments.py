"""Structured arguments: supports, conclusions and their derived views.

A support is a set of supporting elements: premises, tests (marked `?`)
and rule applications, where a rule application nests the support of an
argument for the rule instance's antecedent.  From a support we derive
the premises, the defeasible rules used, the last rules (outermost layer,
the candidates for defeat), and the supporting propositions — the formulas
that directly ground the conclusion.
"""

from __future__ import annotations

from dataclasses import dataclass

from .entail import OracleLimitError, TruthTable
from .lang import (
    FALSE, Formula, NotRule, RuleInstance, formula_sort_key,
)
from .lang.printer import (
    render_formula, render_rule_instance, render_substitution, render_term,
)


@dataclass(frozen=True)
class Premise:
    formula: Formula


@dataclass(frozen=True)
class Test:
    """A refutation goal added to the tableau; never counts as a premise.

    Tags are unique per run so the same formula tested twice stays
    distinguishable.
    """
    formula: Formula
    tag: int


@dataclass(frozen=True)
class RuleApplication:
    support: frozenset
    rule: RuleInstance


SupportElement = Premise | Test | RuleApplication
Support = frozenset


@dataclass(frozen=True)
class NotPremise:
    """Claim that a premise must not be used (premise undercut)."""
    formula: Formula


Conclusion = Formula | NotRule | NotPremise


@dataclass(frozen=True)
class Argument:
    support: Support
    conclusion: Conclusion

    def is_falsum(self) -> bool:
        return self.conclusion == FALSE


@dataclass(frozen=True)
class ArgumentViews:
    premises: frozenset[Formula]
    rules: frozenset[RuleInstance]
    last_rules: frozenset[RuleInstance]
    conclusion: Conclusion
    supporting_props: frozenset[Formula]


def support_views(support: Support):
    """(premises, rules, last_rules, supporting_props) of a support set."""
    premises: set[Formula] = set()
    rules: set[RuleInstance] = set()
    last: set[RuleInstance] = set()
    props: set[Formula] = set()
    for el in support:
        if isinstance(el, Premise):
            premises.add(el.formula)
            props.add(el.formula)
        elif isinstance(el, Test):
            props.add(el.formula)
        else:
            last.add(el.rule)
            rules.add(el.rule)
            p, r, _, _ = support_views(el.support)
            premises |= p
            rules |= r
            if not isinstance(el.rule.consequent, NotRule):
                props.add(el.rule.consequent)
    return (frozenset(premises), frozenset(rules), frozenset(last), frozenset(props))


def views(a: Argument) -> ArgumentViews:
    p, r, l, s = support_views(a.support)
    return ArgumentViews(p, r, l, a.conclusion, s)


def supporting_props(support: Support) -> frozenset[Formula]:
    return support_views(support)[3]


def tests_in(support: Support) -> tuple[Test, ...]:
    """Tests at the top level of a support, in canonical order."""
    return tuple(sorted((el for el in support if isinstance(el, Test)),
                        key=lambda t: t.tag))


def element_depth(el: SupportElement) -> int:
    if isinstance(el, RuleApplication):
        inner = max((element_depth(e) for e in el.support), default=0)
        return inner + 1
    return 0


def support_depth(support: Support) -> int:
    return max((element_depth(el) for el in support), default=0)


# ---------------------------------------------------------------------------
# Minimization (the minimal-argument requirement)

def minimize(a: Argument, context: tuple[Formula, ...] = ()) -> Argument:
    """Shrink the support until no single element can be dropped while the
    supporting propositions still entail the conclusion; nested rule
    application supports are minimized recursively first.

    `context` adds side formulas to the entailment check (used when an
    argument only holds within a case).  Raises OracleLimitError when the
    truth-table oracle cannot handle the formula count.
    """
    support = minimize_support(a.support, a.conclusion, context)
    return Argument(support, a.conclusion)


def minimize_support(support: Support, conclusion: Conclusion,
                     context: tuple[Formula, ...] = ()) -> Support:
    elements = [_minimize_element(el, context) for el in support]
    elements.sort(key=element_sort_key)
    if not isinstance(conclusion, Formula):
        return frozenset(elements)
    universe = [f for el in elements for f in supporting_props(frozenset([el]))]
    table = TruthTable(universe + list(context) + [conclusion])

    def entailed(els) -> bool:
        props = set()
        for el in els:
            props |= supporting_props(frozenset([el]))
        return table.entails(list(props) + list(context), conclusion)

    kept = list(elements)
    for el in elements:
        trial = [e for e in kept if e != el]
        if entailed(trial):
            kept = trial
    return frozenset(kept)


def _minimize_element(el: SupportElement, context):
    if isinstance(el, RuleApplication):
        inner = minimize_support(el.support, el.rule.antecedent, context)
        return RuleApplication(inner, el.rule)
    return el


def equal_modulo_support_order(a: Argument, b: Argument) -> bool:
    """Structural equality; supports are sets so ordering never matters."""
    return a == b


# ---------------------------------------------------------------------------
# Canonical ordering and rendering of elements

def conclusion_sort_key(c: Conclusion) -> tuple:
    if isinstance(c, Formula):
        return (0, formula_sort_key(c))
    if isinstance(c, NotRule):
        return (1, c.rule_id, c.subst and render_substitution(c.subst) or "")
    return (2, formula_sort_key(c.formula))


def element_sort_key(el: SupportElement) -> tuple:
    if isinstance(el, Premise):
        return (0, formula_sort_key(el.formula))
    if isinstance(el, Test):
        return (1, formula_sort_key(el.formula), el.tag)
    return (2, el.rule.origin, render_substitution(el.rule.subst),
            support_sort_key(el.support))


def support_sort_key(support: Support) -> tuple:
    return tuple(sorted(element_sort_key(el) for el in support))


def argument_sort_key(a: Argument) -> tuple:
    return (conclusion_sort_key(a.conclusion), support_sort_key(a.support))


def sorted_support(support: Support) -> list[SupportElement]:
    return sorted(support, key=element_sort_key)


def render_element(el: SupportElement) -> str:
    if isinstance(el, Premise):
        return render_formula(el.formula)
    if isinstance(el, Test):
        return render_formula(el.formula) + "?"
    inner = ", ".join(render_element(e) for e in sorted_support(el.support))
    name = el.rule.origin
    if el.rule.subst:
        name += "[%s]" % render_substitution(el.rule.subst)
    return "({%s}, %s)" % (inner, name)


def render_support(support: Support) -> str:
    return "{%s}" % ", ".join(render_element(el) for el in sorted_support(support))


def render_conclusion(c: Conclusion) -> str:
    if isinstance(c, Formula):
        return render_formula(c)
    if isinstance(c, NotRule):
        name = c.rule_id
        if c.subst:
            name += "[%s]" % render_substitution(c.subst)
        return "not(%s)" % name
    return "not(%s)" % render_formula(c.formula)


def render_argument(a: Argument) -> str:
    return "(%s, %s)" % (render_support(a.support), render_conclusion(a.conclusion))


# ---------------------------------------------------------------------------
# Structured serialization (stable field names; golden-tested)

def element_to_json(el: SupportElement) -> dict:
    if isinstance(el, Premise):
        return {"premise": render_formula(el.formula)}
    if isinstance(el, Test):
        return {"test": render_formula(el.formula), "tag": el.tag}
    return {
        "rule": el.rule.origin,
        "substitution": {v: render_term(t) for v, t in el.rule.subst},
        "antecedent_support": [element_to_json(e) for e in sorted_support(el.support)],
    }


def conclusion_to_json(c: Conclusion):
    if isinstance(c, Formula):
        return {"formula": render_formula(c)}
    if isinstance(c, NotRule):
        return {"not_rule": c.rule_id,
                "substitution": {v: render_term(t) for v, t in c.subst}}
    return {"not_premise": render_formula(c.formula)}


def argument_to_json(a: Argument) -> dict:
    return {
        "conclusion": conclusion_to_json(a.conclusion),
        "support": [element_to_json(el) for el in sorted_support(a.support)],
    }
