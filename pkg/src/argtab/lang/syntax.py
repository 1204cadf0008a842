"""Core syntax: terms, formulas, defeasible rules and knowledge bases.

All types are immutable (frozen dataclasses), hashable and compared
structurally, so they can be shared freely and used as set members.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class Func(Term):
    name: str
    args: tuple[Term, ...]


# ---------------------------------------------------------------------------
# Formulas

@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Truth(Formula):
    pass


@dataclass(frozen=True)
class Falsity(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ForAll(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


TRUE = Truth()
FALSE = Falsity()

BINARY = (And, Or, Implies, Iff)
QUANT = (ForAll, Exists)


def neg(f: Formula) -> Formula:
    """Syntactic negation; never simplifies (identity of supports matters)."""
    return Not(f)


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Func):
        out: frozenset[str] = frozenset()
        for a in t.args:
            out |= term_vars(a)
        return out
    return frozenset()


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        out: frozenset[str] = frozenset()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Not):
        return free_vars(f.sub)
    if isinstance(f, BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, QUANT):
        return free_vars(f.body) - {f.var}
    return frozenset()


def subst_term(t: Term, mapping: dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Func):
        return Func(t.name, tuple(subst_term(a, mapping) for a in t.args))
    return t


def substitute(f: Formula, mapping: dict[str, Term]) -> Formula:
    """Replace free variables by terms. Safe for ground replacement terms."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(a, mapping) for a in f.args))
    if isinstance(f, Not):
        return Not(substitute(f.sub, mapping))
    if isinstance(f, BINARY):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, QUANT):
        inner = {v: t for v, t in mapping.items() if v != f.var}
        return type(f)(f.var, substitute(f.body, inner))
    return f


def ground_terms_in_term(t: Term) -> frozenset[Term]:
    """All ground subterms of t, including t itself when ground."""
    out: set[Term] = set()

    def walk(u: Term):
        if isinstance(u, Const):
            out.add(u)
        elif isinstance(u, Func):
            for a in u.args:
                walk(a)
            if not term_vars(u):
                out.add(u)

    walk(t)
    return frozenset(out)


def ground_terms(f: Formula) -> frozenset[Term]:
    """All ground terms (and ground subterms) occurring in a formula."""
    if isinstance(f, Atom):
        out: frozenset[Term] = frozenset()
        for a in f.args:
            out |= ground_terms_in_term(a)
        return out
    if isinstance(f, Not):
        return ground_terms(f.sub)
    if isinstance(f, BINARY):
        return ground_terms(f.left) | ground_terms(f.right)
    if isinstance(f, QUANT):
        return ground_terms(f.body)
    return frozenset()


def constant_names(f: Formula) -> frozenset[str]:
    names = set()

    def walk_term(t: Term):
        if isinstance(t, Const):
            names.add(t.name)
        elif isinstance(t, Func):
            names.add(t.name)
            for a in t.args:
                walk_term(a)

    def walk(g: Formula):
        if isinstance(g, Atom):
            for a in g.args:
                walk_term(a)
        elif isinstance(g, Not):
            walk(g.sub)
        elif isinstance(g, BINARY):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, QUANT):
            walk(g.body)

    walk(f)
    return frozenset(names)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, QUANT):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.sub)
    if isinstance(f, BINARY):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return True


def has_universal_claim(f: Formula, positive: bool = True) -> bool:
    """True when f asserts something about all objects: a positively
    occurring universal or a negatively occurring existential."""
    if isinstance(f, ForAll):
        return positive or has_universal_claim(f.body, positive)
    if isinstance(f, Exists):
        return (not positive) or has_universal_claim(f.body, positive)
    if isinstance(f, Not):
        return has_universal_claim(f.sub, not positive)
    if isinstance(f, (And, Or)):
        return has_universal_claim(f.left, positive) or has_universal_claim(f.right, positive)
    if isinstance(f, Implies):
        return has_universal_claim(f.left, not positive) or has_universal_claim(f.right, positive)
    if isinstance(f, Iff):
        # either side may be used in either polarity
        return (has_universal_claim(f.left, True) or has_universal_claim(f.left, False)
                or has_universal_claim(f.right, True) or has_universal_claim(f.right, False))
    return False


# ---------------------------------------------------------------------------
# Defeasible rules

@dataclass(frozen=True)
class RuleNegation:
    """Schema-level consequent `not(<rule id>)` of an undercutting defeater."""
    target: str
    target_vars: tuple[str, ...] = ()


@dataclass(frozen=True)
class NotRule:
    """Claim that a specific ground rule instance must not be used."""
    rule_id: str
    subst: tuple[tuple[str, Term], ...] = ()


@dataclass(frozen=True)
class DefeasibleRule:
    id: str
    antecedent: Formula
    consequent: Formula | RuleNegation
    free_vars: tuple[str, ...] = ()

    def is_defeater(self) -> bool:
        return isinstance(self.consequent, RuleNegation)


@dataclass(frozen=True)
class RuleInstance:
    """Ground instance of a defeasible rule.

    Identity is (origin, substitution); preferences and attacks resolve
    through the origin id, attack matching through the full identity.
    """
    origin: str
    subst: tuple[tuple[str, Term], ...]
    antecedent: Formula
    consequent: Formula | NotRule

    def is_defeater(self) -> bool:
        return isinstance(self.consequent, NotRule)

    @property
    def key(self) -> tuple:
        return (self.origin, self.subst)


def ground_instances(rule: DefeasibleRule, terms: frozenset[Term] | set[Term]) -> set[RuleInstance]:
    """One instance per mapping of the rule's free variables into `terms`.

    Propositional rules (no free variables) yield exactly themselves.
    """
    fv = sorted(rule.free_vars)
    if not fv:
        cons: Formula | NotRule
        if isinstance(rule.consequent, RuleNegation):
            cons = NotRule(rule.consequent.target, ())
        else:
            cons = rule.consequent
        return {RuleInstance(rule.id, (), rule.antecedent, cons)}
    out = set()
    ordered = sorted(terms, key=term_sort_key)
    for combo in itertools.product(ordered, repeat=len(fv)):
        mapping = dict(zip(fv, combo))
        subst = tuple(sorted(mapping.items()))
        if isinstance(rule.consequent, RuleNegation):
            tsub = tuple((v, t) for v, t in subst if v in rule.consequent.target_vars)
            cons: Formula | NotRule = NotRule(rule.consequent.target, tsub)
        else:
            cons = substitute(rule.consequent, mapping)
        out.add(RuleInstance(rule.id, subst, substitute(rule.antecedent, mapping), cons))
    return out


# ---------------------------------------------------------------------------
# Knowledge bases

PrefAtom = tuple  # ("rule", id) or ("formula", Formula)


@dataclass(frozen=True)
class KnowledgeBase:
    sigma: tuple[Formula, ...] = ()
    rules: tuple[DefeasibleRule, ...] = ()
    preferences: tuple[tuple[PrefAtom, PrefAtom], ...] = ()
    queries: tuple[Formula, ...] = ()
    _by_id: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {r.id: r for r in self.rules})

    def rule(self, rule_id: str) -> DefeasibleRule:
        return self._by_id[rule_id]

    def preference_closure(self) -> frozenset[tuple[PrefAtom, PrefAtom]]:
        """Transitive closure of the declared strict preference pairs."""
        pairs = set(self.preferences)
        changed = True
        while changed:
            changed = False
            for a, b in list(pairs):
                for c, d in list(pairs):
                    if b == c and (a, d) not in pairs:
                        pairs.add((a, d))
                        changed = True
        return frozenset(pairs)


# ---------------------------------------------------------------------------
# Canonical ordering (keys are stable across runs; used wherever sets are
# iterated so that output is deterministic)

def term_sort_key(t: Term) -> tuple:
    if isinstance(t, Var):
        return (0, t.name)
    if isinstance(t, Const):
        return (1, t.name)
    assert isinstance(t, Func)
    return (2, t.name, tuple(term_sort_key(a) for a in t.args))


_FORMULA_RANK = {Truth: 0, Falsity: 1, Atom: 2, Not: 3, And: 4, Or: 5,
                 Implies: 6, Iff: 7, ForAll: 8, Exists: 9}


def formula_sort_key(f: Formula) -> tuple:
    r = _FORMULA_RANK[type(f)]
    if isinstance(f, Atom):
        return (r, f.pred, tuple(term_sort_key(a) for a in f.args))
    if isinstance(f, Not):
        return (r, formula_sort_key(f.sub))
    if isinstance(f, BINARY):
        return (r, formula_sort_key(f.left), formula_sort_key(f.right))
    if isinstance(f, QUANT):
        return (r, f.var, formula_sort_key(f.body))
    return (r,)
