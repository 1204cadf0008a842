"""Defeasible-rule firing: antecedents become tests, single-test closure
supports fire the rule, and the consequent is pushed into every node.

The loop alternates saturation, test posting (ground instances are
regenerated as new terms appear) and breadth-first firing of everything
fireable, until a fixpoint or the budget cuts it off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arguments import (
    Argument, Premise, RuleApplication, Support, Test,
    argument_sort_key, element_depth, minimize, minimize_support,
    support_sort_key, tests_in,
)
from .entail import OracleLimitError
from .lang import (
    FALSE, Formula, KnowledgeBase, NotRule, RuleInstance,
    ground_instances, neg, term_sort_key,
)
from .lang.printer import render_rule_instance, render_substitution
from .tableau import (
    Budget, BudgetExceeded, ClosureSupport, Entry, Node, Tableau, init_root,
)


@dataclass(frozen=True)
class FiringRecord:
    rule: RuleInstance
    antecedent_support: Support
    produced: Entry | None  # None when the consequent is a rule negation
    node_id: int


def instance_sort_key(inst: RuleInstance, kb: KnowledgeBase) -> tuple:
    order = {r.id: i for i, r in enumerate(kb.rules)}
    return (order.get(inst.origin, len(order)), render_substitution(inst.subst))


@dataclass
class DerivationState:
    tableau: Tableau
    kb: KnowledgeBase
    pending_tests: dict[int, tuple] = field(default_factory=dict)  # tag -> purpose
    fired: dict[tuple, FiringRecord] = field(default_factory=dict)
    pool: dict[Argument, None] = field(default_factory=dict)
    supports_seen: dict[Support, None] = field(default_factory=dict)
    tested_instances: set[tuple] = field(default_factory=set)
    scopes: dict[tuple, list[Node]] = field(default_factory=dict)
    complete: bool = True
    notes: list[str] = field(default_factory=list)

    def add_note(self, note: str):
        self.complete = False
        if note not in self.notes:
            self.notes.append(note)

    def arguments_for(self, goal: Formula) -> list[Argument]:
        return [a for a in self.pool if a.conclusion == goal]

    def inconsistencies(self) -> list[Argument]:
        return [a for a in self.pool if a.conclusion == FALSE]

    def defeater_conclusions(self) -> list[Argument]:
        return [a for a in self.pool if isinstance(a.conclusion, NotRule)]


def current_instances(state: DerivationState) -> list[RuleInstance]:
    terms = frozenset(state.tableau.terms_seen)
    out = []
    for rule in state.kb.rules:
        out.extend(ground_instances(rule, terms))
    out.sort(key=lambda i: instance_sort_key(i, state.kb))
    return out


def post_antecedent_tests(state: DerivationState, mode: str = "root",
                          leaf: Node | None = None) -> list[tuple[int, RuleInstance]]:
    """Add a test ({~antecedent?}, ~antecedent) per untested rule instance.

    Root mode posts into every node (the test is inherited); leaf mode posts
    into the designated leaf's subtree only.
    """
    tab = state.tableau
    new = []
    for inst in current_instances(state):
        if mode == "root" and inst.key in state.tested_instances:
            continue
        tag = tab.new_test_tag()
        t = Test(neg(inst.antecedent), tag)
        entry = Entry(frozenset([t]), t.formula)
        if mode == "root":
            tab.add_entry_everywhere(entry)
            state.tested_instances.add(inst.key)
        else:
            tab.add_entry_subtree(leaf, entry)
        state.pending_tests[tag] = ("rule", inst)
        new.append((tag, inst))
    return new


def fire_rule(state: DerivationState, support: ClosureSupport,
              inst: RuleInstance, at_node: Node | None = None,
              do_minimize: bool = True) -> FiringRecord | None:
    """Fire `inst` using a closure support whose single test is its
    antecedent test.  Duplicate firings (same rule, same support) are
    no-ops.  Defeater consequents go to the pool instead of the tableau.
    """
    tab = state.tableau
    test_els = tests_in(support.elements)
    if len(test_els) != 1:
        raise ValueError("firing needs a support with exactly one test")
    raw = frozenset(el for el in support.elements if not isinstance(el, Test))
    if do_minimize:
        try:
            raw = minimize_support(raw, inst.antecedent)
        except OracleLimitError:
            state.add_note("antecedent support left unminimized (oracle limit)")
    element = RuleApplication(raw, inst)
    if element_depth(element) > tab.budget.depth_cap:
        state.add_note("rule-application depth cap of %d reached" % tab.budget.depth_cap)
        return None
    key = (inst.key, raw)
    fired_here = at_node.fired if at_node is not None else None
    if at_node is None:
        if key in state.fired:
            return None
    elif key in fired_here:
        return None

    if isinstance(inst.consequent, NotRule):
        produced = None
        state.pool.setdefault(Argument(frozenset([element]), inst.consequent))
    else:
        produced = Entry(frozenset([element]), inst.consequent)
        if at_node is None:
            tab.add_entry_everywhere(produced)
        else:
            tab.add_entry_subtree(at_node, produced)
    node_id = at_node.nid if at_node is not None else tab.root.nid
    record = FiringRecord(inst, raw, produced, node_id)
    if at_node is None:
        state.fired[key] = record
    else:
        fired_here.add(key)
        state.fired.setdefault(key, record)
        state.scopes.setdefault(key, []).append(at_node)
    return record


def _pool_add(state: DerivationState, arg: Argument) -> bool:
    if arg in state.pool:
        return False
    state.pool[arg] = None
    return True


def _minimized(state: DerivationState, arg: Argument) -> Argument:
    try:
        return minimize(arg)
    except OracleLimitError:
        state.add_note("argument left unminimized (oracle limit)")
        return arg


def derive(kb: KnowledgeBase, budget: Budget | None = None,
           queries=None) -> DerivationState:
    """Root-mode derivation: saturate, extract closure supports, fire every
    fireable rule, repeat to fixpoint.  The pool collects query arguments
    (single-test supports), inconsistency arguments (zero-test supports)
    and undercutting-defeater conclusions.
    """
    goals = list(kb.queries) if queries is None else list(queries)
    tab = init_root(kb, goals, budget)
    state = DerivationState(tab, kb)
    for tag, goal in tab.tests_posted:
        state.pending_tests[tag] = ("query", goal)

    while True:
        progress = False
        tab.saturate()
        if not tab.complete:
            state.add_note("; ".join(tab.notes))
        try:
            if post_antecedent_tests(state):
                continue
        except BudgetExceeded as e:
            state.add_note(str(e))
            break

        supports, exhaustive = tab.closure_supports(max_tests=1)
        if not exhaustive:
            state.add_note("closure-support combinations truncated at cap")
        firings = []
        for s in supports:
            state.supports_seen.setdefault(s.elements)
            if len(s.tests) == 0:
                _pool_add(state, _minimized(state, Argument(s.elements, FALSE)))
            elif len(s.tests) == 1:
                purpose = state.pending_tests.get(s.tests[0])
                if purpose is None:
                    continue
                if purpose[0] == "query":
                    rest = frozenset(el for el in s.elements if not isinstance(el, Test))
                    _pool_add(state, _minimized(state, Argument(rest, purpose[1])))
                else:
                    firings.append((s, purpose[1]))
        firings.sort(key=lambda p: (instance_sort_key(p[1], kb),
                                    support_sort_key(p[0].elements)))
        before = len(state.pool)
        try:
            for s, inst in firings:
                if fire_rule(state, s, inst) is not None:
                    progress = True
        except BudgetExceeded as e:
            state.add_note(str(e))
            break
        if len(state.pool) != before:
            pass  # pool growth alone does not change the tableau
        if not progress:
            break
    return state
