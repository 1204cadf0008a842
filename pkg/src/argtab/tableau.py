"""Argumentation tableau: nodes hold supported formulas, rewrites carry
supports along, branch closures record the supports responsible.

Every rewrite step adds child nodes; entries persist downward, so each
node physically contains everything inherited from its ancestors.  Leaves
are saturated even after closing, because every support for a closure is
wanted, not just the first one found.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .arguments import (
    Argument, Premise, RuleApplication, Support, Test,
    render_support, support_sort_key, tests_in,
)
from .lang import (
    And, Atom, Exists, FALSE, ForAll, Formula, Iff, Implies, KnowledgeBase,
    Not, Or, TRUE, Const, Term,
    formula_sort_key, ground_terms, neg, substitute, term_sort_key,
)
from .lang.printer import render_formula
from .lang.syntax import constant_names


@dataclass
class Budget:
    """Resource limits; exhaustion is flagged, never silent."""
    gamma_rounds: int = 3
    fresh_constants: int = 8
    max_entries: int = 100_000
    depth_cap: int = 16
    combination_cap: int = 10_000


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class Entry:
    """One supported formula inside a tableau node.

    Unlike a full argument, the supporting propositions need not entail
    the formula here.
    """
    support: Support
    formula: Formula


@dataclass(frozen=True)
class ClosureSupport:
    elements: Support
    tests: tuple[int, ...]  # tags of the tests occurring in elements


def complementary(f: Formula, g: Formula) -> bool:
    return f == Not(g) or g == Not(f)


def close_pair(e1: Entry, e2: Entry) -> Entry:
    """Combine complementary entries into a falsum entry (branch closure)."""
    if not complementary(e1.formula, e2.formula):
        raise ValueError("entries are not complementary")
    return Entry(e1.support | e2.support, FALSE)


def closes_alone(f: Formula) -> bool:
    return f == FALSE or f == Not(TRUE)


# ---------------------------------------------------------------------------
# Rewrite rule tables

def _alpha_products(f: Formula):
    if isinstance(f, And):
        return [f.left, f.right]
    if isinstance(f, Iff):
        return [Implies(f.left, f.right), Implies(f.right, f.left)]
    if isinstance(f, Not):
        g = f.sub
        if isinstance(g, Or):
            return [Not(g.left), Not(g.right)]
        if isinstance(g, Implies):
            return [g.left, Not(g.right)]
        if isinstance(g, Not):
            return [g.sub]
    return None


def _beta_products(f: Formula, exclusive: bool):
    if exclusive:
        # three mutually exclusive cases replace the two overlapping ones
        if isinstance(f, Or):
            a, b = f.left, f.right
            return [[And(a, Not(b))], [And(a, b)], [And(Not(a), b)]]
        if isinstance(f, Implies):
            a, b = f.left, f.right
            return [[And(Not(a), Not(b))], [And(Not(a), b)], [And(a, b)]]
        if isinstance(f, Not) and isinstance(f.sub, And):
            a, b = f.sub.left, f.sub.right
            return [[And(Not(a), b)], [And(Not(a), Not(b))], [And(a, Not(b))]]
    if isinstance(f, Or):
        return [[f.left], [f.right]]
    if isinstance(f, Implies):
        return [[Not(f.left)], [f.right]]
    if isinstance(f, Not):
        g = f.sub
        if isinstance(g, And):
            return [[Not(g.left)], [Not(g.right)]]
        if isinstance(g, Iff):
            return [[Not(Implies(g.left, g.right))], [Not(Implies(g.right, g.left))]]
    return None


def _gamma_parts(f: Formula):
    """(var, body, negate) for universal-strength formulas."""
    if isinstance(f, ForAll):
        return f.var, f.body, False
    if isinstance(f, Not) and isinstance(f.sub, Exists):
        return f.sub.var, f.sub.body, True
    return None


def _delta_parts(f: Formula):
    if isinstance(f, Exists):
        return f.var, f.body, False
    if isinstance(f, Not) and isinstance(f.sub, ForAll):
        return f.sub.var, f.sub.body, True
    return None


def classify(f: Formula, exclusive: bool = False) -> str | None:
    if _alpha_products(f) is not None:
        return "alpha"
    if _delta_parts(f) is not None:
        return "delta"
    if _beta_products(f, exclusive) is not None:
        return "beta"
    if _gamma_parts(f) is not None:
        return "gamma"
    return None


_PRIORITY = {"alpha": 0, "delta": 1, "beta": 2, "gamma": 3}


# ---------------------------------------------------------------------------
# Nodes and the tableau

class Node:
    __slots__ = ("nid", "parent", "children", "entries", "processed",
                 "closure_records", "gamma_state", "fired", "rewritten_entry",
                 "case_formula")

    def __init__(self, nid: int, parent: "Node | None"):
        self.nid = nid
        self.parent = parent
        self.children: list[Node] = []
        self.entries: dict[Entry, None] = {}
        self.processed: set[Entry] = set()
        self.closure_records: dict[Support, None] = {}
        self.gamma_state: dict[Entry, tuple[int, frozenset]] = {}
        self.fired: set = set()
        self.rewritten_entry: Entry | None = None
        self.case_formula: Formula | None = None

    def is_leaf(self) -> bool:
        return not self.children

    def is_closed(self) -> bool:
        return bool(self.closure_records)

    def ancestors_or_self(self):
        n = self
        while n is not None:
            yield n
            n = n.parent

    def records_sorted(self) -> list[Support]:
        return sorted(self.closure_records, key=support_sort_key)


class _Alloc:
    """Counters shared between a tableau and its probe clones."""

    def __init__(self):
        self.nid = 0
        self.test_tag = 0
        self.fresh_used = 0
        self.fresh_next = 0
        self.entry_count = 0
        self.used_names: set[str] = set()


class Tableau:
    def __init__(self, budget: Budget | None = None, exclusive: bool = False,
                 alloc: _Alloc | None = None, root: Node | None = None):
        self.budget = budget or Budget()
        self.exclusive = exclusive
        self.alloc = alloc or _Alloc()
        self.root = root or self._new_node(None)
        self.terms_seen: set[Term] = set()
        self.complete = True
        self.notes: list[str] = []
        self.tests_posted: list[tuple[int, Formula]] = []
        if root is not None:
            for n in self.all_nodes():
                for e in n.entries:
                    self.terms_seen |= ground_terms(e.formula)

    # -- bookkeeping ---------------------------------------------------

    def _new_node(self, parent: Node | None) -> Node:
        self.alloc.nid += 1
        return Node(self.alloc.nid, parent)

    def new_test_tag(self) -> int:
        self.alloc.test_tag += 1
        return self.alloc.test_tag

    def can_fresh_const(self) -> bool:
        return self.alloc.fresh_used < self.budget.fresh_constants

    def fresh_const(self) -> Const:
        while True:
            self.alloc.fresh_next += 1
            name = "c%d" % self.alloc.fresh_next
            if name not in self.alloc.used_names:
                break
        self.alloc.used_names.add(name)
        self.alloc.fresh_used += 1
        return Const(name)

    def all_nodes(self):
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def leaves(self):
        return [n for n in self.all_nodes() if n.is_leaf()]

    def is_closed(self) -> bool:
        return all(n.is_closed() for n in self.leaves())

    def node_terms(self, node: Node) -> list[Term]:
        out: set[Term] = set()
        for e in node.entries:
            out |= ground_terms(e.formula)
        return sorted(out, key=term_sort_key)

    def all_terms(self) -> list[Term]:
        return sorted(self.terms_seen, key=term_sort_key)

    # -- entry insertion -------------------------------------------------

    def add_entry(self, node: Node, entry: Entry) -> bool:
        if entry in node.entries:
            return False
        self.alloc.entry_count += 1
        if self.alloc.entry_count > self.budget.max_entries:
            raise BudgetExceeded("entry budget of %d exhausted" % self.budget.max_entries)
        node.entries[entry] = None
        self.terms_seen |= ground_terms(entry.formula)
        self.alloc.used_names |= constant_names(entry.formula)
        f = entry.formula
        if closes_alone(f):
            node.closure_records.setdefault(entry.support)
        for other in list(node.entries):
            if other != entry and complementary(f, other.formula):
                node.closure_records.setdefault(entry.support | other.support)
        return True

    def add_entry_everywhere(self, entry: Entry) -> bool:
        added = False
        for n in self.all_nodes():
            added = self.add_entry(n, entry) or added
        return added

    def add_entry_subtree(self, node: Node, entry: Entry) -> bool:
        added = False
        stack = [node]
        while stack:
            n = stack.pop()
            added = self.add_entry(n, entry) or added
            stack.extend(reversed(n.children))
        return added

    # -- expansion -------------------------------------------------------

    def next_pending(self, node: Node):
        best = None
        for idx, e in enumerate(node.entries):
            if e in node.processed:
                continue
            kind = classify(e.formula, self.exclusive)
            if kind is None:
                node.processed.add(e)
                continue
            if kind == "gamma":
                rounds, used = node.gamma_state.get(e, (0, frozenset()))
                if rounds >= self.budget.gamma_rounds:
                    continue
                if not (set(self.node_terms(node)) - used):
                    continue
            if kind == "delta" and not self.can_fresh_const():
                if self.complete:
                    self.complete = False
                    self.notes.append("fresh-constant budget of %d exhausted"
                                      % self.budget.fresh_constants)
                continue
            rank = (_PRIORITY[kind], idx)
            if best is None or rank < best[0]:
                best = (rank, e, kind)
        if best is None:
            return None
        return best[1], best[2]

    def expand_once(self, node: Node, entry: Entry) -> list[Node]:
        """Apply the rewrite rule for `entry`, creating child nodes."""
        if node.children:
            raise ValueError("node already expanded")
        if entry not in node.entries:
            raise ValueError("entry not present in node")
        f = entry.formula
        kind = classify(f, self.exclusive)
        if kind is None:
            raise ValueError("entry %s is not rewritable" % render_formula(f))

        if kind == "alpha":
            groups = [_alpha_products(f)]
            mark = {entry}
        elif kind == "beta":
            groups = _beta_products(f, self.exclusive)
            mark = {entry}
        elif kind == "delta":
            var, body, negate = _delta_parts(f)
            c = self.fresh_const()
            prod = substitute(body, {var: c})
            groups = [[Not(prod) if negate else prod]]
            mark = {entry}
        else:
            var, body, negate = _gamma_parts(f)
            rounds, used = node.gamma_state.get(entry, (0, frozenset()))
            new_terms = [t for t in self.node_terms(node) if t not in used]
            prods = []
            for t in new_terms:
                g = substitute(body, {var: t})
                prods.append(Not(g) if negate else g)
            node.gamma_state[entry] = (rounds + 1, used | frozenset(new_terms))
            groups = [prods]
            mark = set()  # stays re-applicable

        new_groups = []
        any_new = False
        for grp in groups:
            ents = [Entry(entry.support, g) for g in grp]
            if any(e not in node.entries for e in ents):
                any_new = True
            new_groups.append(ents)
        if not any_new:
            # nothing to add on any branch; the rewrite is a no-op here
            node.processed |= mark
            return []

        node.rewritten_entry = entry
        multi = len(new_groups) > 1
        for ents in new_groups:
            child = self._new_node(node)
            child.entries = dict(node.entries)
            child.closure_records = dict(node.closure_records)
            child.processed = set(node.processed) | mark
            child.gamma_state = dict(node.gamma_state)
            child.fired = set(node.fired)
            if multi and ents:
                child.case_formula = ents[0].formula
            node.children.append(child)
            for e in ents:
                self.add_entry(child, e)
        return node.children

    def saturate(self) -> bool:
        """Expand until every leaf is saturated or the budget runs out.

        Closed leaves keep expanding: every support for a closure matters.
        """
        try:
            stack = self.leaves()
            stack.reverse()
            while stack:
                n = stack.pop()
                if n.children:
                    stack.extend(reversed(n.children))
                    continue
                pend = self.next_pending(n)
                if pend is None:
                    continue
                children = self.expand_once(n, pend[0])
                if children:
                    stack.extend(reversed(children))
                else:
                    stack.append(n)  # skip was a no-op; re-check remaining entries
        except BudgetExceeded as e:
            self.complete = False
            self.notes.append(str(e))
        return self.complete

    # -- closure supports (one falsum record per leaf, unioned) -----------

    def closure_supports(self, max_tests: int | None = None):
        """All supports for the tableau closure, as unions of one record
        per leaf.  Returns (supports, exhaustive); `exhaustive` is False
        when the combination cap truncated the enumeration.
        """
        leaves = self.leaves()
        exhaustive = True
        if any(not leaf.closure_records for leaf in leaves):
            return [], True
        partials: dict[Support, None] = {frozenset(): None}
        cap = self.budget.combination_cap
        for leaf in leaves:
            nxt: dict[Support, None] = {}
            recs = leaf.records_sorted()
            full = False
            for u in partials:
                for r in recs:
                    s = u | r
                    if max_tests is not None and len(tests_in(s)) > max_tests:
                        continue
                    if s not in nxt:
                        if len(nxt) >= cap:
                            full = True
                            continue
                        nxt[s] = None
            if full:
                exhaustive = False
            partials = nxt
            if not partials:
                return [], exhaustive
        out = [ClosureSupport(s, tuple(t.tag for t in tests_in(s)))
               for s in sorted(partials, key=support_sort_key)]
        return out, exhaustive

    # -- clones (used by the case machinery for test probes) --------------

    def clone_subtree(self, node: Node) -> "Tableau":
        def copy(n: Node, parent: Node | None) -> Node:
            m = self._new_node(parent)
            m.entries = dict(n.entries)
            m.processed = set(n.processed)
            m.closure_records = dict(n.closure_records)
            m.gamma_state = dict(n.gamma_state)
            m.fired = set(n.fired)
            m.rewritten_entry = n.rewritten_entry
            m.case_formula = n.case_formula
            m.children = [copy(c, m) for c in n.children]
            return m

        root = copy(node, None)
        return Tableau(self.budget, self.exclusive, self.alloc, root)


# ---------------------------------------------------------------------------
# Construction and refutation proofs

def init_root(kb: KnowledgeBase, tests=(), budget: Budget | None = None,
              exclusive: bool = False) -> Tableau:
    """Root node ({sigma}, sigma) per premise plus ({~goal?}, ~goal) per test
    goal; every test gets a fresh tag (see Tableau.tests_posted)."""
    tab = Tableau(budget, exclusive)
    tab.tests_posted = []
    for f in kb.sigma:
        tab.add_entry(tab.root, Entry(frozenset([Premise(f)]), f))
    for goal in tests:
        tag = tab.new_test_tag()
        t = Test(neg(goal), tag)
        tab.add_entry(tab.root, Entry(frozenset([t]), t.formula))
        tab.tests_posted.append((tag, goal))
    return tab


@dataclass
class ProveResult:
    arguments: tuple[Argument, ...]
    inconsistencies: tuple[Argument, ...]
    complete: bool
    tableau: Tableau


def prove(kb: KnowledgeBase, goal: Formula, budget: Budget | None = None) -> ProveResult:
    """Refutation proof: close the tableau around ~goal and read arguments
    off the closure supports containing exactly that test."""
    tab = init_root(kb, [goal], budget)
    tab.saturate()
    supports, exhaustive = tab.closure_supports(max_tests=1)
    goal_tag = tab.tests_posted[0][0]
    args: dict[Argument, None] = {}
    incons: dict[Argument, None] = {}
    for s in supports:
        if len(s.tests) == 0:
            incons.setdefault(Argument(s.elements, FALSE))
        elif s.tests == (goal_tag,):
            rest = frozenset(el for el in s.elements if not isinstance(el, Test))
            args.setdefault(Argument(rest, goal))
    return ProveResult(tuple(args), tuple(incons),
                       tab.complete and exhaustive, tab)


# ---------------------------------------------------------------------------
# Dumps

def render_entry(e: Entry) -> str:
    return "(%s, %s)" % (render_support(e.support), render_formula(e.formula))


def tableau_to_text(tab: Tableau) -> str:
    lines = []

    def walk(n: Node, depth: int, shown: set):
        fresh = [e for e in n.entries if e not in shown]
        label = "; ".join(render_entry(e) for e in fresh) or "(no new entries)"
        status = " [closed]" if n.closure_records and n.is_leaf() else ""
        lines.append("%s- %s%s" % ("  " * depth, label, status))
        for c in n.children:
            walk(c, depth + 1, shown | set(fresh))

    walk(tab.root, 0, set())
    return "\n".join(lines) + "\n"


def tableau_to_dot(tab: Tableau) -> str:
    out = ["digraph tableau {", '  node [shape=box, fontname="monospace"];']

    def esc(s: str) -> str:
        return s.replace("\\", "\\\\").replace('"', '\\"')

    def walk(n: Node, shown: set):
        fresh = [e for e in n.entries if e not in shown]
        label = "\\n".join(esc(render_entry(e)) for e in fresh) or "(inherited)"
        if n.closure_records and n.is_leaf():
            label += "\\n[closed]"
        out.append('  n%d [label="%s"];' % (n.nid, label))
        for c in n.children:
            out.append("  n%d -> n%d;" % (n.nid, c.nid))
            walk(c, shown | set(fresh))

    walk(tab.root, set())
    out.append("}")
    return "\n".join(out) + "\n"
