"""Knowledge-base parser.

Concrete syntax (UTF-8, `#` starts a line comment, statements end with `.`):

    sigma: p | q.
    rule r1: p ~> r.
    rule r2: s ~> not(r1).
    pref r1 < r2.
    pref [p | q] < [~q].
    query s.

Variables start uppercase, everything else lowercase.  `sigma`, `rule`,
`pref`, `query`, `not`, `forall`, `exists`, `true` and `false` are reserved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    And, Atom, Const, DefeasibleRule, Exists, FALSE, ForAll, Formula, Func,
    Iff, Implies, KnowledgeBase, Not, Or, RuleNegation, Term, TRUE, Var,
    free_vars,
)


class KBError(Exception):
    """Base class for knowledge-base loading failures."""


class ParseError(KBError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__("%s (line %d, column %d)" % (message, line, col))
        self.line = line
        self.col = col


class ArityError(KBError):
    pass


class PreferenceCycleError(KBError):
    pass


class UnknownRuleError(KBError):
    pass


class FreeVariableError(KBError):
    pass


KEYWORDS = {"sigma", "rule", "pref", "query", "not", "forall", "exists",
            "true", "false"}

_TOKEN_RE = re.compile(r"""
    (?P<WS>\s+)
  | (?P<COMMENT>\#[^\n]*)
  | (?P<SQUIG>~>)
  | (?P<IFF><->)
  | (?P<ARROW>->)
  | (?P<LT><)
  | (?P<TILDE>~)
  | (?P<AMP>&)
  | (?P<PIPE>\|)
  | (?P<DOT>\.)
  | (?P<COLON>:)
  | (?P<LPAREN>\()
  | (?P<RPAREN>\))
  | (?P<LBRACK>\[)
  | (?P<RBRACK>\])
  | (?P<COMMA>,)
  | (?P<VAR>[A-Z][A-Za-z0-9_]*)
  | (?P<IDENT>[a-z][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character %r" % text[pos],
                             line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, value, line, m.start() - line_start + 1))
        nl = value.count("\n")
        if nl:
            line += nl
            line_start = m.start() + value.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.pred_arity: dict[str, int] = {}
        self.term_arity: dict[str, int] = {}   # constants have arity 0

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str = "") -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError("expected %s, found %r" % (what or kind, tok.text or "end of input"),
                             tok.line, tok.col)
        return self.next()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.text == word

    def expect_keyword(self, word: str):
        tok = self.peek()
        if not self.at_keyword(word):
            raise ParseError("expected %r, found %r" % (word, tok.text or "end of input"),
                             tok.line, tok.col)
        self.next()

    # -- statements --------------------------------------------------------

    def parse_kb(self):
        sigma: list[Formula] = []
        rules: list[tuple] = []      # (id token, antecedent, rhs)
        prefs: list[tuple] = []      # ((atomkind, payload, tok), same)
        queries: list[Formula] = []
        while self.peek().kind != "EOF":
            tok = self.peek()
            if self.at_keyword("sigma"):
                self.next()
                self.expect("COLON")
                f = self.parse_formula()
                if f not in sigma:
                    sigma.append(f)
            elif self.at_keyword("rule"):
                self.next()
                name = self.expect("IDENT", "rule id")
                if name.text in KEYWORDS:
                    raise ParseError("reserved word %r cannot name a rule" % name.text,
                                     name.line, name.col)
                self.expect("COLON")
                ant = self.parse_formula()
                self.expect("SQUIG", "'~>'")
                if self.at_keyword("not"):
                    self.next()
                    self.expect("LPAREN")
                    target = self.expect("IDENT", "rule id")
                    self.expect("RPAREN")
                    rhs = ("not", target)
                else:
                    rhs = ("formula", self.parse_formula())
                rules.append((name, ant, rhs))
            elif self.at_keyword("pref"):
                self.next()
                a = self.parse_prefatom()
                self.expect("LT", "'<'")
                b = self.parse_prefatom()
                prefs.append((a, b))
            elif self.at_keyword("query"):
                self.next()
                queries.append(self.parse_formula())
            else:
                raise ParseError("expected a statement, found %r" % (tok.text or "end of input"),
                                 tok.line, tok.col)
            self.expect("DOT", "'.' after statement")
        return sigma, rules, prefs, queries

    def parse_prefatom(self):
        tok = self.peek()
        if tok.kind == "LBRACK":
            self.next()
            f = self.parse_formula()
            self.expect("RBRACK")
            return ("formula", f, tok)
        name = self.expect("IDENT", "rule id or '[' formula ']'")
        return ("rule", name.text, name)

    # -- formulas ----------------------------------------------------------

    def parse_formula(self) -> Formula:
        f = self.parse_imp()
        while self.peek().kind == "IFF":
            self.next()
            f = Iff(f, self.parse_imp())
        return f

    def parse_imp(self) -> Formula:
        parts = [self.parse_or()]
        while self.peek().kind == "ARROW":
            self.next()
            parts.append(self.parse_or())
        f = parts[-1]
        for g in reversed(parts[:-1]):
            f = Implies(g, f)
        return f

    def parse_or(self) -> Formula:
        f = self.parse_and()
        while self.peek().kind == "PIPE":
            self.next()
            f = Or(f, self.parse_and())
        return f

    def parse_and(self) -> Formula:
        f = self.parse_unary()
        while self.peek().kind == "AMP":
            self.next()
            f = And(f, self.parse_unary())
        return f

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "TILDE":
            self.next()
            return Not(self.parse_unary())
        if self.at_keyword("forall") or self.at_keyword("exists"):
            kw = self.next().text
            var = self.expect("VAR", "a variable")
            self.expect("DOT", "'.' after quantified variable")
            body = self.parse_unary()
            return (ForAll if kw == "forall" else Exists)(var.text, body)
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "LPAREN":
            self.next()
            f = self.parse_formula()
            self.expect("RPAREN")
            return f
        if self.at_keyword("true"):
            self.next()
            return TRUE
        if self.at_keyword("false"):
            self.next()
            return FALSE
        if tok.kind == "IDENT":
            if tok.text in KEYWORDS:
                raise ParseError("reserved word %r cannot be a predicate" % tok.text,
                                 tok.line, tok.col)
            self.next()
            args: tuple[Term, ...] = ()
            if self.peek().kind == "LPAREN":
                self.next()
                items = [self.parse_term()]
                while self.peek().kind == "COMMA":
                    self.next()
                    items.append(self.parse_term())
                self.expect("RPAREN")
                args = tuple(items)
            seen = self.pred_arity.setdefault(tok.text, len(args))
            if seen != len(args):
                raise ArityError("predicate %r used with arity %d and %d"
                                 % (tok.text, seen, len(args)))
            return Atom(tok.text, args)
        raise ParseError("expected a formula, found %r" % (tok.text or "end of input"),
                         tok.line, tok.col)

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "VAR":
            self.next()
            return Var(tok.text)
        if tok.kind == "IDENT":
            if tok.text in KEYWORDS:
                raise ParseError("reserved word %r cannot be a term" % tok.text,
                                 tok.line, tok.col)
            self.next()
            if self.peek().kind == "LPAREN":
                self.next()
                items = [self.parse_term()]
                while self.peek().kind == "COMMA":
                    self.next()
                    items.append(self.parse_term())
                self.expect("RPAREN")
                seen = self.term_arity.setdefault(tok.text, len(items))
                if seen != len(items):
                    raise ArityError("function %r used with arity %d and %d"
                                     % (tok.text, seen, len(items)))
                return Func(tok.text, tuple(items))
            seen = self.term_arity.setdefault(tok.text, 0)
            if seen != 0:
                raise ArityError("symbol %r used both as constant and %d-ary function"
                                 % (tok.text, seen))
            return Const(tok.text)
        raise ParseError("expected a term, found %r" % (tok.text or "end of input"),
                         tok.line, tok.col)


def _rule_free_vars(rule_id: str, raw: dict, memo: dict, visiting: set) -> frozenset[str]:
    """Free variables of a rule, following defeater targets recursively."""
    if rule_id in memo:
        return memo[rule_id]
    if rule_id in visiting:
        return frozenset()  # defeater cycle; remaining vars added by the caller chain
    visiting.add(rule_id)
    ant, rhs = raw[rule_id]
    out = free_vars(ant)
    if rhs[0] == "formula":
        out |= free_vars(rhs[1])
    else:
        out |= _rule_free_vars(rhs[1].text, raw, memo, visiting)
    visiting.discard(rule_id)
    memo[rule_id] = out
    return out


def parse_knowledge_base(text: str) -> KnowledgeBase:
    p = _Parser(text)
    sigma, raw_rules, raw_prefs, queries = p.parse_kb()

    for f in sigma:
        if free_vars(f):
            raise FreeVariableError(
                "free variables %s outside a rule" % sorted(free_vars(f)))
    for f in queries:
        if free_vars(f):
            raise FreeVariableError(
                "free variables %s in query" % sorted(free_vars(f)))

    raw: dict[str, tuple] = {}
    order = []
    for name, ant, rhs in raw_rules:
        if name.text in raw:
            raise KBError("duplicate rule id %r" % name.text)
        raw[name.text] = (ant, rhs)
        order.append(name.text)
    for name, ant, rhs in raw_rules:
        if rhs[0] == "not" and rhs[1].text not in raw:
            raise UnknownRuleError("rule %r undercuts undeclared rule %r"
                                   % (name.text, rhs[1].text))

    memo: dict[str, frozenset[str]] = {}
    rules = []
    for rid in order:
        ant, rhs = raw[rid]
        fv = _rule_free_vars(rid, raw, memo, set())
        if rhs[0] == "formula":
            cons: Formula | RuleNegation = rhs[1]
        else:
            target = rhs[1].text
            cons = RuleNegation(target, tuple(sorted(
                _rule_free_vars(target, raw, memo, set()))))
        rules.append(DefeasibleRule(rid, ant, cons, tuple(sorted(fv))))

    prefs = []
    for a, b in raw_prefs:
        pa = _resolve_prefatom(a, sigma, raw)
        pb = _resolve_prefatom(b, sigma, raw)
        if pa[0] != pb[0]:
            raise KBError("preference relates a %s to a %s" % (pa[0], pb[0]))
        if (pa, pb) not in prefs:
            prefs.append((pa, pb))

    kb = KnowledgeBase(tuple(sigma), tuple(rules), tuple(prefs), tuple(queries))
    for a, b in kb.preference_closure():
        if a == b:
            raise PreferenceCycleError("preference order contains a cycle through %r" % (a[1],))
    return kb


def _resolve_prefatom(atom, sigma, raw):
    kind, payload, tok = atom
    if kind == "rule":
        if payload not in raw:
            raise UnknownRuleError("preference names undeclared rule %r" % payload)
        return ("rule", payload)
    if payload not in sigma:
        raise KBError("preference formula %r is not a sigma statement"
                      % _render_safe(payload))
    return ("formula", payload)


def _render_safe(f):
    from .printer import render_formula
    return render_formula(f)
