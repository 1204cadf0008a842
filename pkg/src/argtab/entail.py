"""Propositional entailment by truth tables over bit columns.

Each propositional unit (ground atom, or an opaque quantified subformula)
gets one variable; a formula evaluates to an integer whose bit j is the
truth value under assignment j.  Treating quantified subformulas as opaque
units keeps the check sound for first-order inputs: skeleton entailment
implies entailment, it just may miss quantifier-level consequences.
"""

from __future__ import annotations

from .lang import (
    And, Atom, Exists, Falsity, ForAll, Formula, Iff, Implies, Not, Or, Truth,
)
from .lang.printer import render_formula

MAX_UNITS = 20


class OracleLimitError(Exception):
    """Raised when a truth-table check would need too many variables."""


def _units(f: Formula, acc: dict[str, None]):
    if isinstance(f, (Atom, ForAll, Exists)):
        acc.setdefault(render_formula(f), None)
    elif isinstance(f, Not):
        _units(f.sub, acc)
    elif isinstance(f, (And, Or, Implies, Iff)):
        _units(f.left, acc)
        _units(f.right, acc)


class TruthTable:
    """Bit-parallel evaluator for a fixed universe of formulas."""

    def __init__(self, formulas):
        acc: dict[str, None] = {}
        for f in formulas:
            _units(f, acc)
        self.names = list(acc)
        n = len(self.names)
        if n > MAX_UNITS:
            raise OracleLimitError("%d propositional units exceed the %d limit"
                                   % (n, MAX_UNITS))
        self.mask = (1 << (1 << n)) - 1
        self.env = {}
        for i, name in enumerate(self.names):
            col = 0
            for j in range(1 << n):
                if (j >> i) & 1:
                    col |= 1 << j
            self.env[name] = col
        self._cache: dict[Formula, int] = {}

    def column(self, f: Formula) -> int:
        got = self._cache.get(f)
        if got is not None:
            return got
        if isinstance(f, Truth):
            col = self.mask
        elif isinstance(f, Falsity):
            col = 0
        elif isinstance(f, (Atom, ForAll, Exists)):
            col = self.env[render_formula(f)]
        elif isinstance(f, Not):
            col = self.mask & ~self.column(f.sub)
        elif isinstance(f, And):
            col = self.column(f.left) & self.column(f.right)
        elif isinstance(f, Or):
            col = self.column(f.left) | self.column(f.right)
        elif isinstance(f, Implies):
            col = (self.mask & ~self.column(f.left)) | self.column(f.right)
        else:
            assert isinstance(f, Iff)
            col = self.mask & ~(self.column(f.left) ^ self.column(f.right))
        self._cache[f] = col
        return col

    def models_of(self, formulas) -> int:
        col = self.mask
        for f in formulas:
            col &= self.column(f)
        return col

    def satisfiable(self, formulas) -> bool:
        return self.models_of(formulas) != 0

    def entails(self, premises, conclusion: Formula) -> bool:
        return self.models_of(premises) & ~self.column(conclusion) & self.mask == 0


def satisfiable(formulas) -> bool:
    formulas = list(formulas)
    return TruthTable(formulas).satisfiable(formulas)


def entails(premises, conclusion: Formula) -> bool:
    premises = list(premises)
    return TruthTable(premises + [conclusion]).entails(premises, conclusion)
