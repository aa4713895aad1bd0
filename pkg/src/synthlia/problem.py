"""Synthesis problems, grammars and solutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .terms import (
    BOOL,
    App,
    BoolConst,
    FunSort,
    IntConst,
    Lambda,
    SortError,
    Term,
    UFApp,
    Var,
    beta_reduce,
    free_vars,
    sort_of,
    uf_names,
    well_sorted,
)


class GrammarError(Exception):
    """A grammar fails validation (unknown symbol, unproductive rule, ...)."""


@dataclass(frozen=True)
class Grammar:
    """Production system (s0, S, R).

    Nonterminal occurrences inside rule right-hand sides are represented
    as Vars whose name is the nonterminal; ``params`` lists the formal
    parameter names the right-hand sides may mention.
    """

    start: str
    nonterminals: dict[str, str]  # name -> base sort
    rules: tuple[tuple[str, Term], ...]  # (lhs, rhs skeleton)
    params: tuple[Var, ...] = ()

    def rules_of(self, nt: str) -> list[Term]:
        return [rhs for lhs, rhs in self.rules if lhs == nt]

    def validate(self) -> None:
        if self.start not in self.nonterminals:
            raise GrammarError(f"start symbol {self.start!r} not a nonterminal")
        pnames = {p.name for p in self.params}
        if pnames & set(self.nonterminals):
            raise GrammarError("parameter names clash with nonterminals")
        for lhs, rhs in self.rules:
            if lhs not in self.nonterminals:
                raise GrammarError(f"rule lhs {lhs!r} not a nonterminal")
            for v in free_vars(rhs):
                if v.name in self.nonterminals:
                    if v.sort != self.nonterminals[v.name]:
                        raise GrammarError(
                            f"nonterminal {v.name} used at sort {v.sort}")
                elif v.name not in pnames:
                    raise GrammarError(f"unknown symbol {v.name!r} in rule")
            if not well_sorted(rhs):
                raise GrammarError(f"ill-sorted rule for {lhs}")
            if sort_of(rhs) != self.nonterminals[lhs]:
                raise GrammarError(f"rule for {lhs} has wrong sort")
        self._check_productive()
        self._check_reachable()

    def _nts_in(self, rhs: Term) -> set[str]:
        return {v.name for v in free_vars(rhs) if v.name in self.nonterminals}

    def _check_productive(self) -> None:
        productive: set[str] = set()
        changed = True
        while changed:
            changed = False
            for lhs, rhs in self.rules:
                if lhs in productive:
                    continue
                if self._nts_in(rhs) <= productive:
                    productive.add(lhs)
                    changed = True
        dead = set(self.nonterminals) - productive
        if dead:
            raise GrammarError(f"unproductive nonterminals: {sorted(dead)}")

    def _check_reachable(self) -> None:
        reached = {self.start}
        frontier = [self.start]
        while frontier:
            nt = frontier.pop()
            for rhs in self.rules_of(nt):
                for n in self._nts_in(rhs):
                    if n not in reached:
                        reached.add(n)
                        frontier.append(n)
        unreached = set(self.nonterminals) - reached
        if unreached:
            raise GrammarError(f"unreachable nonterminals: {sorted(unreached)}")

    # -- generability ------------------------------------------------------

    def generates(self, t: Term, nt: Optional[str] = None) -> bool:
        """Whether ``t`` is derivable from nonterminal ``nt`` (default s0)."""
        return self._gen(t, nt or self.start, frozenset())

    def _gen(self, t: Term, nt: str, active: frozenset) -> bool:
        key = (t, nt)
        if key in active:
            return False
        active = active | {key}
        for rhs in self.rules_of(nt):
            if self._match(t, rhs, active):
                return True
        return False

    def _match(self, t: Term, skel: Term, active: frozenset) -> bool:
        if isinstance(skel, Var) and skel.name in self.nonterminals:
            return self._gen(t, skel.name, active)
        if isinstance(skel, (IntConst, BoolConst, Var)):
            return t == skel
        if not isinstance(t, App) or not isinstance(skel, App):
            return False
        if t.op != skel.op or len(t.args) != len(skel.args):
            return False
        return all(self._match(a, s, active)
                   for a, s in zip(t.args, skel.args))

    # -- size-ordered expansion -------------------------------------------

    def terms_of_size(self, nt: str, size: int,
                      _memo: Optional[dict] = None) -> list[Term]:
        """All S-free terms derivable from ``nt`` with exactly ``size``
        non-nullary applications (brute-force expansion)."""
        memo = _memo if _memo is not None else {}
        key = (nt, size)
        if key in memo:
            return memo[key]
        memo[key] = []  # cut unit-rule cycles
        out: list[Term] = []
        for rhs in self.rules_of(nt):
            out.extend(self._fill(rhs, size, memo))
        memo[key] = out
        return out

    def _fill(self, skel: Term, size: int, memo: dict) -> list[Term]:
        if isinstance(skel, Var) and skel.name in self.nonterminals:
            return self.terms_of_size(skel.name, size, memo)
        if isinstance(skel, (IntConst, BoolConst, Var)):
            return [skel] if size == 0 else []
        assert isinstance(skel, App)
        cost = 1 if skel.args else 0
        budget = size - cost
        if budget < 0:
            return []
        out = []
        for split in _compositions(budget, len(skel.args)):
            parts = [self._fill(a, s, memo)
                     for a, s in zip(skel.args, split)]
            if any(not p for p in parts):
                continue
            out.extend(App(skel.op, combo)
                       for combo in _product(parts))
        return out

    def terms_upto(self, max_size: int, nt: Optional[str] = None) -> list[Term]:
        memo: dict = {}
        nt = nt or self.start
        out = []
        for s in range(max_size + 1):
            out.extend(self.terms_of_size(nt, s, memo))
        return out


def _compositions(total: int, n: int):
    if n == 0:
        if total == 0:
            yield ()
        return
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, n - 1):
            yield (first,) + rest


def _product(parts: list[list[Term]]):
    if not parts:
        yield ()
        return
    for head in parts[0]:
        for rest in _product(parts[1:]):
            yield (head,) + rest


@dataclass(frozen=True)
class SynthFun:
    name: str
    fsort: FunSort
    param_names: tuple[str, ...]
    grammar: Optional[Grammar] = None

    def param_vars(self) -> tuple[Var, ...]:
        return tuple(Var(n, s) for n, s in zip(self.param_names,
                                               self.fsort.params))


@dataclass(frozen=True)
class SynthProblem:
    functions: tuple[SynthFun, ...]
    universals: tuple[Var, ...]
    constraint: Term

    def validate(self) -> None:
        fnames = {f.name for f in self.functions}
        if len(fnames) != len(self.functions):
            raise GrammarError("duplicate function names")
        uni = set(self.universals)
        for v in free_vars(self.constraint):
            if v not in uni:
                raise SortError(f"free variable {v.name} is not declared")
        for name in uf_names(self.constraint):
            if name not in fnames:
                raise SortError(f"unknown function {name!r} in constraint")
        if sort_of(self.constraint) != BOOL:
            raise SortError("constraint must be boolean")
        for f in self.functions:
            if len(f.param_names) != len(f.fsort.params):
                raise SortError(f"parameter list of {f.name} has wrong length")
            if f.grammar is not None:
                f.grammar.validate()
                start_sort = f.grammar.nonterminals[f.grammar.start]
                if start_sort != f.fsort.ret:
                    raise GrammarError(
                        f"grammar start sort {start_sort} does not match "
                        f"return sort of {f.name}")

    def function(self, name: str) -> SynthFun:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)


Solution = dict  # function name -> Lambda


def check_solution_shape(p: SynthProblem, s: Solution) -> None:
    for f in p.functions:
        if f.name not in s:
            raise SortError(f"solution misses a binding for {f.name}")
        lam = s[f.name]
        if not isinstance(lam, Lambda):
            raise SortError(f"binding for {f.name} is not a lambda")
        if tuple(v.sort for v in lam.params) != f.fsort.params:
            raise SortError(f"lambda parameters of {f.name} have wrong sorts")
        if uf_names(lam.body):
            raise SortError("solution bodies must not mention unknown functions")


def apply_solution(p: SynthProblem, s: Solution) -> Term:
    """Constraint of ``p`` with every unknown-function application replaced
    by the beta-reduced solution body."""
    check_solution_shape(p, s)

    def rec(t: Term) -> Term:
        if isinstance(t, UFApp):
            args = tuple(rec(a) for a in t.args)
            return beta_reduce(s[t.fname], args)
        if isinstance(t, App):
            return App(t.op, tuple(rec(a) for a in t.args))
        return t

    return rec(p.constraint)
