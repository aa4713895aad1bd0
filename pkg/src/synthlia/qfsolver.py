"""Exact satisfiability for quantifier-free LIA+Bool ground formulas.

Architecture: boolean search over the atom skeleton (atoms branched in
creation order, false branch first), with an exact integer feasibility
check per satisfying conjunction of literals. Integer feasibility is the
omega test: equality elimination with the symmetric-modulus trick, then
Fourier-Motzkin elimination with dark-shadow certification and splinter
enumeration where the shadow is inexact. All arithmetic is exact.

Int-sorted ite is compiled away up front by introducing a fresh variable
constrained by two guarded equalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .terms import (
    BOOL,
    INT,
    App,
    BoolConst,
    IntConst,
    SortError,
    Term,
    Var,
    and_,
    eq,
    fresh_name,
    free_vars,
    implies,
    not_,
    sort_of,
    uf_names,
)

Assignment = dict


class ResourceLimit(Exception):
    """The solver exceeded its iteration budget; never silently wrong."""


@dataclass(frozen=True)
class Sat:
    model: Assignment


@dataclass(frozen=True)
class Unsat:
    pass


SatResult = Union[Sat, Unsat]

UNSAT = Unsat()

# A linear expression over integer variables: ({var: coeff}, constant).
LinExpr = tuple[dict, int]


def _lexpr(t: Term) -> LinExpr:
    if isinstance(t, IntConst):
        return ({}, t.value)
    if isinstance(t, Var):
        return ({t.name: 1}, 0)
    assert isinstance(t, App)
    if t.op == "+":
        coeffs: dict = {}
        const = 0
        for a in t.args:
            c2, k2 = _lexpr(a)
            const += k2
            for v, c in c2.items():
                coeffs[v] = coeffs.get(v, 0) + c
        return ({v: c for v, c in coeffs.items() if c}, const)
    if t.op == "*":
        k = t.args[0]
        assert isinstance(k, IntConst)
        coeffs, const = _lexpr(t.args[1])
        return ({v: c * k.value for v, c in coeffs.items() if c * k.value},
                const * k.value)
    raise SortError(f"non-linear term {t.op} reached the arithmetic core")


def _sub_expr(a: LinExpr, b: LinExpr) -> LinExpr:
    coeffs = dict(a[0])
    for v, c in b[0].items():
        coeffs[v] = coeffs.get(v, 0) - c
        if coeffs[v] == 0:
            del coeffs[v]
    return (coeffs, a[1] - b[1])


# ---------------------------------------------------------------------------
# Omega test. Constraints are LinExpr with the convention expr >= 0 for
# inequalities and expr == 0 for equalities.


def _eval_expr(e: LinExpr, model: dict) -> int:
    return e[1] + sum(c * model.get(v, 0) for v, c in e[0].items())


def _pick_value(lo: Optional[int], hi: Optional[int]) -> int:
    # Prefer small models: 0 when the bounds allow it.
    if lo is not None and hi is not None:
        assert lo <= hi
        return min(max(0, lo), hi)
    if lo is not None:
        return max(0, lo)
    if hi is not None:
        return min(0, hi)
    return 0


def _symmetric_mod(a: int, m: int) -> int:
    r = a % m
    if 2 * r >= m:
        r -= m
    return r


class _Omega:
    def __init__(self, limit: int = 200000):
        self.budget = limit

    def _tick(self):
        self.budget -= 1
        if self.budget <= 0:
            raise ResourceLimit("omega test budget exceeded")

    def solve(self, eqs: list[LinExpr], ineqs: list[LinExpr]) -> Optional[dict]:
        """A model of the conjunction, or None if none exists."""
        self._tick()
        substs: list[tuple[str, LinExpr]] = []
        eqs = list(eqs)
        ineqs = list(ineqs)
        while eqs:
            e = eqs.pop()
            coeffs, const = e
            if not coeffs:
                if const != 0:
                    return None
                continue
            g = math.gcd(*coeffs.values())
            if const % g != 0:
                return None
            coeffs = {v: c // g for v, c in coeffs.items()}
            const //= g
            unit = min((v for v, c in coeffs.items() if abs(c) == 1),
                       default=None)
            if unit is not None:
                # v = -(rest)/coeff  with coeff = +-1
                c = coeffs[unit]
                rest = ({w: -cw * c for w, cw in coeffs.items() if w != unit},
                        -const * c)
                substs.append((unit, rest))
                eqs = [self._subst(x, unit, rest) for x in eqs]
                ineqs = [self._subst(x, unit, rest) for x in ineqs]
                continue
            # No unit coefficient: symmetric-modulus reduction (omega
            # test equality step). The derived equation has coefficient
            # -+1 on vk, so vk is eliminated in favour of a fresh sigma,
            # shrinking the coefficients of the original equation.
            vk = min(coeffs, key=lambda v: (abs(coeffs[v]), v))
            m = abs(coeffs[vk]) + 1
            sigma = fresh_name("omega")
            newc = {v: _symmetric_mod(c, m) for v, c in coeffs.items()}
            newc[sigma] = -m
            newc = {v: c for v, c in newc.items() if c}
            newk = _symmetric_mod(const, m)
            s = newc[vk]  # +-1
            rest = ({w: -cw * s for w, cw in newc.items() if w != vk},
                    -newk * s)
            substs.append((vk, rest))
            eqs.append(self._subst((coeffs, const), vk, rest))
            eqs = [self._subst(x, vk, rest) for x in eqs]
            ineqs = [self._subst(x, vk, rest) for x in ineqs]
        model = self._solve_ineqs([x for x in ineqs])
        if model is None:
            return None
        for v, rest in reversed(substs):
            model[v] = _eval_expr(rest, model)
        return model

    def _subst(self, e: LinExpr, v: str, repl: LinExpr) -> LinExpr:
        coeffs, const = e
        if v not in coeffs:
            return e
        c = coeffs[v]
        out = {w: cw for w, cw in coeffs.items() if w != v}
        for w, cw in repl[0].items():
            out[w] = out.get(w, 0) + c * cw
            if out[w] == 0:
                del out[w]
        return (out, const + c * repl[1])

    def _tighten(self, ineqs: list[LinExpr]) -> Optional[list[LinExpr]]:
        out = []
        for coeffs, const in ineqs:
            if not coeffs:
                if const < 0:
                    return None
                continue
            g = math.gcd(*coeffs.values())
            if g > 1:
                coeffs = {v: c // g for v, c in coeffs.items()}
                const = math.floor(const / g)
            out.append((coeffs, const))
        return out

    def _solve_ineqs(self, ineqs: list[LinExpr]) -> Optional[dict]:
        self._tick()
        tight = self._tighten(ineqs)
        if tight is None:
            return None
        ineqs = tight
        if not ineqs:
            return {}
        all_vars = sorted({v for c, _ in ineqs for v in c})
        if not all_vars:
            return {}
        # Prefer a variable whose elimination is exact, then few pairs.
        def rank(v):
            lows = [c[v] for c, _ in ineqs if c.get(v, 0) > 0]
            ups = [-c[v] for c, _ in ineqs if c.get(v, 0) < 0]
            exact = all(c == 1 for c in lows) or all(c == 1 for c in ups)
            return (not exact, len(lows) * len(ups), v)

        var = min(all_vars, key=rank)
        lowers = []   # (a, rest): a*var + rest >= 0, a > 0  ->  var >= -rest/a
        uppers = []   # (b, rest): -b*var + rest >= 0, b > 0 ->  var <= rest/b
        rest_cs = []
        for coeffs, const in ineqs:
            c = coeffs.get(var, 0)
            others = ({w: cw for w, cw in coeffs.items() if w != var}, const)
            if c > 0:
                lowers.append((c, others))
            elif c < 0:
                uppers.append((-c, others))
            else:
                rest_cs.append((coeffs, const))

        def assemble(model):
            lo = hi = None
            for a, e in lowers:
                b = -(_eval_expr(e, model) // a)  # ceil(-e/a)
                lo = b if lo is None else max(lo, b)
            for b_, e in uppers:
                u = _eval_expr(e, model) // b_  # floor(e/b)
                hi = u if hi is None else min(hi, u)
            model[var] = _pick_value(lo, hi)
            return model

        if not lowers or not uppers:
            model = self._solve_ineqs(rest_cs)
            return None if model is None else assemble(model)

        exact = (all(a == 1 for a, _ in lowers)
                 or all(b == 1 for b, _ in uppers))
        real = list(rest_cs)
        dark = list(rest_cs)
        for a, e in lowers:       # var >= -e/a
            for b, f in uppers:   # var <= f/b
                # real: a*f + b*e >= 0 ; dark subtracts (a-1)(b-1)
                comb = self._combine(a, e, b, f, 0)
                real.append(comb)
                dark.append(self._combine(a, e, b, f, (a - 1) * (b - 1)))
        if exact:
            model = self._solve_ineqs(real)
            return None if model is None else assemble(model)
        model = self._solve_ineqs(dark)
        if model is not None:
            return assemble(model)
        if self._solve_ineqs(real) is None:
            return None
        # Shadow gap: enumerate splinters a*var = -e + i.
        bmax = max(b for b, _ in uppers)
        for a, e in lowers:
            top = (a * bmax - a - bmax) // bmax
            for i in range(top + 1):
                eq_c = dict(e[0])
                eq_c[var] = eq_c.get(var, 0) + a
                model = self.solve([(eq_c, e[1] - i)], ineqs)
                if model is not None:
                    return model
        return None

    @staticmethod
    def _combine(a: int, e: LinExpr, b: int, f: LinExpr, slack: int) -> LinExpr:
        coeffs = {v: a * c for v, c in f[0].items()}
        for v, c in e[0].items():
            coeffs[v] = coeffs.get(v, 0) + b * c
            if coeffs[v] == 0:
                del coeffs[v]
        return (coeffs, a * f[1] + b * e[1] - slack)


def lia_feasible(eqs: list[LinExpr], ineqs: list[LinExpr],
                 limit: int = 200000) -> Optional[dict]:
    return _Omega(limit).solve(eqs, ineqs)


# ---------------------------------------------------------------------------
# Boolean layer


def _compile_int_ite(t: Term, defs: list) -> Term:
    """Replace Int-sorted ite nodes by fresh variables with guarded
    equalities collected in ``defs``."""
    if isinstance(t, (IntConst, BoolConst, Var)):
        return t
    assert isinstance(t, App)
    args = tuple(_compile_int_ite(a, defs) for a in t.args)
    t2 = App(t.op, args)
    if t.op == "ite" and sort_of(t) == INT:
        v = Var(fresh_name("ite"), INT)
        defs.append(implies(args[0], eq(v, args[1])))
        defs.append(implies(not_(args[0]), eq(v, args[2])))
        return v
    return t2


@dataclass(frozen=True)
class _Atom:
    kind: str          # "le" (expr <= 0), "eq" (expr == 0), "bvar"
    expr: tuple        # frozen LinExpr or variable name
    index: int


class _Checker:
    def __init__(self, f: Term, limit: int):
        self.limit = limit
        self.budget = limit
        self.atoms: list[_Atom] = []
        self.atom_ids: dict = {}
        defs: list = []
        body = _compile_int_ite(f, defs)
        self.root = self._build(and_(body, *defs))

    # boolean AST: True/False, int atom index, ("not", n), ("and"/"or", tuple)
    def _atom(self, kind: str, payload) -> int:
        key = (kind, payload)
        if key not in self.atom_ids:
            self.atom_ids[key] = len(self.atoms)
            self.atoms.append(_Atom(kind, payload, len(self.atoms)))
        return self.atom_ids[key]

    def _cmp_atom(self, diff: LinExpr, kind: str):
        coeffs, const = diff
        if not coeffs:
            return (const <= 0) if kind == "le" else (const == 0)
        items = tuple(sorted(coeffs.items()))
        return self._atom(kind, (items, const))

    def _build(self, t: Term):
        if isinstance(t, BoolConst):
            return t.value
        if isinstance(t, Var):
            return self._atom("bvar", t.name)
        assert isinstance(t, App)
        op = t.op
        if op == "not":
            return _neg(self._build(t.args[0]))
        if op in ("and", "or"):
            return (op, tuple(self._build(a) for a in t.args))
        if op == "=>":
            return ("or", (_neg(self._build(t.args[0])),
                           self._build(t.args[1])))
        if op == "ite":  # boolean ite
            c = self._build(t.args[0])
            return ("and", (("or", (_neg(c), self._build(t.args[1]))),
                            ("or", (c, self._build(t.args[2])))))
        if op in ("<=", "<", ">=", ">"):
            a, b = _lexpr(t.args[0]), _lexpr(t.args[1])
            if op == "<=":
                d = _sub_expr(a, b)
            elif op == "<":
                d = _sub_expr(a, b)
                d = (d[0], d[1] + 1)
            elif op == ">=":
                d = _sub_expr(b, a)
            else:
                d = _sub_expr(b, a)
                d = (d[0], d[1] + 1)
            return self._cmp_atom(d, "le")
        if op == "=":
            if sort_of(t.args[0]) == INT:
                return self._cmp_atom(_sub_expr(_lexpr(t.args[0]),
                                                _lexpr(t.args[1])), "eq")
            x, y = self._build(t.args[0]), self._build(t.args[1])
            return ("and", (("or", (_neg(x), y)), ("or", (x, _neg(y)))))
        raise SortError(f"unexpected operator {op!r}")

    # -- search ------------------------------------------------------------

    def check(self) -> SatResult:
        lits: dict[int, bool] = {}
        model = self._dpll(self.root, lits)
        if model is None:
            return UNSAT
        return Sat(model)

    def _simplify(self, node, lits):
        if isinstance(node, bool):
            return node
        if isinstance(node, int):
            return lits.get(node, node)
        op, parts = node
        if op == "not":
            s = self._simplify(parts, lits)
            return _neg(s)
        out = []
        for p in parts:
            s = self._simplify(p, lits)
            if isinstance(s, bool):
                if (s and op == "or") or (not s and op == "and"):
                    return s
                continue
            out.append(s)
        if not out:
            return op == "and"
        if len(out) == 1:
            return out[0]
        return (op, tuple(out))

    def _first_atom(self, node) -> int:
        if isinstance(node, int):
            return node
        op, parts = node
        if op == "not":
            return self._first_atom(parts)
        return min(self._first_atom(p) for p in parts)

    def _charge(self, n: int) -> None:
        self.budget -= n
        if self.budget <= 0:
            raise ResourceLimit("propositional search budget exceeded")

    def _dpll(self, node, lits) -> Optional[Assignment]:
        self._charge(1)
        node = self._simplify(node, lits)
        if node is False:
            return None
        if node is True:
            return self._theory_model(lits)
        a = self._first_atom(node)
        for val in (True, False):
            lits[a] = val
            m = self._dpll(node, lits)
            if m is not None:
                return m
            del lits[a]
        return None

    def _theory_model(self, lits) -> Optional[Assignment]:
        eqs: list[LinExpr] = []
        ineqs: list[LinExpr] = []
        diseqs: list[LinExpr] = []
        bools: dict[str, bool] = {}
        for idx, val in lits.items():
            atom = self.atoms[idx]
            if atom.kind == "bvar":
                bools[atom.expr] = val
                continue
            items, const = atom.expr
            e = (dict(items), const)
            if atom.kind == "le":
                if val:
                    ineqs.append(_negate_ge(e))       # e <= 0 -> -e >= 0
                else:
                    ineqs.append((e[0], e[1] - 1))    # e >= 1
            else:
                if val:
                    eqs.append(e)
                else:
                    diseqs.append(e)
        return self._with_diseqs(eqs, ineqs, diseqs, bools)

    def _with_diseqs(self, eqs, ineqs, diseqs, bools) -> Optional[Assignment]:
        if not diseqs:
            self._charge(50)
            m = lia_feasible(eqs, ineqs, self.limit)
            if m is None:
                return None
            out: Assignment = dict(bools)
            for v, x in m.items():
                # omega!/ite! variables are solver-internal
                if not v.startswith("omega!") and not v.startswith("ite!"):
                    out[v] = x
            return out
        head, rest = diseqs[0], diseqs[1:]
        for branch in ((head[0], head[1] - 1),                       # e >= 1
                       ({v: -c for v, c in head[0].items()},
                        -head[1] - 1)):                              # -e >= 1
            m = self._with_diseqs(eqs, ineqs + [branch], rest, bools)
            if m is not None:
                return m
        return None


def _neg(node):
    if isinstance(node, bool):
        return not node
    if isinstance(node, tuple) and node[0] == "not":
        return node[1]
    return ("not", node)


def _negate_ge(e: LinExpr) -> LinExpr:
    return ({v: -c for v, c in e[0].items()}, -e[1])


# ---------------------------------------------------------------------------
# Public interface


def check_sat(f: Term, limit: int = 200000) -> SatResult:
    """Decide satisfiability of a ground formula; free variables are
    treated as existential and a satisfying assignment is returned."""
    if sort_of(f) != BOOL:
        raise SortError("check_sat expects a boolean formula")
    if uf_names(f):
        raise SortError("check_sat cannot handle unknown functions")
    result = _Checker(f, limit).check()
    if isinstance(result, Sat):
        # Total model over the formula's variables.
        model = dict(result.model)
        for v in free_vars(f):
            model.setdefault(v.name, 0 if v.sort == INT else False)
        return Sat(model)
    return result


def check_valid(f: Term, limit: int = 200000) -> bool:
    return isinstance(check_sat(not_(f), limit), Unsat)


def are_equivalent(t1: Term, t2: Term, limit: int = 200000) -> bool:
    """Theory equivalence of two terms of equal base sort, with free
    variables read universally."""
    s1, s2 = sort_of(t1), sort_of(t2)
    if s1 != s2:
        raise SortError("cannot compare terms of different sorts")
    return isinstance(check_sat(not_(eq(t1, t2)), limit), Unsat)
