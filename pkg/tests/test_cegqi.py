import random

import pytest

from synthlia.cegqi import (
    GaveUp,
    ReconstructionFailure,
    Solved,
    extract_solution,
    reconstruct,
    select_terms,
    solve_cegqi,
)
from synthlia.classify import to_first_order, to_single_invocation
from synthlia.problem import Grammar, SynthFun, SynthProblem, apply_solution
from synthlia.qfsolver import are_equivalent, check_valid
from synthlia.rewrite import canonical_key, normalize
from synthlia.terms import (
    BOOL,
    INT,
    App,
    FunSort,
    IntConst,
    Lambda,
    UFApp,
    Var,
    add,
    and_,
    evaluate,
    free_vars,
    gt,
    ite,
    ivar,
    le,
    lt,
    substitute,
)

from helpers import load_golden, random_bool_term

x, y = ivar("x"), ivar("y")


def test_between_solved_in_two_iterations():
    p = load_golden("between.sy")
    fo = to_first_order(p)
    res, iters = solve_cegqi(fo)
    assert isinstance(res, Solved)
    assert iters == 2
    keys = [canonical_key(t[0]) for t in res.trace.instances]
    assert keys == [canonical_key(add(x, IntConst(1))),
                    canonical_key(add(y, IntConst(1)))]
    sol = extract_solution(res.trace, p, fo)
    want = ite(le(x, add(y, IntConst(1))),
               add(x, IntConst(1)), add(y, IntConst(1)))
    assert are_equivalent(sol["f"].body, want)
    assert check_valid(apply_solution(p, sol))


def test_io_points_trivial_solution_table():
    p = load_golden("successor_points.sy")
    fo = to_first_order(p)
    res, iters = solve_cegqi(fo)
    assert isinstance(res, Solved)
    assert iters == 3
    # The instances are the constant outputs, tried in point order.
    vals = [t[0] for t in res.trace.instances]
    assert vals == [IntConst(2), IntConst(3), IntConst(8)]
    sol = extract_solution(res.trace, p, fo)
    body = sol["f"].body
    for inp, out in ((1, 2), (2, 3), (7, 8)):
        assert evaluate(body, {"x": inp}) == out


def test_max_aux_roundtrip():
    p = to_single_invocation(load_golden("max_aux.sy"))
    fo = to_first_order(p)
    res, _ = solve_cegqi(fo)
    assert isinstance(res, Solved)
    sol = extract_solution(res.trace, p, fo)
    body = sol["f"].body
    for a, b in ((0, 0), (3, -5), (-5, 3), (7, 7), (-2, -9)):
        assert evaluate(body, {"x": a, "y": b}) == max(a, b)


def test_infeasible_conjecture():
    f = SynthFun("f", FunSort((INT,), INT), ("a",))
    p = SynthProblem(
        functions=(f,),
        universals=(x,),
        constraint=and_(gt(UFApp("f", f.fsort, (x,)), x),
                        lt(UFApp("f", f.fsort, (x,)), x)))
    res, _ = solve_cegqi(to_first_order(p))
    assert isinstance(res, GaveUp)
    assert res.reason == "infeasible"


def test_iteration_cap():
    p = load_golden("between.sy")
    res, iters = solve_cegqi(to_first_order(p), max_iters=0)
    assert isinstance(res, GaveUp)
    assert res.reason == "iteration-cap"
    assert iters == 0


def test_select_terms_prefers_satisfied_bounds():
    k = ivar("k")
    body = and_(le(x, k), le(k, y))
    model = {"x": 2, "y": 5, "k": 2}
    picked = select_terms(model, (k,), (), body)
    assert picked == (x,)  # the maximal satisfied lower bound


def test_select_terms_constant_fallback():
    k = ivar("k")
    body = le(add(k, k), y)  # non-unit coefficient: no usable bounds
    picked = select_terms({"y": 10, "k": 3}, (k,), (), body)
    assert picked == (IntConst(3),)


def test_extract_solution_needs_instances():
    p = load_golden("between.sy")
    fo = to_first_order(p)
    res, _ = solve_cegqi(fo, max_iters=0)
    with pytest.raises(ValueError):
        extract_solution(res.trace, p, fo)


def random_si_problem(rng: random.Random) -> SynthProblem:
    f = SynthFun("f", FunSort((INT, INT), INT), ("a", "b"))
    while True:
        t = random_bool_term(rng, depth=2)
        if ivar("z") in free_vars(t):
            break
    constraint = substitute(t, {"z": UFApp("f", f.fsort, (x, y))})
    return SynthProblem((f,), (x, y), constraint)


def test_random_single_invocation_soundness():
    rng = random.Random(42)
    solved = 0
    for _ in range(100):
        p = random_si_problem(rng)
        fo = to_first_order(p)
        res, iters = solve_cegqi(fo, max_iters=16)
        assert iters <= 16
        if isinstance(res, Solved):
            sol = extract_solution(res.trace, p, fo)
            assert check_valid(apply_solution(p, sol))
            solved += 1
        else:
            assert res.reason in ("infeasible", "iteration-cap",
                                  "resource-limit")
    assert solved > 20  # most random specs should be solvable


def test_instances_are_distinct():
    rng = random.Random(5)
    for _ in range(30):
        p = random_si_problem(rng)
        res, _ = solve_cegqi(to_first_order(p), max_iters=16)
        keys = [tuple(canonical_key(t) for t in inst)
                for inst in res.trace.instances]
        assert len(keys) == len(set(keys))


# ---------------------------------------------------------------------------
# Reconstruction


def restricted_grammar() -> Grammar:
    inode = Var("I", INT)
    bnode = Var("B", BOOL)
    rules = (
        ("I", IntConst(0)), ("I", IntConst(1)), ("I", x), ("I", y),
        ("I", App("+", (inode, inode))),
        ("I", App("ite", (bnode, inode, inode))),
        ("B", App(">", (inode, inode))),
        ("B", App("=", (inode, inode))),
        ("B", App("not", (bnode,))),
    )
    g = Grammar(start="I", nonterminals={"I": INT, "B": BOOL},
                rules=rules, params=(x, y))
    g.validate()
    return g


def test_reconstruct_repairs_the_condition():
    g = restricted_grammar()
    body = ite(le(x, add(y, IntConst(1))),
               add(x, IntConst(1)), add(y, IntConst(1)))
    sol = {"f": Lambda((x, y), body)}
    out = reconstruct(sol, g, budget=3)
    assert g.generates(out["f"].body)
    assert are_equivalent(out["f"].body, body)


def test_reconstruct_fails_on_ungenerable_targets():
    g = Grammar(start="I", nonterminals={"I": INT},
                rules=(("I", IntConst(0)), ("I", x)), params=(x, y))
    g.validate()
    with pytest.raises(ReconstructionFailure):
        reconstruct({"f": Lambda((x, y), y)}, g, budget=4)


def test_reconstruct_keeps_generable_bodies():
    g = restricted_grammar()
    body = ite(gt(x, y), x, y)
    out = reconstruct({"f": Lambda((x, y), body)}, g, budget=2)
    assert out["f"].body == body
