import random

import pytest

from synthlia.terms import (
    BOOL,
    INT,
    App,
    BoolConst,
    EvalError,
    FunSort,
    IntConst,
    Lambda,
    SortError,
    UFApp,
    Var,
    add,
    and_,
    beta_reduce,
    eq,
    evaluate,
    free_vars,
    fresh_name,
    ge,
    gt,
    implies,
    ite,
    ivar,
    le,
    mul,
    neg,
    or_,
    sort_of,
    sub,
    substitute,
    subterms,
    term_size,
    uf_apps,
    well_sorted,
)

from helpers import random_env, random_term

x, y, z = ivar("x"), ivar("y"), ivar("z")


def test_smart_constructors_normalize_subtraction():
    t = sub(x, y)
    assert t == App("+", (x, App("*", (IntConst(-1), y))))
    assert neg(IntConst(5)) == IntConst(-5)
    assert mul(3, IntConst(2)) == IntConst(6)
    assert add() == IntConst(0)
    assert add(x) == x
    assert and_() == BoolConst(True)
    assert or_() == BoolConst(False)


def test_sort_of():
    assert sort_of(add(x, IntConst(1))) == INT
    assert sort_of(le(x, y)) == BOOL
    assert sort_of(ite(le(x, y), x, y)) == INT
    f = FunSort((INT, INT), INT)
    assert sort_of(UFApp("f", f, (x, y))) == INT


def test_sort_errors():
    with pytest.raises(SortError):
        sort_of(App("+", (x, le(x, y))))
    with pytest.raises(SortError):
        sort_of(App("ite", (le(x, y), x, le(y, x))))
    with pytest.raises(SortError):
        sort_of(App("*", (x, y)))  # non-literal factor
    assert not well_sorted(App("not", (x,)))


def test_evaluate_basics():
    env = {"x": 3, "y": -2}
    assert evaluate(add(x, y, IntConst(1)), env) == 2
    assert evaluate(sub(x, y), env) == 5
    assert evaluate(ite(gt(x, y), x, y), env) == 3
    assert evaluate(implies(le(x, y), eq(x, y)), env) is True
    with pytest.raises(EvalError):
        evaluate(z, env)
    with pytest.raises(EvalError):
        evaluate(Var("x", BOOL), env)


def test_evaluate_random_terms_total_on_full_env():
    rng = random.Random(7)
    for _ in range(200):
        t = random_term(rng)
        v = evaluate(t, random_env(rng))
        assert isinstance(v, (int, bool))


def test_free_vars_and_subterms():
    t = and_(le(x, y), eq(add(x, z), IntConst(0)))
    assert free_vars(t) == {x, y, z}
    assert t in set(subterms(t))
    assert x in set(subterms(t))


def test_term_size_counts_applications():
    assert term_size(x) == 0
    assert term_size(add(x, y)) == 1
    assert term_size(ite(le(x, y), add(x, y), y)) == 3


def test_substitute_is_simultaneous_and_sort_checked():
    t = add(x, y)
    r = substitute(t, {"x": y, "y": x})
    assert r == add(y, x)
    with pytest.raises(SortError):
        substitute(t, {"x": le(x, y)})


def test_substitute_respects_lambda_binding():
    lam = Lambda((x,), add(x, y))
    r = substitute(lam, {"x": IntConst(9), "y": IntConst(1)})
    assert r == Lambda((x,), add(x, IntConst(1)))


def test_beta_reduce():
    lam = Lambda((x, y), ite(ge(x, y), x, y))
    assert beta_reduce(lam, (IntConst(2), IntConst(5))) == \
        ite(ge(IntConst(2), IntConst(5)), IntConst(2), IntConst(5))
    with pytest.raises(SortError):
        beta_reduce(lam, (IntConst(2),))


def test_uf_apps_collects_occurrences():
    f = FunSort((INT,), INT)
    t = and_(eq(UFApp("f", f, (x,)), y), le(UFApp("f", f, (y,)), x))
    assert len(uf_apps(t)) == 2


def test_fresh_name_is_reserved_and_avoids():
    a = fresh_name("k")
    b = fresh_name("k")
    assert a != b
    assert "!" in a
    assert fresh_name("k", avoid=[a, b]) not in (a, b)


def test_terms_are_hashable_and_shareable():
    t1 = add(x, mul(2, y))
    t2 = add(x, mul(2, y))
    assert t1 == t2
    assert hash(t1) == hash(t2)
    assert len({t1, t2}) == 1
