import random

import pytest

from synthlia.rewrite import canonical_key, negate_norm, normalize, serialize
from synthlia.terms import (
    App,
    BoolConst,
    IntConst,
    SortError,
    add,
    and_,
    eq,
    evaluate,
    ge,
    gt,
    implies,
    ite,
    ivar,
    bvar,
    le,
    lt,
    mul,
    not_,
    or_,
    sub,
)

from helpers import random_env, random_term

x, y, z = ivar("x"), ivar("y"), ivar("z")


def soundness_sample(n_terms: int, n_envs: int, seed: int = 11) -> int:
    """Independent oracle: a normal form must agree with the original
    term under direct evaluation on every assignment. Returns the number
    of (term, assignment) pairs checked."""
    rng = random.Random(seed)
    checked = 0
    for _ in range(n_terms):
        t = random_term(rng)
        n = normalize(t)
        for _ in range(n_envs):
            env = random_env(rng)
            assert evaluate(t, env) == evaluate(n, env), serialize(t)
            checked += 1
    return checked


def test_normalize_soundness_random():
    assert soundness_sample(300, 10) == 3000


def test_polynomial_canonicalization():
    assert normalize(add(x, y)) == normalize(add(y, x))
    assert normalize(sub(add(x, y), y)) == x
    assert normalize(add(x, x)) == mul(2, x)
    assert normalize(mul(3, add(x, IntConst(2)))) == \
        normalize(add(IntConst(6), mul(3, x)))
    assert normalize(sub(x, x)) == IntConst(0)


def test_comparisons_collapse_to_le_and_eq():
    assert canonical_key(lt(x, y)) == canonical_key(le(add(x, IntConst(1)), y))
    assert canonical_key(ge(x, y)) == canonical_key(le(y, x))
    assert canonical_key(gt(y, x)) == canonical_key(lt(x, y))
    assert canonical_key(eq(x, y)) == canonical_key(eq(y, x))
    assert normalize(le(x, x)) == BoolConst(True)
    assert normalize(lt(x, x)) == BoolConst(False)


def test_junction_flattening_and_dedup():
    t = and_(le(x, y), and_(le(x, y), le(y, z)))
    n = normalize(t)
    assert isinstance(n, App) and n.op == "and" and len(n.args) == 2
    assert normalize(or_(le(x, y), BoolConst(True))) == BoolConst(True)
    assert normalize(and_(le(x, y), BoolConst(True))) == normalize(le(x, y))
    assert normalize(and_(le(x, y), gt(x, y))) == BoolConst(False)
    assert normalize(implies(le(x, y), le(x, y))) == BoolConst(True)


def test_double_negation_and_le_negation():
    assert normalize(not_(not_(le(x, y)))) == normalize(le(x, y))
    assert canonical_key(not_(le(x, y))) == canonical_key(gt(x, y))
    n = normalize(le(x, y))
    assert negate_norm(negate_norm(n)) == n


def test_ite_folding():
    assert normalize(ite(BoolConst(True), x, y)) == x
    assert normalize(ite(le(x, y), z, z)) == z
    b = bvar("b")
    assert normalize(ite(not_(b), x, y)) == normalize(ite(b, y, x))
    assert normalize(ite(le(x, y), BoolConst(True), BoolConst(False))) == \
        normalize(le(x, y))


def test_canonical_key_separates_inequivalent_terms():
    assert canonical_key(x) != canonical_key(y)
    assert canonical_key(le(x, y)) != canonical_key(le(y, x))
    assert canonical_key(add(x, IntConst(1))) != canonical_key(x)


def test_canonical_key_requires_well_sorted():
    with pytest.raises(SortError):
        canonical_key(App("+", (x, le(x, y))))


def test_serialize_is_injective_on_samples():
    rng = random.Random(3)
    seen = {}
    for _ in range(500):
        t = random_term(rng)
        s = serialize(t)
        assert seen.setdefault(s, t) == t
