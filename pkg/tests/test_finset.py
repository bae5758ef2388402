from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from kanfin.errors import CompositionError, DataError, InvariantViolation, ResourceExhausted
from kanfin.fincat import comma_over, discrete, empty_category
from kanfin.finset import (
    BOT,
    TOP,
    Diagram,
    FinSetObj,
    bang,
    characteristic,
    cokernel_pair,
    compose,
    cone_violations,
    equalizer,
    factor_cone,
    function,
    identity,
    limit,
    naive_limit,
    pairing,
    product,
)
from kanfin.randdiag import random_diagram
from kanfin.setfun import Identity, truncate

from strategies import composable, functions, rng_from, seeds


def test_compose_examples():
    swap = function(2, 2, [1, 0])
    assert compose(swap, swap).table == (0, 1)
    assert compose(function(3, 2, [0, 1, 1]), swap).table == (1, 0, 0)
    f = function(3, 2, [0, 1, 1])
    assert compose(identity(3), f) == f


def test_compose_rejects_mismatch():
    with pytest.raises(CompositionError):
        compose(function(2, 3, [0, 1]), function(2, 2, [0, 1]))


def test_function_validation():
    with pytest.raises(DataError):
        function(2, 2, [0, 2])
    with pytest.raises(DataError):
        function(2, 2, [0])
    with pytest.raises(DataError):
        FinSetObj(2, ("b", "a"))


@given(composable(3))
def test_compose_associative(fs):
    f, g, h = fs
    assert compose(compose(f, g), h) == compose(f, compose(g, h))


@given(functions())
def test_compose_unital(f):
    assert compose(identity(f.dom), f).table == f.table
    assert compose(f, identity(f.cod)).table == f.table


def test_products():
    p, _ = product([])
    assert p.size == 1
    p, projs = product([2, 2])
    assert p.labels == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert product([3, 0])[0].size == 0


def test_pairing_examples():
    diag = pairing(identity(2), identity(2))
    assert diag.table == (0, 3)
    chi_a, chi_b = characteristic(2, {0}), characteristic(2, {1})
    p = pairing(chi_a, chi_b)
    assert [p.cod.label(v) for v in p.table] == [(TOP, BOT), (BOT, TOP)]
    f = function(3, 2, [1, 0, 1])
    assert [p[0] for p in (pairing(f, bang(3)).cod.label(v) for v in pairing(f, bang(3)).table)] == [1, 0, 1]


@given(st.data())
def test_pairing_round_trip(data):
    f = data.draw(functions(max_dom=3))
    g = data.draw(functions(dom=f.dom.size, max_cod=3))
    if f.cod.size == 0 or g.cod.size == 0:
        return
    p = pairing(f, g)
    _, projs = product([f.cod, g.cod])
    assert compose(p, projs[0]).table == f.table
    assert compose(p, projs[1]).table == g.table


def test_characteristic():
    assert characteristic(2, set()).table == (BOT, BOT)
    assert characteristic(2, {0, 1}).table == (TOP, TOP)
    assert characteristic(3, {0, 2}).table == (TOP, BOT, TOP)


def test_equalizer_examples():
    f = function(3, 2, [0, 1, 1])
    assert equalizer(f, f)[0].size == 3
    assert equalizer(function(2, 2, [0, 1]), function(2, 2, [1, 0]))[0].size == 0
    e, inc = equalizer(f, function(3, 2, [0, 0, 1]))
    assert inc.table == (0, 2)


def test_cokernel_examples():
    n1, n2 = cokernel_pair(identity(2))
    assert n1 == n2 and n1.cod.size == 2
    n1, _ = cokernel_pair(function(0, 2, []))
    assert n1.cod.size == 4
    n1, n2 = cokernel_pair(function(1, 2, [0]))
    assert n1.cod.size == 3 and n1(0) == n2(0) and n1(1) != n2(1)


@given(functions(max_dom=4, max_cod=4))
def test_cokernel_coequalizes(m):
    n1, n2 = cokernel_pair(m)
    assert compose(m, n1) == compose(m, n2)


def test_limit_small_shapes():
    empty = Diagram(empty_category(), (), ())
    assert limit(empty).apex.size == 1
    objs = (FinSetObj(2), FinSetObj(3))
    d = Diagram(discrete(2), objs, (identity(2), identity(3)))
    assert limit(d).apex.size == 6


def _brute_comma_limit(x: int, n: int) -> int:
    """Count families over all maps g: x -> y (y <= n) with k . value(g) = value(k . g)."""
    objs = [(y, g) for y in range(n + 1) for g in itertools.product(range(y), repeat=x)]
    ranges = [range(y) for y, _ in objs]
    count = 0
    index = {o: i for i, o in enumerate(objs)}
    for fam in itertools.product(*ranges):
        ok = True
        for i, (y, g) in enumerate(objs):
            for y2 in range(n + 1):
                for k in itertools.product(range(y2), repeat=y):
                    j = index[(y2, tuple(k[v] for v in g))]
                    if k[fam[i]] != fam[j]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        count += ok
    return count


# frozen from _brute_comma_limit(3, 2)
COMMA_3_J2 = 8


def test_comma_limit_oracle_is_frozen():
    assert _brute_comma_limit(3, 2) == COMMA_3_J2


def test_comma_limit_underlying_set():
    cc = comma_over(3, 2)
    res = limit(cc.diagram(truncate(Identity(), 2)))
    assert res.apex.size == COMMA_3_J2


def test_budget_exhaustion():
    cc = comma_over(3, 2)
    with pytest.raises(ResourceExhausted):
        limit(cc.diagram(truncate(Identity(), 2)), budget=1)


def _cone_ok(d, res):
    sh = d.shape
    for fam in res.families:
        for u in range(sh.morphism_count):
            if d.on_morphisms[u].table[fam[sh.doms[u]]] != fam[sh.cods[u]]:
                return False
    return True


@given(seeds)
def test_limit_matches_oracle(seed):
    _, d = random_diagram(rng_from(seed))
    fast = limit(d)
    assert fast.families == naive_limit(d).families
    assert _cone_ok(d, fast)
    assert len(set(fast.families)) == len(fast.families)
    assert limit(d).families == fast.families


@given(seeds)
def test_factor_cone_unique(seed):
    _, d = random_diagram(rng_from(seed))
    res = limit(d)
    # the legs themselves factor as the identity
    cone = [leg.table for leg in res.legs]
    assert factor_cone(res, cone, res.apex.size) == tuple(range(res.apex.size))


def test_factor_cone_rejects_bad_cone():
    cc = comma_over(1, 2)
    d = cc.diagram(truncate(Identity(), 2))
    res = limit(d)
    bad = [(0,) if d.on_objects[j].size else () for j in range(d.shape.object_count)]
    assert cone_violations(d, bad, 1)
    with pytest.raises(InvariantViolation):
        factor_cone(res, bad, 1)
