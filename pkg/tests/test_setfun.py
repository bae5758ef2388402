from __future__ import annotations

import itertools
import threading

import pytest
from hypothesis import given, strategies as st

from kanfin.errors import DataError
from kanfin.finset import function
from kanfin.setfun import (
    ABSORBING,
    Z2,
    Action,
    Composite,
    Constant,
    Endomorphism,
    Exception_,
    FilterFunctor,
    FinMonoid,
    Identity,
    Powerset,
    SubTerminal,
    Terminal,
    from_digits,
    functoriality_violations,
    parse_functor,
    restrict_along_inclusion,
    to_digits,
    truncate,
)


def test_object_sizes():
    assert Powerset().size(3) == 8
    assert Exception_(2).size(3) == 5
    assert Endomorphism(2).size(1) == 4
    assert Action(Z2).size(3) == 6
    assert SubTerminal().size(0) == 0 and SubTerminal().size(2) == 1


@pytest.mark.parametrize("x", [1, 2, 3])
@pytest.mark.parametrize("y", [0, 1, 2])
def test_endomorphism_sizes(x, y):
    assert Endomorphism(x).size(y) == x ** (x**y)


def test_powerset_swap():
    P = Powerset()
    swap = (1, 0)
    assert [P.fmap(swap, 2, a) for a in range(4)] == [0, 2, 1, 3]


def test_exception_acts_on_left_summand():
    E = Exception_(2)
    f = (2, 0, 1)
    assert [E.fmap(f, 3, v) for v in range(5)] == [2, 0, 1, 3, 4]
    assert E.eval_object(2).labels is not None


@pytest.mark.parametrize("literal", [False, True])
def test_filter_principal_image(literal):
    F = FilterFunctor(literal=literal)
    f = (0, 0, 1)
    # up{0,1} goes to up{0}
    assert F.fmap(f, 2, 0b011) == 0b01
    for a in range(8):
        img = 0
        for i in range(3):
            if a >> i & 1:
                img |= 1 << f[i]
        assert F.fmap(f, 2, a) == img


def test_literal_and_generator_filter_actions_agree():
    lit, fast = FilterFunctor(literal=True), FilterFunctor()
    for n in range(4):
        for m in range(4):
            for f in itertools.product(range(m), repeat=n):
                for a in range(1 << n):
                    assert lit.fmap(f, m, a) == fast.fmap(f, m, a)


def _endo_oracle(x, f, m, v):
    """(F f)(v)(h) = v(h . f), with explicit digit lists."""
    n = len(f)
    dom = list(itertools.product(range(x), repeat=n))
    cod = list(itertools.product(range(x), repeat=m))
    digits = []
    for _ in dom:
        digits.append(v % x)
        v //= x
    digits.reverse()
    val = {h: digits[i] for i, h in enumerate(dom)}
    out = [val[tuple(h[f[i]] for i in range(n))] for h in cod]
    r = 0
    for d in out:
        r = r * x + d
    return r


@pytest.mark.parametrize("x", [2, 3])
def test_endomorphism_action_matches_oracle(x):
    E = Endomorphism(x)
    for n in range(3):
        for m in range(3):
            if x == 3 and n + m > 3:
                continue
            for f in itertools.product(range(m), repeat=n):
                for v in range(E.size(n)):
                    assert E.fmap(f, m, v) == _endo_oracle(x, f, m, v)


@pytest.mark.parametrize("F,bound", [
    (Identity(), 4), (Terminal(), 3), (SubTerminal(), 3), (Powerset(), 3), (Exception_(2), 3),
    (Action(Z2), 3), (Action(ABSORBING), 3), (FilterFunctor(), 3), (FilterFunctor(ultra=True), 4),
    (Endomorphism(2), 2), (Constant(3), 3), (Composite(Powerset(), Exception_(1)), 2),
])
def test_functoriality(F, bound):
    assert functoriality_violations(F, bound) == []


@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_composite_is_pointwise(n, m, data):
    f = tuple(data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))) if m else ()
    if n and not m:
        return
    outer, inner = Powerset(), Exception_(1)
    C = Composite(outer, inner)
    assert C.size(n) == outer.size(inner.size(n))
    inner_f = inner.fmap_table(f, m)
    for z in range(C.size(n)):
        assert C.fmap(f, m, z) == outer.fmap(inner_f, inner.size(m), z)


def test_truncations():
    d = truncate(Powerset(), 2)
    assert [o.size for o in d.on_objects] == [1, 2, 4]
    assert d.is_functorial()
    assert [o.size for o in truncate(FilterFunctor(), 3).on_objects] == [1, 2, 4, 8]
    ident = truncate(Identity(), 2)
    assert all(fn.table == (lambda t: t)(fn.table) for fn in ident.on_morphisms)
    assert [o.size for o in ident.on_objects] == [0, 1, 2]


def test_restriction():
    beta = restrict_along_inclusion(FilterFunctor(ultra=True), 3)
    ident = truncate(Identity(), 3)
    assert [o.size for o in beta.on_objects] == [o.size for o in ident.on_objects]
    assert [f.table for f in beta.on_morphisms] == [f.table for f in ident.on_morphisms]
    one = restrict_along_inclusion(Constant(1), 2)
    assert all(o.size == 1 for o in one.on_objects)


def test_digits_round_trip():
    for base in (2, 3, 5):
        for width in (1, 3, 70):
            for v in (0, 1, base**width - 1):
                assert from_digits(to_digits(v, base, width), base) == v


def test_monoid_validation():
    assert Z2.violations() == [] and ABSORBING.violations() == []
    assert FinMonoid(2, 1, ((0, 0), (0, 1))).violations() == []
    assert FinMonoid(2, 0, ((0, 0), (0, 1))).violations()
    with pytest.raises(DataError):
        FinMonoid(2, 0, ((0, 1),))


def test_parse_functor():
    assert isinstance(parse_functor("powerset"), Powerset)
    assert parse_functor("exception:E=2").size(1) == 3
    assert parse_functor("endomorphism:X=2").size(1) == 4
    assert parse_functor("action:M=absorbing").monoid is ABSORBING
    with pytest.raises(DataError):
        parse_functor("nonsense")
    with pytest.raises(DataError):
        parse_functor("exception:E=two")


def test_concurrent_evaluation_is_consistent():
    E = Endomorphism(2)
    f = (1, 0)
    want = [E.fmap(f, 2, v) for v in range(E.size(2))]
    fresh = Endomorphism(2)
    got = {}

    def work(k):
        got[k] = [fresh.fmap(f, 2, v) for v in range(fresh.size(2))]

    threads = [threading.Thread(target=work, args=(k,)) for k in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(v == want for v in got.values())


def test_eval_morphism():
    P = Powerset()
    g = P.eval_morphism(function(2, 2, [1, 0]))
    assert g.table == (0, 2, 1, 3)
    assert g.dom.size == 4
