from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from kanfin.errors import DataError, PreconditionError
from kanfin.filters import (
    FilterOnSet,
    delta_action,
    delta_exception,
    enumerate_filters,
    enumerate_filters_bruteforce,
    enumerate_ultrafilters,
    filter_axiom_violation,
    filter_image,
    mu_filter,
    mu_ultra,
    nu_value,
    pentagon_check,
    recover_filter,
    sigma,
    tfae_check,
)
from kanfin.kan import leg_fn
from kanfin.monadcalc import builtin_monad, check_monad_laws
from kanfin.pushfwd import PushforwardMonad
from kanfin.setfun import ABSORBING, Z2


@pytest.mark.parametrize("n,filters,ultras", [(0, 1, 0), (1, 2, 1), (3, 8, 3)])
def test_counts(n, filters, ultras):
    assert len(enumerate_filters(n)) == filters
    assert len(enumerate_ultrafilters(n)) == ultras


@pytest.mark.parametrize("n", range(5))
def test_bruteforce_agrees(n):
    brute = sorted(tuple(sorted(f)) for f in enumerate_filters_bruteforce(n))
    mine = sorted(tuple(sorted(f.members())) for f in enumerate_filters(n))
    assert brute == mine


def test_improper_filter_on_empty_set():
    (only,) = enumerate_filters(0)
    assert only.members() == (0,)


def test_filter_image_examples():
    flt = FilterOnSet(3, 0b011)
    assert filter_image((0, 0, 1), flt, 2).generator == 0b01
    assert filter_image((0, 1, 2), flt, 3) == flt


@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_image_of_ultrafilter_is_ultra(n, m, data):
    f = tuple(data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)))
    x = data.draw(st.integers(0, n - 1))
    img = filter_image(f, FilterOnSet(n, 1 << x), m)
    assert img.is_ultra and img.point() == f[x]


@given(st.integers(0, 4), st.integers(0, 4), st.data())
def test_image_satisfies_axioms(n, m, data):
    if n and not m:
        return
    f = tuple(data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))) if m else ()
    gen = data.draw(st.integers(0, (1 << n) - 1))
    img = filter_image(f, FilterOnSet(n, gen), m)
    assert filter_axiom_violation(m, set(img.members())) is None


def _mu_oracle(n, big_members):
    """Literal multiplication with frozensets: {A | {F : A in F} in big}."""
    subsets = [frozenset(i for i in range(n) if a >> i & 1) for a in range(1 << n)]
    filters = [frozenset(b for b in subsets if s <= b) for s in subsets]
    out = set()
    for a, A in enumerate(subsets):
        sharp = frozenset(k for k, F in enumerate(filters) if A in F)
        if sharp in big_members:
            out.add(a)
    return out


@pytest.mark.parametrize("n", [0, 1, 2])
def test_mu_filter_matches_literal(n):
    for big_gen in range(1 << (1 << n)):
        big = FilterOnSet(1 << n, big_gen)
        members = {frozenset(k for k in range(1 << n) if m >> k & 1) for m in big.members()}
        assert set(mu_filter(n, big).members()) == _mu_oracle(n, members)


def test_mu_filter_examples():
    for n in range(4):
        for a in range(1 << n):
            assert mu_filter(n, FilterOnSet(1 << n, 1 << a)).generator == a
        for x in range(n):
            assert mu_filter(n, FilterOnSet(1 << n, 1 << (1 << x))).generator == 1 << x


def test_mu_filter_rejects_wrong_carrier():
    with pytest.raises(DataError):
        mu_filter(2, FilterOnSet(3, 0))


def test_mu_ultra_flattens():
    for n in range(1, 4):
        for x in range(n):
            assert mu_ultra(n, FilterOnSet(n, 1 << x)).point() == x


@pytest.mark.parametrize("name", ["filter", "ultrafilter"])
def test_monad_laws(name):
    assert check_monad_laws(builtin_monad(name), 3).passed


def test_sigma():
    for n in range(5):
        s = sigma(n)
        assert sorted(s) == list(range(1 << n)) == list(range(len(enumerate_filters(n))))
        full = (1 << n) - 1
        assert FilterOnSet(n, s[full]).members() == (full,)
        assert len(FilterOnSet(n, s[0]).members()) == 1 << n


def test_delta_bijective():
    for n in range(4):
        for e in range(3):
            d = delta_exception(n, e)
            assert sorted(d) == list(range(n + e))
        for m in (Z2, ABSORBING):
            assert sorted(delta_action(n, m.size)) == list(range(m.size * n))
    assert delta_exception(2, 1) == (0, 1, 2)


@pytest.mark.parametrize("x", range(3))
def test_pentagons(x):
    assert pentagon_check("exception", x, 1).passed
    assert pentagon_check("exception", x, 2).passed
    for m in (Z2, ABSORBING):
        rep = pentagon_check("action", x, m)
        assert rep.passed and rep.bijective


def test_pentagon_naturality():
    assert pentagon_check("exception", 1, 2, natural_bound=2).natural
    assert pentagon_check("action", 1, Z2, natural_bound=2).natural


@pytest.mark.parametrize("n", range(6))
def test_recover_of_nu_is_identity(n):
    for gen in range(1 << n):
        flt = FilterOnSet(n, gen)
        got, _ = recover_filter(n, lambda g, y: nu_value(flt, g, y), 4)
        assert got == flt


def test_principal_ultrafilter_family():
    flt = FilterOnSet(3, 0b010)
    for g in itertools.product(range(2), repeat=3):
        assert nu_value(flt, g, 2) == 1 << g[1]


@pytest.mark.parametrize("b", [2, 3, 4])
def test_nu_of_recover_is_identity(b):
    Pf = PushforwardMonad(builtin_monad("powerset"), 4)
    r = Pf.ran(b)
    for x in range(r.size):
        flt, _ = recover_filter(b, leg_fn(r, x), 4)
        assert flt is not None
        fam = tuple(nu_value(flt, g, a) for a, g in r.comma.objects)
        assert fam == r.family(x)
        assert tfae_check(b, leg_fn(r, x), 4) is None


def test_recover_needs_two():
    with pytest.raises(PreconditionError):
        recover_filter(2, lambda g, y: 0, 1)


@pytest.mark.parametrize("n", [2, 3])
def test_recover_below_four_is_recorded(n):
    # below truncation 4 the apex is larger than the set of filters; record what happens
    Pf = PushforwardMonad(builtin_monad("powerset"), n)
    r = Pf.ran(3)
    verdicts = [recover_filter(3, leg_fn(r, x), n)[0] is not None for x in range(r.size)]
    assert len(verdicts) == r.size
    # principal families still recover their filter
    for x in range(3):
        flt, _ = recover_filter(3, leg_fn(r, Pf.unit(3, x)), n)
        assert flt == FilterOnSet(3, 1 << x)
