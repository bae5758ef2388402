from __future__ import annotations

import itertools

from hypothesis import given, strategies as st

from kanfin.fincat import (
    _check_cofinal_generic,
    check_cofinal,
    comma_over,
    component_initials,
    connected_components,
    discrete,
    empty_category,
    finset_skeleton,
    from_tables,
    initial_objects,
    poset_category,
    surjection_subcategory,
    terminal_category,
    validate,
)
from kanfin.kan import full_vs_surjective
from kanfin.setfun import Identity, Powerset


def test_terminal_category_valid():
    assert validate(terminal_category()).valid


def test_broken_associativity_reported():
    # object 0 carries a unital but non-associative multiplication on {id, a, b}
    mors = [(0, 0), (0, 0), (0, 0), (1, 1)]
    table = {(0, 0): 0, (1, 1): 2, (1, 2): 1, (2, 1): 2, (2, 2): 1}
    comp = [(m2, m1, m3) for (m2, m1), m3 in table.items()]
    comp += [(0, m, m) for m in (1, 2)] + [(m, 0, m) for m in (1, 2)] + [(3, 3, 3)]
    rep = validate(from_tables(2, mors, [0, 3], comp))
    assert not rep.valid
    assert any(v[0] == "associativity" for v in rep.violations)


def _skeleton_morphisms(n):
    return sum(b**a for a in range(n + 1) for b in range(n + 1))


def test_skeleton_valid_and_counted():
    c = finset_skeleton(2)
    assert c.object_count == 3
    assert c.morphism_count == _skeleton_morphisms(2) == 1 + 1 + 1 + 0 + 1 + 2 + 0 + 1 + 4
    assert validate(c).valid


def test_comma_counts():
    cc = comma_over(3, 2)
    assert cc.object_count == 9
    assert cc.object_counts_by_base() == {1: 1, 2: 8}


def test_comma_initial_when_anchor_fits():
    for b in range(3):
        cc = comma_over(b, 2)
        assert cc.index[(b, tuple(range(b)))] in initial_objects(cc.category())


def test_empty_anchor_single_component():
    cat = comma_over(0, 2).category()
    assert len(connected_components(cat)) == 1
    assert initial_objects(cat) == [0]


def test_components():
    assert len(connected_components(discrete(3))) == 3
    assert connected_components(empty_category()) == []
    for b in range(1, 4):
        for n in range(1, 3):
            assert len(connected_components(comma_over(b, n).category())) == 1


def test_initial_objects_simple():
    assert initial_objects(discrete(2)) == []
    # two cones 0 -> {1, 2} and 3 -> {4, 5}
    cat = poset_category(6, [(0, 1), (0, 2), (3, 4), (3, 5)])
    assert initial_objects(cat) == []
    assert component_initials(cat) == [[0], [3]]


def test_surjection_subcategory():
    sub = surjection_subcategory(comma_over(3, 2))
    assert sub.object_count == 7
    assert sub.object_counts_by_base() == {1: 1, 2: 6}
    assert check_cofinal(sub).cofinal
    small = surjection_subcategory(comma_over(2, 3))
    assert (2, (0, 1)) in small.index


def test_cofinality_shortcut_matches_literal_check():
    for b, n in [(0, 2), (1, 2), (2, 2), (3, 2), (3, 3), (4, 2)]:
        sub = comma_over(b, n, surjective=True)
        assert check_cofinal(sub).cofinal == _check_cofinal_generic(sub).cofinal


@given(st.integers(0, 4), st.integers(1, 3))
def test_comma_categories_validate(b, n):
    if b == 4 and n == 3:
        return
    cc = comma_over(b, n)
    assert validate(cc.category()).valid
    assert not cc.projection().violations()


@given(st.integers(0, 4), st.integers(0, 3))
def test_comma_morphisms_satisfy_triangle(b, n):
    cc = comma_over(b, n)
    G = cc.functor.on_morphisms
    for i, j, u in cc.morphisms():
        g, g2 = cc.objects[i][1], cc.objects[j][1]
        assert tuple(G[u].table[v] for v in g) == g2


@given(st.integers(1, 3))
def test_initial_objects_closed_under_iso(b):
    cc = comma_over(b, 3)
    cat = cc.category()
    init = set(initial_objects(cat))
    # every relabelling of the identity anchor is isomorphic to it
    perms = [cc.index[(b, p)] for p in itertools.permutations(range(b))]
    assert set(perms) <= init


def test_full_and_surjective_limits_agree():
    for F in (Identity(), Powerset()):
        for b in range(4):
            assert full_vs_surjective(F, 2, b)


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda p: p[0] < p[1]), max_size=6))
def test_posets_validate(rel):
    assert validate(poset_category(5, rel)).valid
