"""Pushforward monads along truncated inclusions, and their universal properties.

``PushforwardMonad(T, n)`` is Ran_{J_n}(T J_n) evaluated object by object.
Its unit and multiplication are the unique factorizations of the cones
from the monad-structure equations: at a comma object (a, g: b -> a)

* unit:  x |-> eta^T_a(g(x));
* mult:  Z |-> mu^T_a(<<g>>(Z)), where <g> : P(b) -> T(a) is the leg of
  the inner apex and <<g>> is the leg of the outer element Z at that map.

The outer leg exists in the truncated limit only when the image of <g> has
at most n elements; otherwise the multiplication of that element is not
determined by the truncated data and a PreconditionError is raised.
Elements of the form kappa(w) (the family h |-> T(h)(w) of some w in T(P b))
carry legs at every map, so the multiplication can always be evaluated on
them.

The second half of the module deals with functors between small finite
categories, which is all the comparison map of a composite pushforward needs.
"""

from __future__ import annotations

import threading
from math import comb
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Callable, Sequence

from .errors import DataError, InvariantViolation, PreconditionError, ResourceExhausted
from .fincat import CatFunctor, FinCategory, compose_functor_diagram, identity_functor
from .finset import DEFAULT_BUDGET, Diagram, FinFunction
from .kan import RanResult, factor_through, ran_at
from .monadcalc import (
    ColaxCell,
    Family,
    LaxCell,
    MonadMap,
    MonadPres,
    compose_colax,
    inclusion_cell,
    is_colax,
    is_lax,
)
from .setfun import ASTRONOMICAL, Endofunctor


# above this many surjective anchors an evaluation takes minutes
MAX_COMMA_OBJECTS = 1000


def comma_cost(b: int, n: int) -> int:
    """Number of surjections from b onto sets of size <= n."""
    return sum(comb(k, j) * (-1) ** (k - j) * j ** b for k in range(min(b, n) + 1) for j in range(k + 1))


class PushforwardMonad(Endofunctor):
    """Ran_{J_n}(T J_n) with its induced monad structure, evaluated on demand."""

    def __init__(self, base: MonadPres, n: int, budget: int | None = DEFAULT_BUDGET,
                 max_comma: int = MAX_COMMA_OBJECTS):
        super().__init__()
        self.base = base
        self.n = n
        self.budget = budget
        self.max_comma = max_comma
        self.name = f"push({base.name},J{n})"
        self._ran: dict = {}
        self._ran_lock = threading.Lock()
        self._monad: MonadPres | None = None

    # -- evaluation
    def ran(self, b: int) -> RanResult:
        hit = self._ran.get(b)
        if hit is None:
            cost = comma_cost(b, self.n)
            if cost > self.max_comma:
                raise ResourceExhausted(f"{self.name} at {b} needs {cost} comma objects", {"comma_objects": cost})
            res = ran_at(self.base.functor, self.n, b, self.budget)
            with self._ran_lock:
                hit = self._ran.setdefault(b, res)
        return hit

    @property
    def evaluated(self) -> list:
        return sorted(self._ran)

    def size(self, b):
        return self.ran(b).size

    def size_bits(self, b):
        if b not in self._ran and comma_cost(b, self.n) > self.max_comma:
            return ASTRONOMICAL
        return self.size(b).bit_length()

    def leg_value(self, b: int, x: int, a: int, g: Sequence[int]) -> int:
        return self.ran(b).leg_value(x, a, g)

    def counit(self, a: int, x: int) -> int:
        """epsilon_a : P(a) -> T(a), the leg at the identity of a (a <= n)."""
        if a > self.n:
            raise PreconditionError(f"the counit lives on sets of size <= {self.n}")
        return self.leg_value(a, x, a, tuple(range(a)))

    def fmap(self, f, m, x):
        b = len(f)
        f = tuple(f)
        src = self.ran(b)
        dst = self.ran(m)
        fam = tuple(src.leg_value(x, a, tuple(g[v] for v in f)) for a, g in dst.comma.objects)
        return dst.index_of_family(fam)

    # -- structure
    def family_index(self, b: int, value: Callable[[int, tuple], int]) -> int:
        """Index of the apex element whose component at (a, g) is value(a, g)."""
        r = self.ran(b)
        fam = tuple(value(a, g) for a, g in r.comma.objects)
        try:
            return r.index_of_family(fam)
        except KeyError:
            raise InvariantViolation(f"family at {b} is not an element of the limit") from None

    def kappa(self, b: int, w: int) -> int:
        """The comparison T(b) -> P(b) induced by the identity cone: (a, g) |-> T(g)(w)."""
        T = self.base.functor
        return self.family_index(b, lambda a, g: T.fmap(g, a, w))

    def unit(self, b: int, x: int) -> int:
        t = self.base
        return self.family_index(b, lambda a, g: t.unit(a, g[x]))

    def mult_from_legs(self, b: int, outer_leg: Callable[[Sequence[int], int], int]) -> int:
        """Multiply an outer element given through its legs at maps out of P(b)."""
        t = self.base
        T = t.functor
        r = self.ran(b)

        def value(a, g):
            inner = r.leg(a, g)
            return t.mult(a, outer_leg(inner, T.size(a)))

        return self.family_index(b, value)

    def mult(self, b: int, z: int) -> int:
        pb = self.size(b)
        outer = self.ran(pb)
        return self.mult_from_legs(b, lambda h, y: outer.leg_value(z, y, h))

    def mult_kappa(self, b: int, w: int) -> int:
        """Multiplication of kappa(w) for w in T(P(b)), without evaluating P(P(b))."""
        T = self.base.functor
        return self.mult_from_legs(b, lambda h, y: T.fmap(h, y, w))

    def monad(self) -> MonadPres:
        if self._monad is None:
            self._monad = MonadPres(self, self.unit, self.mult, name=self.name)
        return self._monad

    def counit_cell(self) -> LaxCell:
        """(J_n, epsilon) as a lax cell from T to the pushforward."""
        fam = Family(self.counit, lambda a: a <= self.n, "counit")
        return LaxCell(inclusion_cell(self.n), fam, self.base, self.monad())


# ------------------------------------------------------------------ tables


def pushforward_at(T: MonadPres, n: int, b: int, budget: int | None = DEFAULT_BUDGET) -> RanResult:
    return ran_at(T.functor, n, b, budget)


def induced_unit(Pf: PushforwardMonad, b: int) -> FinFunction:
    """Factor the cone x |-> (g |-> eta^T(g x)) through the limit at b."""
    t = Pf.base
    r = Pf.ran(b)
    return factor_through(r, lambda a, g: tuple(t.unit(a, g[x]) for x in range(b)), b)


def induced_mult(Pf: PushforwardMonad, b: int) -> FinFunction:
    """Factor the multiplication cone through the limit at b; needs P(P(b))."""
    t = Pf.base
    T = t.functor
    r = Pf.ran(b)
    pb = r.size
    outer = Pf.ran(pb)
    size = outer.size

    def cone(a, g):
        inner = r.leg(a, g)
        ta = T.size(a)
        return tuple(t.mult(a, outer.leg_value(z, ta, inner)) for z in range(size))

    f = factor_through(r, cone, size)
    return FinFunction(outer.at_object, r.at_object, f.table)


def pushforward_map(theta: MonadMap, Pt: PushforwardMonad, Ps: PushforwardMonad, sizes: Sequence[int]) -> MonadMap:
    """The unique map with eps^s . (g# theta) g = g theta . eps^t, on the given objects."""
    if Pt.n != Ps.n:
        raise DataError("pushforwards along different truncations")
    th = theta.theta
    tables = {}
    for b in sizes:
        rt = Pt.ran(b)
        rs = Ps.ran(b)
        cone = lambda a, g, rt=rt: tuple(th(a, v) for v in rt.leg(a, g))  # noqa: E731
        tables[b] = factor_through(rs, cone, rt.size).table
    return MonadMap(Family.from_tables(tables, f"push({th.name})"), Pt.monad(), Ps.monad())


# ------------------------------------------------------------------ universal properties


def univ_backward(phi: LaxCell, Pt: PushforwardMonad, sizes: Sequence[int], check_bound: int | None = None) -> MonadMap:
    """phi : s J -> J t  |->  the monad map s -> J#t with phi = eps . phi-hat J."""
    if phi.g.dom_bound != Pt.n or not phi.g.is_identity_rule:
        raise PreconditionError("the lax cell must live along the same truncated inclusion")
    if check_bound is not None:
        rep = is_lax(phi, check_bound)
        if not rep.passed:
            raise PreconditionError(f"not a lax cell: {rep.witness}")
    s = phi.target
    S = s.functor
    comp = phi.phi
    tables = {}
    for b in sizes:
        r = Pt.ran(b)
        sb = S.size(b)
        cone = lambda a, g, b=b, sb=sb: tuple(comp(a, S.fmap(g, a, x)) for x in range(sb))  # noqa: E731
        tables[b] = factor_through(r, cone, sb).table
    return MonadMap(Family.from_tables(tables, f"hat({comp.name})"), s, Pt.monad())


def univ_forward(theta: MonadMap, Pt: PushforwardMonad) -> LaxCell:
    """theta : s -> J#t  |->  (J, eps . theta J)."""
    th = theta.theta

    def rule(a, x):
        return Pt.counit(a, th(a, x))

    fam = Family(rule, lambda a: a <= Pt.n and th.defined(a), f"eps.{th.name}")
    return LaxCell(inclusion_cell(Pt.n), fam, Pt.base, theta.source)


@dataclass
class DeterminedReport:
    functor: str
    n: int
    bound: int
    determined: bool
    per_object: dict = field(default_factory=dict)

    def as_dict(self):
        return {"functor": self.functor, "trunc": self.n, "bound": self.bound, "determined": self.determined,
                "objects": {str(k): v for k, v in self.per_object.items()}}


def comparison_table(h: Endofunctor, n: int, b: int, budget: int | None = DEFAULT_BUDGET) -> tuple[tuple, RanResult]:
    """h(b) -> Ran_{J_n}(h J_n)(b), induced by the identity cone."""
    r = ran_at(h, n, b, budget)
    hb = h.size(b)
    f = factor_through(r, lambda a, g: tuple(h.fmap(g, a, w) for w in range(hb)), hb)
    return f.table, r


def is_g_determined(h: Endofunctor | MonadPres, n: int, bound: int, budget: int | None = DEFAULT_BUDGET) -> DeterminedReport:
    """Is (h, identity) the right extension of h J_n along J_n on every b <= bound?"""
    F = h.functor if isinstance(h, MonadPres) else h
    rep = DeterminedReport(F.name, n, bound, True)
    for b in range(bound + 1):
        table, r = comparison_table(F, n, b, budget)
        ok = sorted(table) == list(range(r.size))
        rep.per_object[b] = {"source": F.size(b), "target": r.size, "bijective": ok}
        rep.determined = rep.determined and ok
    return rep


def _inverse(table: Sequence[int], size: int) -> tuple:
    inv = [None] * size
    for x, y in enumerate(table):
        inv[y] = x
    if None in inv:
        raise PreconditionError("comparison is not invertible")
    return tuple(inv)


def colax_hat(
    psi: ColaxCell, Pt: PushforwardMonad, sizes: Sequence[int], *, check_bound: int | None = None,
    budget: int | None = DEFAULT_BUDGET,
) -> MonadMap:
    """psi : J t -> s J  |->  Ran(psi) : J#t -> s, using (s, 1) as the extension of s J.

    The target must be J_n-determined on every requested object; that is
    checked here and a PreconditionError raised otherwise.
    """
    if psi.g.dom_bound != Pt.n or not psi.g.is_identity_rule:
        raise PreconditionError("the colax cell must live along the same truncated inclusion")
    if check_bound is not None:
        rep = is_colax(psi, check_bound)
        if not rep.passed:
            raise PreconditionError(f"not a colax cell: {rep.witness}")
    s = psi.target
    S = s.functor
    comp = psi.psi
    tables = {}
    for b in sizes:
        kap, rs = comparison_table(S, Pt.n, b, budget)
        if sorted(kap) != list(range(rs.size)):
            raise PreconditionError(f"{S.name} is not J{Pt.n}-determined at {b}")
        back = _inverse(kap, rs.size)
        rt = Pt.ran(b)
        cone = lambda a, g, rt=rt: tuple(comp(a, v) for v in rt.leg(a, g))  # noqa: E731
        f = factor_through(rs, cone, rt.size)
        tables[b] = tuple(back[y] for y in f.table)
    return MonadMap(Family.from_tables(tables, f"hat({comp.name})"), Pt.monad(), s)


def counit_inverse_cell(Pt: PushforwardMonad) -> ColaxCell:
    """(J_n, eps^-1) : t -> J#t; eps is invertible on sets of size <= n."""
    tables = {}
    for a in range(Pt.n + 1):
        tab = tuple(Pt.counit(a, x) for x in range(Pt.size(a)))
        tables[a] = _inverse(tab, Pt.base.functor.size(a))
    return ColaxCell(inclusion_cell(Pt.n), Family.from_tables(tables, "eps^-1"), Pt.base, Pt.monad())


def colax_from_map(theta: MonadMap, Pt: PushforwardMonad) -> ColaxCell:
    """Inverse of colax_hat when eps is invertible: compose (J, eps^-1) with theta."""
    from .monadcalc import as_colax

    return compose_colax(counit_inverse_cell(Pt), as_colax(theta))


# ------------------------------------------------------------------ small finite categories


@dataclass
class CatMonad:
    """A monad on a finite category: endofunctor plus unit/mult morphisms per object."""

    category: FinCategory
    functor: CatFunctor
    unit: tuple
    mult: tuple
    name: str = "monad"


def identity_cat_monad(c: FinCategory) -> CatMonad:
    return CatMonad(c, identity_functor(c), tuple(c.identities), tuple(c.identities), "identity")


def category_limit(B: FinCategory, objs: Sequence[int], arrows: Sequence[tuple]) -> tuple | None:
    """Brute-force limit in a finite category: (apex, legs) or None.

    ``arrows`` are (j, k, morphism objs[j] -> objs[k]).
    """

    def cones(L):
        homs = [B.hom(L, o) for o in objs]
        for legs in iproduct(*homs):
            if all(B.compose(w, legs[j]) == legs[k] for j, k, w in arrows):
                yield legs

    all_cones = {L: list(cones(L)) for L in range(B.object_count)}
    for L in range(B.object_count):
        for legs in all_cones[L]:
            universal = True
            for L2, cs in all_cones.items():
                for c2 in cs:
                    facs = [u for u in B.hom(L2, L) if all(B.compose(legs[j], u) == c2[j] for j in range(len(objs)))]
                    if len(facs) != 1:
                        universal = False
                        break
                if not universal:
                    break
            if universal:
                return L, tuple(legs)
    return None


@dataclass
class FiniteRan:
    """Ran_g F for g, F : A -> B between finite categories, as an endofunctor of B."""

    g: CatFunctor
    F: CatFunctor
    apex: dict
    legs: dict
    comma: dict

    def on_morphism(self, beta: int) -> int:
        B = self.g.target
        b, b2 = B.doms[beta], B.cods[beta]
        L, L2 = self.apex[b], self.apex[b2]
        want = {}
        for a, u2 in self.comma[b2]:
            want[(a, u2)] = self.legs[b][(a, B.compose(u2, beta))]
        hits = [u for u in B.hom(L, L2) if all(B.compose(self.legs[b2][k], u) == v for k, v in want.items())]
        if len(hits) != 1:
            raise InvariantViolation("Ran on a morphism is not uniquely determined")
        return hits[0]


def finite_ran(g: CatFunctor, F: CatFunctor) -> FiniteRan:
    A, B = g.source, g.target
    apex, legs, comma = {}, {}, {}
    for b in range(B.object_count):
        objs = [(a, u) for a in range(A.object_count) for u in B.hom(b, g.obj_map[a])]
        index = {o: i for i, o in enumerate(objs)}
        arrows = []
        for w in range(A.morphism_count):
            a, a2 = A.doms[w], A.cods[w]
            for (x, u) in objs:
                if x != a:
                    continue
                j = index[(a2, B.compose(g.mor_map[w], u))]
                arrows.append((index[(a, u)], j, F.mor_map[w]))
        lim = category_limit(B, [F.obj_map[a] for a, _ in objs], arrows)
        if lim is None:
            raise PreconditionError(f"the limit defining the extension at object {b} does not exist")
        apex[b] = lim[0]
        legs[b] = {o: lim[1][i] for i, o in enumerate(objs)}
        comma[b] = objs
    return FiniteRan(g, F, apex, legs, comma)


def _compose_cat_functors(g2: CatFunctor, g1: CatFunctor) -> CatFunctor:
    return CatFunctor(g1.source, g2.target, tuple(g2.obj_map[a] for a in g1.obj_map),
                      tuple(g2.mor_map[m] for m in g1.mor_map))


def _same_shape(c1: FinCategory, c2: FinCategory) -> bool:
    return c1 is c2 or (c1.object_count == c2.object_count and c1.doms == c2.doms and c1.cods == c2.cods)


@dataclass
class ComparisonReport:
    source_size: int
    target_size: int
    table: tuple
    bijective: bool
    identity: bool

    def as_dict(self):
        return {"source": self.source_size, "target": self.target_size, "table": list(self.table),
                "bijective": self.bijective, "identity": self.identity}


def comparison(h: Diagram, g: CatFunctor, t: CatMonad, b: int, budget: int | None = DEFAULT_BUDGET) -> ComparisonReport:
    """The canonical map h#(g#t)(b) -> (hg)#t(b), for g : A -> B finite and h : B -> FinSet."""
    if not (_same_shape(t.category, g.source) and _same_shape(h.shape, g.target)):
        raise DataError("g, h and t do not compose")
    # work on the shapes of g and h so that diagrams share categories by identity
    A, B = g.source, h.shape
    tf = CatFunctor(A, A, t.functor.obj_map, t.functor.mor_map)
    g = CatFunctor(A, B, g.obj_map, g.mor_map)
    gt = _compose_cat_functors(g, tf)
    inner = finite_ran(g, gt)
    push_obj = tuple(inner.apex[x] for x in range(B.object_count))
    push_mor = tuple(inner.on_morphism(m) for m in range(B.morphism_count))
    pushed = CatFunctor(B, B, push_obj, push_mor)
    src = ran_at(compose_functor_diagram(pushed, h), h, b, budget, surjective=False)
    hg = compose_functor_diagram(g, h)
    tgt = ran_at(compose_functor_diagram(gt, h), hg, b, budget, surjective=False)

    def cone(a, f):
        # h(eps^g_a) applied to the leg at (g a, f)
        ga = g.obj_map[a]
        eps = inner.legs[ga][(a, B.identities[ga])]
        ht = h.on_morphisms[eps].table
        return tuple(ht[src.leg_value(x, ga, f)] for x in range(src.size))

    f = factor_through(tgt, cone, src.size)
    table = f.table
    ident = src.size == tgt.size and table == tuple(range(src.size))
    return ComparisonReport(src.size, tgt.size, table, sorted(table) == list(range(tgt.size)), ident)


def empty_functor(target: FinCategory) -> CatFunctor:
    from .fincat import empty_category

    return CatFunctor(empty_category(), target, (), ())


def object_functor(target: FinCategory, obj: int) -> CatFunctor:
    """The functor from the terminal category picking ``obj``."""
    from .fincat import terminal_category

    return CatFunctor(terminal_category(), target, (obj,), (target.identities[obj],))


# ------------------------------------------------------------------ enumerations and round trips


def enumerate_lax(t: MonadPres, s: MonadPres, n: int, budget: int | None = DEFAULT_BUDGET) -> list:
    """All lax cells (J_n, phi) : t -> s, found among natural families s J_n => J_n t."""
    from .monadcalc import enumerate_nat, family_from_components
    from .setfun import truncate

    out = []
    for comps in enumerate_nat(truncate(s.functor, n), truncate(t.functor, n), budget):
        cell = LaxCell(inclusion_cell(n), family_from_components(comps, "phi"), t, s)
        if is_lax(cell, n).passed:
            out.append(cell)
    return out


def enumerate_colax(t: MonadPres, s: MonadPres, n: int, budget: int | None = DEFAULT_BUDGET) -> list:
    """All colax cells (J_n, psi) : t -> s, found among natural families J_n t => s J_n."""
    from .monadcalc import enumerate_nat, family_from_components
    from .setfun import truncate

    out = []
    for comps in enumerate_nat(truncate(t.functor, n), truncate(s.functor, n), budget):
        cell = ColaxCell(inclusion_cell(n), family_from_components(comps, "psi"), t, s)
        if is_colax(cell, n).passed:
            out.append(cell)
    return out


def _tables(fam: Family, sizes: dict) -> dict:
    return {a: tuple(fam(a, x) for x in range(k)) for a, k in sizes.items()}


@dataclass
class RoundTripReport:
    target: str
    source: str
    trunc: int
    cells: int
    maps: int
    forward_backward: bool
    backward_forward: bool
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.forward_backward and self.backward_forward

    def as_dict(self):
        return {"t": self.source, "s": self.target, "trunc": self.trunc, "cells": self.cells, "maps": self.maps,
                "forward_backward": self.forward_backward, "backward_forward": self.backward_forward,
                "passed": self.passed, "failures": self.failures[:5]}


def univ_round_trip(t: MonadPres, s: MonadPres, n: int, extra: int = 1, budget: int | None = DEFAULT_BUDGET) -> RoundTripReport:
    """Both composites of the lax-cell / monad-map bijection on enumerated data.

    Lax cells are enumerated exhaustively on sets of size <= n, pushed to monad
    maps on sizes <= n + extra, and pulled back.  Independently, monad maps
    s -> J#t are enumerated on sizes <= n and pushed through the other way.
    """
    from .monadcalc import enumerate_nat, family_from_components, is_monad_map
    from .setfun import truncate

    Pt = PushforwardMonad(t, n, budget)
    sizes = list(range(n + extra + 1))
    low = {a: s.functor.size(a) for a in range(n + 1)}
    rep = RoundTripReport(s.name, t.name, n, 0, 0, True, True)
    for cell in enumerate_lax(t, s, n, budget):
        rep.cells += 1
        theta = univ_backward(cell, Pt, sizes)
        back = univ_forward(theta, Pt)
        if _tables(back.phi, low) != _tables(cell.phi, low):
            rep.forward_backward = False
            rep.failures.append(("lax", _tables(cell.phi, low)))
    pushed = truncate(Pt, n)
    for comps in enumerate_nat(truncate(s.functor, n), pushed, budget):
        theta = MonadMap(family_from_components(comps, "theta"), s, Pt.monad(), n)
        if not is_monad_map(theta, n).passed:
            continue
        rep.maps += 1
        again = univ_backward(univ_forward(theta, Pt), Pt, range(n + 1))
        if _tables(again.theta, low) != _tables(theta.theta, low):
            rep.backward_forward = False
            rep.failures.append(("map", _tables(theta.theta, low)))
    return rep


@dataclass
class ColaxSuiteReport:
    source: str
    target: str
    trunc: int
    cells: int
    injective_cells: int
    injectivity_preserved: bool
    maps_ok: bool

    @property
    def passed(self) -> bool:
        return self.injectivity_preserved and self.maps_ok

    def as_dict(self):
        return {"t": self.source, "s": self.target, "trunc": self.trunc, "cells": self.cells,
                "injective_cells": self.injective_cells, "injectivity_preserved": self.injectivity_preserved,
                "maps_ok": self.maps_ok, "passed": self.passed}


def colax_suite(t: MonadPres, s: MonadPres, n: int, extra: int = 1, budget: int | None = DEFAULT_BUDGET) -> ColaxSuiteReport:
    """colax_hat on every enumerated colax cell; injective cells must give injective maps."""
    from .monadcalc import is_monad_map

    Pt = PushforwardMonad(t, n, budget)
    sizes = list(range(n + extra + 1))
    rep = ColaxSuiteReport(t.name, s.name, n, 0, 0, True, True)
    for cell in enumerate_colax(t, s, n, budget):
        rep.cells += 1
        hat = colax_hat(cell, Pt, sizes, budget=budget)
        if not is_monad_map(MonadMap(hat.theta, hat.source, hat.target, max(sizes)), max(sizes)).passed:
            rep.maps_ok = False
        injective = all(len(set(cell.psi(a, x) for x in range(t.functor.size(a)))) == t.functor.size(a)
                        for a in range(n + 1))
        if injective:
            rep.injective_cells += 1
            for b in sizes:
                tab = hat.theta.tables[b]
                if len(set(tab)) != len(tab):
                    rep.injectivity_preserved = False
    return rep


# ------------------------------------------------------------------ filter transport


def filter_labels(Pf: PushforwardMonad, b: int) -> tuple:
    """Generator of the filter recovered from each apex element of the pushforward at b."""
    from .filters import recover_filter
    from .kan import leg_fn

    r = Pf.ran(b)
    out = []
    for x in range(r.size):
        flt, _ = recover_filter(b, leg_fn(r, x), Pf.n)
        if flt is None:
            raise InvariantViolation(f"apex element {x} at {b} does not recover a filter")
        out.append(flt.generator)
    return tuple(out)


def _relabel_mask(w: int, labels: Sequence[int]) -> int:
    out = 0
    i = 0
    while w:
        if w & 1:
            out |= 1 << labels[i]
        w >>= 1
        i += 1
    return out


@dataclass
class FilterShadowReport:
    at: int
    size: int
    round_trip: bool
    unit: bool
    mult: bool
    mult_mode: str
    mult_checked: int

    @property
    def passed(self) -> bool:
        return self.size == 1 << self.at and self.round_trip and self.unit and self.mult

    def as_dict(self):
        return {"at": self.at, "size": self.size, "round_trip": self.round_trip, "unit": self.unit,
                "mult": self.mult, "mult_mode": self.mult_mode, "mult_checked": self.mult_checked,
                "passed": self.passed}


def filter_shadow(Pf: PushforwardMonad, b: int, *, cap: int = 1 << 10, samples: int = 64, seed: int = 0) -> FilterShadowReport:
    """Compare the powerset pushforward at b with the filter monad through recover/nu.

    The multiplication is compared on the full table when the pushforward at
    the apex can be evaluated, and otherwise on the elements kappa(w),
    w in P(apex), which the filter side sees as principal filters of filters.
    """
    import random

    from .filters import FilterOnSet, nu_family
    from .monadcalc import filter_monad

    fm = filter_monad()
    r = Pf.ran(b)
    labels = filter_labels(Pf, b)
    rt = sorted(labels) == list(range(1 << b))
    for x, gen in enumerate(labels):
        fam = nu_family(FilterOnSet(b, gen), r.comma.objects)
        rt = rt and r.index_of_family(fam) == x
    unit = all(labels[Pf.unit(b, x)] == fm.unit(b, x) for x in range(b))
    ok, checked = True, 0
    if comma_cost(r.size, Pf.n) <= Pf.max_comma:
        mode = "table"
        outer = filter_labels(Pf, r.size)
        for z in range(Pf.size(r.size)):
            big = _relabel_mask(outer[z], labels)
            checked += 1
            if labels[Pf.mult(b, z)] != fm.mult(b, big):
                ok = False
                break
    else:
        total = 1 << r.size
        if total <= cap:
            mode, ws = "kappa-exhaustive", range(total)
        else:
            rng = random.Random(seed)
            mode = "kappa-sampled"
            ws = sorted({0, total - 1} | {rng.randrange(total) for _ in range(samples)})
        for w in ws:
            checked += 1
            if labels[Pf.mult_kappa(b, w)] != fm.mult(b, _relabel_mask(w, labels)):
                ok = False
                break
    return FilterShadowReport(b, r.size, rt, unit, ok, mode, checked)


# ------------------------------------------------------------------ stabilization sweeps


def stabilization(T: MonadPres, m: int, expected: int, truncs: Sequence[int] = range(2, 7),
                  budget: int | None = DEFAULT_BUDGET) -> dict:
    """Sizes of the truncated pushforward at m over a range of truncations.

    The threshold is the least n from which every later size equals
    ``expected``; at each such n the comparison T(m) -> pushforward(m) must
    also be a bijection, which is what identifies the apex with the closed form.
    """
    sizes, canonical = {}, {}
    for n in truncs:
        Pf = PushforwardMonad(T, n, budget)
        sizes[n] = Pf.size(m)
        if sizes[n] == expected == T.functor.size(m):
            canonical[n] = sorted(Pf.kappa(m, w) for w in range(expected)) == list(range(expected))
    threshold = None
    for n in sorted(sizes, reverse=True):
        if sizes[n] != expected or not canonical.get(n, False):
            break
        threshold = n
    return {"monad": T.name, "at": m, "expected": expected, "sizes": sizes, "canonical": canonical,
            "threshold": threshold}


# ------------------------------------------------------------------ checks through the comparison map


def kappa_checks(Pf: PushforwardMonad, b: int, *, cap: int = 1 << 12, samples: int = 48, seed: int = 0) -> dict:
    """Monad equations at b that only need the pushforward at b itself.

    kappa : T -> Pf is a monad map, so eta^Pf = kappa . eta^T and the unit
    laws and the multiplication square can be tested on kappa-families
    without evaluating Pf at its own apex.
    """
    import random

    rng = random.Random(seed)
    t = Pf.base
    T = t.functor
    pb = Pf.size(b)

    def pick(size):
        if size <= cap:
            return range(size), "exhaustive"
        got = {0, size - 1}
        while len(got) < min(samples, size):
            got.add(rng.randrange(size))
        return sorted(got), "sampled"

    out = {}
    tb = T.size(b)
    kap = tuple(Pf.kappa(b, w) for w in range(tb)) if tb <= cap else None
    kappa_of = (lambda w: kap[w]) if kap is not None else (lambda w: Pf.kappa(b, w))

    ok = all(kappa_of(t.unit(b, x)) == Pf.unit(b, x) for x in range(b))
    out["kappa-unit"] = {"passed": ok, "checked": b, "mode": "exhaustive"}

    xs, mode = pick(pb)
    ok, n = True, 0
    for x in xs:
        n += 1
        if Pf.mult_kappa(b, t.unit(pb, x)) != x:
            ok = False
            break
    out["left-unit"] = {"passed": ok, "checked": n, "mode": mode}

    eta = tuple(Pf.unit(b, x) for x in range(b))
    ws, mode = pick(tb)
    ok, n = True, 0
    for w in ws:
        n += 1
        if Pf.mult_kappa(b, T.fmap(eta, pb, w)) != kappa_of(w):
            ok = False
            break
    out["right-unit"] = {"passed": ok, "checked": n, "mode": mode}

    if T.size_bits(tb) <= 64:
        ttb = T.size(tb)
        zs, mode = pick(ttb)
        kt = kap if kap is not None else tuple(Pf.kappa(b, w) for w in range(tb))
        ok, n = True, 0
        for z in zs:
            n += 1
            if Pf.mult_kappa(b, T.fmap(kt, pb, z)) != kappa_of(t.mult(b, z)):
                ok = False
                break
        out["kappa-mult"] = {"passed": ok, "checked": n, "mode": mode}
    else:
        out["kappa-mult"] = {"passed": True, "checked": 0, "mode": "skipped"}
    return out
