"""Pointwise right Kan extensions along functors into FinSet.

The value of Ran_G F at a finite set b is the limit of F . proj over the
comma category b | G.  For the truncated inclusions J_n the limit is taken
over the full subcategory of surjective anchors, but only after the
cofinality check in :mod:`kanfin.fincat` has passed; legs at the remaining
comma objects are recovered through image factorizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .errors import InvalidCone, PreconditionError
from .fincat import CofinalityReport, CommaCat, check_cofinal, comma_over, inclusion_functor, initial_objects
from .finset import DEFAULT_BUDGET, Diagram, FinFunction, FinSetObj, LimitResult, factor_cone, image_factorization, limit
from .setfun import Endofunctor, truncate


@dataclass(eq=False)
class RanResult:
    at_object: FinSetObj
    comma: CommaCat
    provenance: LimitResult
    values: Diagram
    cofinality: CofinalityReport | None = None
    extra: dict = field(default_factory=dict)

    @property
    def anchor(self) -> int:
        return self.comma.anchor

    @property
    def size(self) -> int:
        return self.at_object.size

    @property
    def bound(self) -> int | None:
        return getattr(self.comma.functor, "inclusion_bound", None)

    @property
    def counit_legs(self) -> dict:
        """(a, g) -> FinFunction from the apex, over the comma objects used."""
        return {obj: self.provenance.legs[i] for i, obj in enumerate(self.comma.objects)}

    def family(self, x: int) -> tuple:
        return self.provenance.families[x]

    def index_of_family(self, fam: Sequence[int]) -> int:
        return self.provenance.index_of_family(tuple(fam))

    def leg_value(self, x: int, a: int, g: Sequence[int]) -> int:
        """Component of apex element x at the comma object (a, g)."""
        i = self.comma.index.get((a, tuple(g)))
        if i is not None:
            return self.provenance.families[x][i]
        n = self.bound
        if n is None:
            raise PreconditionError(f"({a}, {tuple(g)}) is not a comma object")
        e, incl = image_factorization(g)
        k = len(incl)
        if k > n:
            raise PreconditionError(f"image of size {k} exceeds the truncation {n}")
        j = self.comma.index[(k, e)]
        return _fmap_values(self, k, a, incl, self.provenance.families[x][j])

    def leg(self, a: int, g: Sequence[int]) -> tuple:
        """The leg at (a, g) as a table on the apex."""
        return tuple(self.leg_value(x, a, g) for x in range(self.size))


def _fmap_values(r: RanResult, k: int, a: int, incl: Sequence[int], v: int) -> int:
    rule = r.extra.get("rule")
    if rule is not None:
        return rule.fmap(incl, a, v)
    from .fincat import skeleton_morphism

    u = skeleton_morphism(r.bound, k, a, incl)
    return r.values.on_morphisms[u].table[v]


def ran_at(
    F: Diagram | Endofunctor,
    G: Diagram | int,
    b: int,
    budget: int | None = DEFAULT_BUDGET,
    *,
    surjective: bool | None = None,
) -> RanResult:
    """Ran_G F at the set b.

    ``G`` may be an integer n for the truncated inclusion J_n, in which case
    ``F`` may be an endofunctor rule (restricted to sizes <= n).  With
    ``surjective`` left as None the surjective-anchor subcategory is used
    whenever it is cofinal.
    """
    rule = None
    if isinstance(G, int):
        G = inclusion_functor(G)
    if isinstance(F, Endofunctor):
        n = getattr(G, "inclusion_bound", None)
        if n is None:
            raise PreconditionError("an endofunctor rule needs a truncated inclusion to restrict along")
        rule = F
        F = truncate(F, n)
    if F.shape is not G.shape:
        raise PreconditionError("F and G live on different categories")
    full = comma_over(b, G)
    cc, rep = full, None
    is_incl = getattr(G, "inclusion_bound", None) is not None
    if surjective is None:
        surjective = is_incl
    if surjective:
        sub = comma_over(b, G, surjective=True)
        rep = check_cofinal(sub)
        if rep.cofinal:
            cc = sub
    res = limit(cc.diagram(F), budget)
    extra = {"rule": rule} if rule is not None else {}
    extra["objects"] = cc.object_count
    extra["morphisms"] = len(cc.morphisms())
    return RanResult(res.apex, cc, res, F, rep, extra)


def cone_violations_comma(r: RanResult, cone: Callable[[int, tuple], Sequence[int]], test_size: int) -> list:
    """Check F(u) . cone(a, g) = cone(a2, g2) over the comma morphisms in use."""
    cc = r.comma
    F = r.values
    cols = [tuple(cone(a, g)) for a, g in cc.objects]
    for col, (a, _) in zip(cols, cc.objects):
        if len(col) != test_size:
            raise InvalidCone(f"cone component at {a} has the wrong length")
    bad = []
    for i, j, u in cc.morphisms():
        t = F.on_morphisms[u].table
        ci, cj = cols[i], cols[j]
        for x in range(test_size):
            if t[ci[x]] != cj[x]:
                bad.append((cc.objects[i], cc.objects[j], x))
                break
    return bad


def factor_through(r: RanResult, cone: Callable[[int, tuple], Sequence[int]] | Mapping, test_size: int) -> FinFunction:
    """The unique map from a test set into the apex commuting with the legs.

    ``cone`` maps a comma object (a, g) to a table test_set -> F(a); a dict
    keyed by (a, g) is accepted too.
    """
    if isinstance(cone, Mapping):
        mapping = cone
        cone = lambda a, g: mapping[(a, tuple(g))]  # noqa: E731
    bad = cone_violations_comma(r, cone, test_size)
    if bad:
        raise InvalidCone(f"cone condition fails at {bad[0]}")
    cols = [tuple(cone(a, g)) for a, g in r.comma.objects]
    table = factor_cone(r.provenance, cols, test_size)
    return FinFunction(FinSetObj(test_size), r.at_object, table)


def legs_cone(r: RanResult) -> Callable:
    """The limit cone itself, as a cone from the apex."""
    return lambda a, g: r.leg(a, g)


def initial_value_check(r: RanResult) -> bool | None:
    """If the comma has an initial object (a, g), the apex matches F(a) elementwise."""
    full = CommaCat(r.anchor, r.comma.functor)
    init = initial_objects(full.category())
    if not init:
        return None
    a, g = full.objects[init[0]]
    leg = r.leg(a, g)
    return sorted(leg) == list(range(r.values.on_objects[a].size))


def full_vs_surjective(F: Diagram | Endofunctor, n: int, b: int, budget: int | None = DEFAULT_BUDGET) -> bool:
    """Surjective-anchor and full-comma evaluations agree.

    Restriction to the surjective objects must be a bijection of apexes, and
    the image-factorization legs of the small apex must reproduce every
    component of the full one.
    """
    r1 = ran_at(F, n, b, budget, surjective=True)
    r2 = ran_at(F, n, b, budget, surjective=False)
    if r1.comma is r2.comma or r1.size != r2.size:
        return r1.size == r2.size
    for y in range(r2.size):
        fam = r2.family(y)
        proj = tuple(fam[r2.comma.index[o]] for o in r1.comma.objects)
        try:
            x = r1.index_of_family(proj)
        except KeyError:
            return False
        for i, (a, g) in enumerate(r2.comma.objects):
            if r1.leg_value(x, a, g) != fam[i]:
                return False
    return True


def values_of(r: RanResult, x: int) -> dict:
    return {obj: v for obj, v in zip(r.comma.objects, r.family(x))}


def leg_fn(r: RanResult, x: int) -> Callable[[Sequence[int], int], int]:
    """Leg of apex element x as a function of (table, codomain size)."""
    return lambda g, a: r.leg_value(x, a, g)


__all__ = [
    "RanResult",
    "ran_at",
    "factor_through",
    "legs_cone",
    "cone_violations_comma",
    "initial_value_check",
    "full_vs_surjective",
    "leg_fn",
]
