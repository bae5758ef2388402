"""Eilenberg-Moore algebras on finite carriers.

An algebra structure is a table T(X) -> X; the unit law fixes it on the
image of the unit, so the search only ranges over the remaining elements and
prunes with the associativity law as soon as both sides are assigned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Sequence

from .errors import PreconditionError, ResourceExhausted
from .finset import DEFAULT_BUDGET, FinFunction, FinSetObj, all_functions
from .monadcalc import (
    LaxCell,
    MonadMap,
    MonadPres,
    enumerate_nat,
    endomorphism_monad,
    family_from_components,
    is_lax,
    is_monad_map,
)
from .setfun import from_digits, to_digits, truncate


@dataclass(eq=False)
class Algebra:
    monad: MonadPres
    carrier: FinSetObj
    structure: FinFunction

    @property
    def size(self) -> int:
        return self.carrier.size

    def __call__(self, w: int) -> int:
        return self.structure.table[w]

    def violations(self, limit: int = 5) -> list:
        return algebra_violations(self.monad, self.size, self.structure.table, limit)

    def as_dict(self):
        return {"monad": self.monad.name, "carrier": self.size, "structure": list(self.structure.table)}


def algebra_violations(T: MonadPres, x: int, table: Sequence[int], limit: int = 5) -> list:
    """Unit and associativity failures of a candidate structure map, independently of the search."""
    F = T.functor
    bad = []
    for v in range(x):
        if table[T.unit(x, v)] != v:
            bad.append(("unit", v))
            if len(bad) >= limit:
                return bad
    tx = F.size(x)
    for z in range(F.size(tx)):
        if table[T.mult(x, z)] != table[F.fmap(table, x, z)]:
            bad.append(("assoc", z))
            if len(bad) >= limit:
                break
    return bad


def _make(T: MonadPres, x: int, table: Sequence[int]) -> Algebra:
    c = FinSetObj(x)
    return Algebra(T, c, FinFunction(FinSetObj(T.functor.size(x)), c, tuple(table)))


def enumerate_algebras(T: MonadPres, x: int, budget: int | None = DEFAULT_BUDGET) -> list:
    """All structure maps T(x) -> x satisfying both laws, in lexicographic order."""
    F = T.functor
    tx = F.size(x)
    ttx = F.size(tx)
    fixed: dict = {}
    for v in range(x):
        u = T.unit(x, v)
        if fixed.get(u, v) != v:
            return []
        fixed[u] = v
    free = [w for w in range(tx) if w not in fixed]
    if x == 0 and tx:
        return []
    if budget is not None and x ** len(free) > budget:
        raise ResourceExhausted(f"{x}^{len(free)} candidate structures", {"candidates": x ** len(free)})
    # associativity constraints: alpha(mu z) = alpha(T alpha (z)); T alpha needs the whole table,
    # so the constraints are checked once a full table is formed, ordered by first failure
    mus = [T.mult(x, z) for z in range(ttx)]
    out = []
    table = [0] * tx
    for w, v in fixed.items():
        table[w] = v
    for choice in iproduct(range(x), repeat=len(free)):
        for w, v in zip(free, choice):
            table[w] = v
        t = tuple(table)
        if all(t[mus[z]] == t[F.fmap(t, x, z)] for z in range(ttx)):
            out.append(_make(T, x, t))
    return out


def enumerate_algebras_bruteforce(T: MonadPres, x: int, max_candidates: int = 10**6) -> list:
    """Every table T(x) -> x checked against both laws; the oracle for the search above."""
    tx = T.functor.size(x)
    if x**tx > max_candidates:
        raise ResourceExhausted(f"{x}^{tx} tables", {"candidates": x**tx})
    return [_make(T, x, t) for t in all_functions(tx, x) if not algebra_violations(T, x, t, 1)]


@dataclass
class HomReport:
    passed: bool
    witness: int | None = None

    def as_dict(self):
        return {"passed": self.passed, "witness": self.witness}


def is_algebra_hom(h: Sequence[int] | FinFunction, a1: Algebra, a2: Algebra) -> HomReport:
    """h . struct1 = struct2 . T(h); the witness is the first element of T(a1) where it fails."""
    if a1.monad is not a2.monad and a1.monad.name != a2.monad.name:
        raise PreconditionError("algebras over different monads")
    table = h.table if isinstance(h, FinFunction) else tuple(h)
    if len(table) != a1.size:
        raise PreconditionError("map does not start at the first carrier")
    F = a1.monad.functor
    for w in range(F.size(a1.size)):
        if table[a1(w)] != a2(F.fmap(table, a2.size, w)):
            return HomReport(False, w)
    return HomReport(True)


# ------------------------------------------------------------------ algebras as maps into End(X)


def transpose_algebra(alg: Algebra, n: int) -> tuple:
    """theta_n : T(n) -> X^(X^n), w |-> (h |-> alpha(T h (w)))."""
    T = alg.monad
    F = T.functor
    x = alg.size
    hs = [tuple(to_digits(j, x, n)) for j in range(x**n)]
    return tuple(from_digits([alg(F.fmap(h, x, w)) for h in hs], x) for w in range(F.size(n)))


def algebra_from_map(T: MonadPres, x: int, theta_x: Sequence[int]) -> tuple:
    """alpha(w) = theta_X(w)(id)."""
    ident = from_digits(list(range(x)), x)
    width = x**x
    return tuple(to_digits(v, x, width)[ident] for v in theta_x)


@dataclass
class CorrespondenceReport:
    monad: str
    carrier: int
    bound: int
    algebras: int
    maps: int
    round_trip: bool
    pairs: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.algebras == self.maps and self.round_trip

    def as_dict(self):
        return {"monad": self.monad, "carrier": self.carrier, "bound": self.bound, "algebras": self.algebras,
                "maps": self.maps, "round_trip": self.round_trip, "passed": self.passed}


def algebras_vs_monad_maps(T: MonadPres, x: int, bound: int | None = None,
                           budget: int | None = DEFAULT_BUDGET) -> CorrespondenceReport:
    """Algebra structures on x against monad maps T -> End(x) checked on sets of size <= bound."""
    bound = x if bound is None else bound
    if bound < x:
        raise PreconditionError("the bound must reach the carrier to transpose back")
    E = endomorphism_monad(x)
    algs = enumerate_algebras(T, x, budget)
    comps = enumerate_nat(truncate(T.functor, bound), truncate(E.functor, bound), budget)
    maps = []
    for c in comps:
        m = MonadMap(family_from_components(c, "theta"), T, E, bound)
        if is_monad_map(m, bound).passed:
            maps.append(tuple(tuple(t) for t in c))
    keyset = set(maps)
    ok = True
    pairs = []
    for alg in algs:
        trans = tuple(transpose_algebra(alg, n) for n in range(bound + 1))
        if trans not in keyset or algebra_from_map(T, x, trans[x]) != alg.structure.table:
            ok = False
        pairs.append((alg.structure.table, trans))
    for c in maps:
        back = algebra_from_map(T, x, c[x])
        if algebra_violations(T, x, back, 1):
            ok = False
            continue
        if tuple(transpose_algebra(_make(T, x, back), n) for n in range(bound + 1)) != c:
            ok = False
    return CorrespondenceReport(T.name, x, bound, len(algs), len(maps), ok, pairs)


# ------------------------------------------------------------------ lifting along lax cells


@dataclass
class LiftReport:
    carriers: int
    algebras: int
    lands_in_target: bool
    square_objects: bool
    square_homs: bool
    lifted: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.lands_in_target and self.square_objects and self.square_homs

    def as_dict(self):
        return {"carriers": self.carriers, "algebras": self.algebras, "lands_in_target": self.lands_in_target,
                "square_objects": self.square_objects, "square_homs": self.square_homs, "passed": self.passed}


def lift_algebra(phi: LaxCell, alg: Algebra) -> Algebra:
    """(a, alpha) |-> (g a, g(alpha) . phi_a), an algebra for the target monad."""
    g = phi.g
    s = phi.target
    a = alg.size
    ga = g.size(a)
    ta = alg.monad.functor.size(a)
    galpha = tuple(g.fmap(alg.structure.table, a, v) for v in range(g.size(ta)))
    struct = tuple(galpha[phi.phi(a, w)] for w in range(s.functor.size(ga)))
    return _make(s, ga, struct)


def lifted_functor_square(phi: LaxCell, bound: int, *, check: bool = True,
                          budget: int | None = DEFAULT_BUDGET) -> LiftReport:
    """Lift every algebra with carrier <= bound; check the forgetful square on objects and homs."""
    if check and not is_lax(phi, bound).passed:
        raise PreconditionError("not a lax cell")
    g = phi.g
    t = phi.source
    rep = LiftReport(bound + 1, 0, True, True, True)
    per_carrier = {}
    for a in range(bound + 1):
        if not phi.phi.defined(a):
            continue
        algs = enumerate_algebras(t, a, budget)
        per_carrier[a] = algs
        for alg in algs:
            rep.algebras += 1
            up = lift_algebra(phi, alg)
            rep.lifted.append((a, alg.structure.table, up.structure.table))
            if up.violations(1):
                rep.lands_in_target = False
            if up.size != g.size(a):
                rep.square_objects = False
    # homs: h : A -> B of t-algebras lifts to g(h), which must be an s-algebra hom
    for a, algs in per_carrier.items():
        for b, algs2 in per_carrier.items():
            for h in all_functions(a, b):
                gh = tuple(g.fmap(h, g.size(b), v) for v in range(g.size(a)))
                for A in algs:
                    for B in algs2:
                        if not is_algebra_hom(h, A, B).passed:
                            continue
                        if not is_algebra_hom(gh, lift_algebra(phi, A), lift_algebra(phi, B)).passed:
                            rep.square_homs = False
    return rep
