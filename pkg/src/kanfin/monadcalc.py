"""Monad presentations, bounded law checking, and the cell calculus.

A :class:`MonadPres` pairs a computable endofunctor with index-level unit and
multiplication rules.  Law checks run object by object up to a bound; where
T(T(T(n))) is too large to sweep, elements are sampled (seeded) and, when
even a single element is too large to write down, the object is skipped.
Every report says which of the three happened.

1-cells between categories of finite sets are modelled by :class:`OneCell`:
an endofunctor of FinSet together with an optional bound on the domain, so
the truncated inclusion FinSet<=n -> FinSet is ``OneCell(Identity(), n)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import CompositionError, DataError, InvariantViolation, ResourceExhausted
from .finset import DEFAULT_BUDGET, Diagram, all_functions, limit
from .fincat import FinCategory
from .setfun import (
    MAX_MATERIALIZE,
    MONOIDS,
    Action,
    Composite,
    Constant,
    Endofunctor,
    Endomorphism,
    Exception_,
    FilterFunctor,
    FinMonoid,
    Identity,
    LazyTable,
    Powerset,
    SubTerminal,
    from_digits,
    mask_members,
    parse_functor,
    to_digits,
)

ELEMENT_CAP = 20_000
DEFAULT_SAMPLES = 48
MAX_ELEMENT_BITS = 1 << 17


# ------------------------------------------------------------------ monads


class MonadPres:
    """An endofunctor with unit and multiplication given per element.

    ``unit_rule(n, x)`` is the index of eta_n(x) in T(n); ``mult_rule(n, z)``
    sends z in T(T(n)) to T(n).
    """

    def __init__(self, functor: Endofunctor, unit_rule: Callable, mult_rule: Callable, name: str = ""):
        self.functor = functor
        self.unit_rule = unit_rule
        self.mult_rule = mult_rule
        self.name = name or functor.name
        self._unit_tables: dict = {}
        self._mult_tables: dict = {}

    def size(self, n: int) -> int:
        return self.functor.size(n)

    def unit(self, n: int, x: int) -> int:
        return self.unit_rule(n, x)

    def mult(self, n: int, z: int) -> int:
        return self.mult_rule(n, z)

    def unit_table(self, n: int) -> tuple:
        hit = self._unit_tables.get(n)
        if hit is None:
            hit = self._unit_tables[n] = tuple(self.unit_rule(n, x) for x in range(n))
        return hit

    def mult_table(self, n: int) -> tuple:
        hit = self._mult_tables.get(n)
        if hit is None:
            T = self.functor
            if T.size_bits(T.size(n)) > 21 or T.size(T.size(n)) > MAX_MATERIALIZE:
                raise ResourceExhausted(f"{self.name}: T(T({n})) too large to tabulate", {"n": n})
            hit = self._mult_tables[n] = tuple(self.mult_rule(n, z) for z in range(T.size(T.size(n))))
        return hit

    def mult_lazy(self, n: int) -> LazyTable:
        T = self.functor
        return LazyTable(lambda z: self.mult_rule(n, z), T.size(T.size(n)))

    def unit_family(self) -> "Family":
        return Family(self.unit_rule, name=f"unit({self.name})")

    def mult_family(self) -> "Family":
        return Family(self.mult_rule, name=f"mult({self.name})")

    def __repr__(self):
        return f"MonadPres({self.name})"


def _powerset_union(n, z):
    out = 0
    for a in mask_members(z):
        out |= a
    return out


def _powerset_intersection(n, z):
    out = (1 << n) - 1
    for a in mask_members(z):
        out &= a
    return out


def exception_monad(e: int) -> MonadPres:
    T = Exception_(e)

    def mult(n, z):
        # T(T n) = (n + e) + e; the outer exception block lands in the inner one
        inner = n + e
        return z if z < inner else n + (z - inner)

    return MonadPres(T, lambda n, x: x, mult, name=T.name)


def action_monad(monoid: FinMonoid) -> MonadPres:
    T = Action(monoid)
    ms = monoid.size

    def unit(n, x):
        return monoid.unit * n + x

    def mult(n, z):
        a, w = divmod(z, ms * n)
        b, x = divmod(w, n)
        return monoid.mul(a, b) * n + x

    return MonadPres(T, unit, mult, name=T.name)


def filter_monad(ultra: bool = False) -> MonadPres:
    from .filters import FilterOnSet, mu_filter, mu_ultra

    T = FilterFunctor(ultra=ultra, literal=True)
    if ultra:

        def mult(n, z):
            return mu_ultra(n, FilterOnSet(n, 1 << z)).point()

        return MonadPres(T, lambda n, x: x, mult, name="ultrafilter")

    def mult_f(n, z):
        return mu_filter(n, FilterOnSet(1 << n, z)).generator

    return MonadPres(T, lambda n, x: 1 << x, mult_f, name="filter")


def endomorphism_monad(k: int) -> MonadPres:
    """X^(X^Y): unit y |-> (h |-> h(y)), multiplication Phi |-> (h |-> Phi(ev_h))."""
    T = Endomorphism(k)
    positions: dict = {}

    def unit(n, x):
        place = k ** (n - 1 - x)
        return from_digits([j // place % k for j in range(k**n)], k)

    def ev_positions(n):
        # index of ev_h in X^(T n) for every h in X^n
        hit = positions.get(n)
        if hit is None:
            w = k**n
            tn = T.size(n)
            cols = [[0] * tn for _ in range(w)]
            for phi in range(tn):
                ds = to_digits(phi, k, w)
                for j in range(w):
                    cols[j][phi] = ds[j]
            hit = positions[n] = [from_digits(c, k) for c in cols]
        return hit

    def mult(n, z):
        width = k ** T.size(n)
        out = []
        for p in ev_positions(n):
            if k == 2:
                out.append(z >> (width - 1 - p) & 1)
            else:
                out.append(z // k ** (width - 1 - p) % k)
        return from_digits(out, k)

    return MonadPres(T, unit, mult, name=T.name)


MONAD_NAMES = (
    "identity",
    "terminal",
    "subterminal",
    "powerset",
    "powerset-intersection",
    "exception:E=<k>",
    "action:M=<Z2|absorbing|file>",
    "filter",
    "ultrafilter",
    "endomorphism:X=<k>",
)


def builtin_monad(spec: str, monoid: FinMonoid | None = None) -> MonadPres:
    """Registry lookup; parameters ride in the name, e.g. ``exception:E=2``."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name in ("identity", "id"):
        return MonadPres(Identity(), lambda n, x: x, lambda n, z: z, name="identity")
    if name == "terminal":
        return MonadPres(Constant(1, "terminal"), lambda n, x: 0, lambda n, z: 0, name="terminal")
    if name == "subterminal":
        return MonadPres(SubTerminal(), lambda n, x: 0, lambda n, z: 0, name="subterminal")
    if name in ("powerset", "p"):
        return MonadPres(Powerset(), lambda n, x: 1 << x, _powerset_union, name="powerset")
    if name == "powerset-intersection":
        return MonadPres(Powerset(), lambda n, x: 1 << x, _powerset_intersection, name="powerset-intersection")
    if name in ("filter", "filters"):
        return filter_monad()
    if name in ("ultrafilter", "beta"):
        return filter_monad(ultra=True)
    if name == "action":
        if monoid is None:
            T = parse_functor(spec) if arg else Action(MONOIDS["Z2"])
            monoid = T.monoid
        return action_monad(monoid)
    if name in ("exception", "endomorphism", "end"):
        T = parse_functor(spec)
        if isinstance(T, Exception_):
            return exception_monad(T.e)
        return endomorphism_monad(T.x)
    raise DataError(f"unknown monad {spec!r}")


# ------------------------------------------------------------------ law checks


def _elements(size: int, cap: int, samples: int, rng: random.Random) -> tuple[list, str]:
    if size <= cap:
        return range(size), "exhaustive"
    picks = {0, size - 1}
    while len(picks) < min(samples, size):
        picks.add(rng.randrange(size))
    return sorted(picks), "sampled"


def _safe_size(T: Endofunctor, n: int | None, max_bits: int) -> int | None:
    if n is None or T.size_bits(n) > max_bits:
        return None
    return T.size(n)


@dataclass
class LawResult:
    passed: bool = True
    checked: int = 0
    exhaustive: list = field(default_factory=list)
    sampled: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    witness: tuple | None = None

    def note(self, n, mode):
        getattr(self, mode).append(n)

    def fail(self, key):
        self.passed = False
        if self.witness is None or key < self.witness:
            self.witness = key

    def as_dict(self):
        return {
            "passed": self.passed,
            "checked": self.checked,
            "coverage": {"exhaustive": self.exhaustive, "sampled": self.sampled, "skipped": self.skipped},
            "witness": list(self.witness) if self.witness else None,
        }


# monad equations first, then the functor and naturality side conditions
LAW_PRIORITY = ("left-unit", "right-unit", "associativity", "functor", "unit-naturality", "mult-naturality")


@dataclass
class LawReport:
    name: str
    bound: int
    laws: dict
    seed: int = 0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.laws.values())

    @property
    def complete(self) -> bool:
        return all(not r.sampled and not r.skipped for r in self.laws.values())

    @property
    def witness(self) -> tuple | None:
        """The first failing law in ``LAW_PRIORITY`` with its minimal witness."""
        for law in LAW_PRIORITY:
            r = self.laws.get(law)
            if r is not None and r.witness is not None:
                return (law,) + tuple(r.witness)
        return None

    def as_dict(self):
        return {
            "monad": self.name,
            "bound": self.bound,
            "passed": self.passed,
            "complete": self.complete,
            "seed": self.seed,
            "witness": list(self.witness) if self.witness else None,
            "laws": {k: v.as_dict() for k, v in self.laws.items()},
        }


def check_monad_laws(
    M: MonadPres,
    bound: int,
    *,
    sizes: Iterable[int] | None = None,
    cap: int = ELEMENT_CAP,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    max_bits: int = MAX_ELEMENT_BITS,
    map_bound: int | None = None,
) -> LawReport:
    """Functoriality, naturality of unit and mult, both unit laws, associativity.

    Witnesses are (object size, element index) minimal within each law;
    ``map_bound`` caps the object sizes used for naturality squares.
    """
    T = M.functor
    rng = random.Random(seed)
    objs = sorted(set(sizes)) if sizes is not None else list(range(bound + 1))
    mb = bound if map_bound is None else map_bound
    nat_objs = [n for n in objs if n <= mb]
    laws = {k: LawResult() for k in ("functor", "unit-naturality", "mult-naturality", "left-unit", "right-unit", "associativity")}

    # functoriality on all maps among the checked objects
    r = laws["functor"]
    for a in nat_objs:
        if _safe_size(T, a, max_bits) is None or T.size(a) > MAX_MATERIALIZE:
            r.note(a, "skipped")
            continue
        ident = T.fmap_table(tuple(range(a)), a)
        r.checked += 1
        if ident != tuple(range(T.size(a))):
            r.fail((a, next(i for i, v in enumerate(ident) if v != i)))
        for b in nat_objs:
            for f in all_functions(a, b):
                Tf = T.fmap_table(f, b)
                for c in nat_objs:
                    if _safe_size(T, c, max_bits) is None:
                        continue
                    for g in all_functions(b, c):
                        Tg = T.fmap_table(g, c)
                        gf = tuple(g[v] for v in f)
                        Tgf = T.fmap_table(gf, c)
                        r.checked += 1
                        for x in range(len(Tf)):
                            if Tgf[x] != Tg[Tf[x]]:
                                r.fail((a, x))
                                break
        r.note(a, "exhaustive")

    # unit naturality: T f . eta_a = eta_b . f
    r = laws["unit-naturality"]
    for a in nat_objs:
        for b in nat_objs:
            for f in all_functions(a, b):
                for x in range(a):
                    r.checked += 1
                    if T.fmap(f, b, M.unit(a, x)) != M.unit(b, f[x]):
                        r.fail((a, x))
        r.note(a, "exhaustive")

    # mult naturality: T f . mu_a = mu_b . T T f
    r = laws["mult-naturality"]
    for a in nat_objs:
        ta = _safe_size(T, a, max_bits)
        tta = _safe_size(T, ta, max_bits)
        if tta is None:
            r.note(a, "skipped")
            continue
        zs, mode = _elements(tta, cap, samples, rng)
        for b in nat_objs:
            tb = T.size(b)
            if _safe_size(T, tb, max_bits) is None:
                r.note(a, "skipped")
                continue
            for f in all_functions(a, b):
                Tf = LazyTable(lambda y, f=f, b=b: T.fmap(f, b, y), ta)
                for z in zs:
                    r.checked += 1
                    try:
                        ok = T.fmap(f, b, M.mult(a, z)) == M.mult(b, T.fmap(Tf, tb, z))
                    except ResourceExhausted:
                        r.note(a, "skipped")
                        break
                    if not ok:
                        r.fail((a, z))
                        break
        r.note(a, mode)

    for n in objs:
        tn = _safe_size(T, n, max_bits)
        if tn is None:
            for k in ("left-unit", "right-unit", "associativity"):
                laws[k].note(n, "skipped")
            continue
        ws, mode = _elements(tn, cap, samples, rng)
        eta_n = LazyTable(lambda x, n=n: M.unit(n, x), n)
        ttn = _safe_size(T, tn, max_bits)
        rl, rr = laws["left-unit"], laws["right-unit"]
        if ttn is not None:
            for w in ws:
                rl.checked += 1
                if M.mult(n, M.unit(tn, w)) != w:
                    rl.fail((n, w))
                rr.checked += 1
                if M.mult(n, T.fmap(eta_n, tn, w)) != w:
                    rr.fail((n, w))
        rl.note(n, mode if ttn is not None else "skipped")
        rr.note(n, mode if ttn is not None else "skipped")

        ra = laws["associativity"]
        tttn = _safe_size(T, ttn, max_bits)
        if tttn is None:
            ra.note(n, "skipped")
            continue
        zs, mode = _elements(tttn, cap, samples, rng)
        mu_n = LazyTable(lambda z, n=n: M.mult(n, z), ttn)
        for z in zs:
            ra.checked += 1
            try:
                left = M.mult(n, M.mult(tn, z))
                right = M.mult(n, T.fmap(mu_n, tn, z))
            except ResourceExhausted:
                ra.note(n, "skipped")
                break
            if left != right:
                ra.fail((n, z))
        else:
            ra.note(n, mode)
    return LawReport(M.name, bound, laws, seed)


# ------------------------------------------------------------------ cells


@dataclass
class Family:
    """A family of maps indexed by objects: ``rule(a, x)`` is component a at x."""

    rule: Callable[[int, int], int]
    defined_at: Callable[[int], bool] | None = None
    name: str = ""

    def __call__(self, a: int, x: int) -> int:
        return self.rule(a, x)

    def defined(self, a: int) -> bool:
        return self.defined_at is None or self.defined_at(a)

    def table(self, a: int, size: int) -> tuple:
        return tuple(self.rule(a, x) for x in range(size))

    def lazy(self, a: int, size: int) -> LazyTable:
        return LazyTable(lambda x: self.rule(a, x), size)

    @classmethod
    def from_tables(cls, tables: dict, name: str = "") -> "Family":
        tabs = {a: tuple(t) for a, t in tables.items()}

        def rule(a, x):
            return tabs[a][x]

        fam = cls(rule, tabs.__contains__, name)
        fam.tables = tabs
        return fam


@dataclass
class OneCell:
    """A functor FinSet(<=dom_bound) -> FinSet given by an endofunctor rule."""

    functor: Endofunctor
    dom_bound: int | None = None
    name: str = ""

    def __post_init__(self):
        if not self.name:
            self.name = self.functor.name if self.dom_bound is None else f"{self.functor.name}<={self.dom_bound}"

    @property
    def is_identity_rule(self) -> bool:
        return isinstance(self.functor, Identity)

    def size(self, a: int) -> int:
        return self.functor.size(a)

    def fmap(self, f, m: int, x: int) -> int:
        return self.functor.fmap(f, m, x)

    def in_domain(self, a: int) -> bool:
        return self.dom_bound is None or a <= self.dom_bound


def identity_cell() -> OneCell:
    return OneCell(Identity(), None, "identity")


def inclusion_cell(n: int) -> OneCell:
    return OneCell(Identity(), n, f"J{n}")


def compose_one_cells(g2: OneCell, g1: OneCell) -> OneCell:
    """g2 after g1."""
    if g2.is_identity_rule:
        F = g1.functor
    elif g1.is_identity_rule:
        F = g2.functor
    else:
        F = Composite(g2.functor, g1.functor)
    return OneCell(F, g1.dom_bound, f"{g2.name}.{g1.name}")


@dataclass
class LaxCell:
    """(g, phi) with phi_a : s(g a) -> g(t a); ``source`` is t, ``target`` is s."""

    g: OneCell
    phi: Family
    source: MonadPres
    target: MonadPres
    tag: str = "lax"


@dataclass
class ColaxCell:
    """(g, psi) with psi_a : g(t a) -> s(g a); ``source`` is t, ``target`` is s."""

    g: OneCell
    psi: Family
    source: MonadPres
    target: MonadPres
    tag: str = "colax"


@dataclass
class MonadMap:
    """theta_a : t(a) -> s(a) on a single category."""

    theta: Family
    source: MonadPres
    target: MonadPres
    bound: int | None = None
    tag: str = "map"


@dataclass
class CellReport:
    kind: str
    axioms: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.axioms.values())

    @property
    def witness(self):
        found = [(r.witness, k) for k, r in self.axioms.items() if r.witness is not None]
        if not found:
            return None
        w, k = min(found)
        return (k,) + tuple(w)

    def as_dict(self):
        return {
            "kind": self.kind,
            "passed": self.passed,
            "witness": list(self.witness) if self.witness else None,
            "axioms": {k: v.as_dict() for k, v in self.axioms.items()},
        }


def _objects(g: OneCell, fam: Family, bound: int) -> list:
    return [a for a in range(bound + 1) if g.in_domain(a) and fam.defined(a)]


def is_lax(
    c: LaxCell, bound: int, *, cap: int = ELEMENT_CAP, samples: int = DEFAULT_SAMPLES, seed: int = 0,
    max_bits: int = MAX_ELEMENT_BITS,
) -> CellReport:
    """phi . eta^s g = g eta^t and phi . mu^s g = g mu^t . phi t . s phi, plus naturality."""
    g, phi, t, s = c.g, c.phi, c.source, c.target
    S, Tt = s.functor, t.functor
    rng = random.Random(seed)
    ax = {k: LawResult() for k in ("naturality", "unit", "mult")}
    objs = _objects(g, phi, bound)

    r = ax["naturality"]
    for a in objs:
        ga, ta = g.size(a), Tt.size(a)
        sga = _safe_size(S, ga, max_bits)
        if sga is None:
            r.note(a, "skipped")
            continue
        xs, mode = _elements(sga, cap, samples, rng)
        for b in objs:
            gb, tb = g.size(b), Tt.size(b)
            for f in all_functions(a, b):
                gf = LazyTable(lambda v, f=f, b=b: g.fmap(f, b, v), ga)
                tf = LazyTable(lambda v, f=f, b=b: Tt.fmap(f, b, v), ta)
                for x in xs:
                    r.checked += 1
                    if phi(b, S.fmap(gf, gb, x)) != g.fmap(tf, tb, phi(a, x)):
                        r.fail((a, x))
                        break
        r.note(a, mode)

    r = ax["unit"]
    for a in objs:
        ga, ta = g.size(a), Tt.size(a)
        eta_t = LazyTable(lambda v, a=a: t.unit(a, v), a)
        for x in range(ga):
            r.checked += 1
            if phi(a, s.unit(ga, x)) != g.fmap(eta_t, ta, x):
                r.fail((a, x))
        r.note(a, "exhaustive")

    r = ax["mult"]
    for a in objs:
        ta = Tt.size(a)
        if not (g.in_domain(ta) and phi.defined(ta)):
            r.note(a, "skipped")
            continue
        ga, gta = g.size(a), g.size(ta)
        sga = _safe_size(S, ga, max_bits)
        ssga = _safe_size(S, sga, max_bits)
        if ssga is None:
            r.note(a, "skipped")
            continue
        zs, mode = _elements(ssga, cap, samples, rng)
        phi_a = phi.lazy(a, sga)
        mu_t = LazyTable(lambda v, a=a: t.mult(a, v), Tt.size(ta))
        for z in zs:
            r.checked += 1
            left = phi(a, s.mult(ga, z))
            right = g.fmap(mu_t, ta, phi(ta, S.fmap(phi_a, gta, z)))
            if left != right:
                r.fail((a, z))
        r.note(a, mode)
    return CellReport("lax", ax)


def is_colax(
    c: ColaxCell, bound: int, *, cap: int = ELEMENT_CAP, samples: int = DEFAULT_SAMPLES, seed: int = 0,
    max_bits: int = MAX_ELEMENT_BITS,
) -> CellReport:
    """psi . g eta^t = eta^s g and psi . g mu^t = mu^s g . s psi . psi t, plus naturality."""
    g, psi, t, s = c.g, c.psi, c.source, c.target
    S, Tt = s.functor, t.functor
    rng = random.Random(seed)
    ax = {k: LawResult() for k in ("naturality", "unit", "mult")}
    objs = _objects(g, psi, bound)

    r = ax["naturality"]
    for a in objs:
        ta = Tt.size(a)
        gta = _safe_size(g.functor, ta, max_bits)
        if gta is None:
            r.note(a, "skipped")
            continue
        xs, mode = _elements(gta, cap, samples, rng)
        ga = g.size(a)
        for b in objs:
            gb, tb = g.size(b), Tt.size(b)
            for f in all_functions(a, b):
                tf = LazyTable(lambda v, f=f, b=b: Tt.fmap(f, b, v), ta)
                gf = LazyTable(lambda v, f=f, b=b: g.fmap(f, b, v), ga)
                for x in xs:
                    r.checked += 1
                    if psi(b, g.fmap(tf, tb, x)) != S.fmap(gf, gb, psi(a, x)):
                        r.fail((a, x))
                        break
        r.note(a, mode)

    r = ax["unit"]
    for a in objs:
        ga, ta = g.size(a), Tt.size(a)
        eta_t = LazyTable(lambda v, a=a: t.unit(a, v), a)
        for x in range(ga):
            r.checked += 1
            if psi(a, g.fmap(eta_t, ta, x)) != s.unit(ga, x):
                r.fail((a, x))
        r.note(a, "exhaustive")

    r = ax["mult"]
    for a in objs:
        ta = Tt.size(a)
        if not (g.in_domain(ta) and psi.defined(ta)):
            r.note(a, "skipped")
            continue
        tta = Tt.size(ta)
        gtta = _safe_size(g.functor, tta, max_bits)
        if gtta is None:
            r.note(a, "skipped")
            continue
        ga = g.size(a)
        sga = S.size(ga)
        zs, mode = _elements(gtta, cap, samples, rng)
        mu_t = LazyTable(lambda v, a=a: t.mult(a, v), tta)
        psi_a = psi.lazy(a, g.size(ta))
        for z in zs:
            r.checked += 1
            left = psi(a, g.fmap(mu_t, ta, z))
            right = s.mult(ga, S.fmap(psi_a, sga, psi(ta, z)))
            if left != right:
                r.fail((a, z))
        r.note(a, mode)
    return CellReport("colax", ax)


def as_colax(m: MonadMap) -> ColaxCell:
    return ColaxCell(identity_cell() if m.bound is None else inclusion_cell(m.bound), m.theta, m.source, m.target)


def as_lax(m: MonadMap) -> LaxCell:
    """theta : t -> s read as a lax cell s -> t along the identity."""
    return LaxCell(identity_cell() if m.bound is None else inclusion_cell(m.bound), m.theta, m.target, m.source)


def map_from_colax(c: ColaxCell) -> MonadMap:
    if not c.g.is_identity_rule:
        raise CompositionError("only cells along an identity 1-cell are monad maps")
    return MonadMap(c.psi, c.source, c.target, c.g.dom_bound)


def map_from_lax(c: LaxCell) -> MonadMap:
    if not c.g.is_identity_rule:
        raise CompositionError("only cells along an identity 1-cell are monad maps")
    return MonadMap(c.phi, c.target, c.source, c.g.dom_bound)


def is_monad_map(m: MonadMap, bound: int, **kw) -> CellReport:
    rep = is_colax(as_colax(m), bound, **kw)
    rep.kind = "map"
    return rep


def _same(m1: MonadPres, m2: MonadPres) -> bool:
    return m1 is m2 or m1.name == m2.name


def compose_lax(c1: LaxCell, c2: LaxCell) -> LaxCell:
    """c1 : t -> s along g, c2 : s -> r along g'; component g'(phi_a) . phi'_(g a)."""
    if not _same(c1.target, c2.source):
        raise CompositionError(f"middle monads differ: {c1.target.name} vs {c2.source.name}")
    g, phi, t = c1.g, c1.phi, c1.source
    g2, phi2 = c2.g, c2.phi
    T = t.functor

    def rule(a, x):
        y = phi2(g.size(a), x)
        ga_t = g.size(T.size(a))
        sga = c1.target.functor.size(g.size(a))
        return g2.fmap(phi.lazy(a, sga), ga_t, y)

    def defined(a):
        return phi.defined(a) and phi2.defined(g.size(a))

    return LaxCell(compose_one_cells(g2, g), Family(rule, defined, f"{phi2.name}*{phi.name}"), t, c2.target)


def compose_colax(c1: ColaxCell, c2: ColaxCell) -> ColaxCell:
    """c1 : t -> s along g, c2 : s -> r along g'; component psi'_(g a) . g'(psi_a)."""
    if not _same(c1.target, c2.source):
        raise CompositionError(f"middle monads differ: {c1.target.name} vs {c2.source.name}")
    g, psi, t = c1.g, c1.psi, c1.source
    g2, psi2 = c2.g, c2.psi
    S = c1.target.functor

    def rule(a, x):
        ga = g.size(a)
        gta = g.size(t.functor.size(a))
        y = g2.fmap(psi.lazy(a, gta), S.size(ga), x)
        return psi2(ga, y)

    def defined(a):
        return psi.defined(a) and psi2.defined(g.size(a))

    return ColaxCell(compose_one_cells(g2, g), Family(rule, defined, f"{psi2.name}*{psi.name}"), t, c2.target)


def compose_maps(m1: MonadMap, m2: MonadMap) -> MonadMap:
    """m2 after m1."""
    if not _same(m1.target, m2.source):
        raise CompositionError(f"middle monads differ: {m1.target.name} vs {m2.source.name}")
    th1, th2 = m1.theta, m2.theta
    bound = m1.bound if m2.bound is None else m2.bound if m1.bound is None else min(m1.bound, m2.bound)
    fam = Family(lambda a, x: th2(a, th1(a, x)), lambda a: th1.defined(a) and th2.defined(a))
    return MonadMap(fam, m1.source, m2.target, bound)


def identity_map(t: MonadPres, bound: int | None = None) -> MonadMap:
    return MonadMap(Family(lambda a, x: x, name="id"), t, t, bound)


def identity_lax(t: MonadPres, bound: int | None = None) -> LaxCell:
    g = identity_cell() if bound is None else inclusion_cell(bound)
    return LaxCell(g, Family(lambda a, x: x, name="id"), t, t)


def identity_colax(t: MonadPres, bound: int | None = None) -> ColaxCell:
    g = identity_cell() if bound is None else inclusion_cell(bound)
    return ColaxCell(g, Family(lambda a, x: x, name="id"), t, t)


def invert_lax(c: LaxCell, bound: int) -> ColaxCell:
    """(g, phi^-1) for a componentwise invertible lax cell, on objects <= bound."""
    tables = {}
    for a in _objects(c.g, c.phi, bound):
        n = c.target.functor.size(c.g.size(a))
        tab = c.phi.table(a, n)
        m = c.g.size(c.source.functor.size(a))
        if sorted(tab) != list(range(m)):
            raise DataError(f"component at {a} is not a bijection")
        inv = [0] * m
        for x, y in enumerate(tab):
            inv[y] = x
        tables[a] = inv
    return ColaxCell(c.g, Family.from_tables(tables, f"inv({c.phi.name})"), c.source, c.target)


def families_equal(f1: Family, f2: Family, sizes: dict) -> bool:
    """Compare components on the given {object: domain size} map."""
    return all(f1.table(a, n) == f2.table(a, n) for a, n in sizes.items())


def mult_as_lax(t: MonadPres) -> LaxCell:
    """(t, mu^t) as a lax cell from the identity monad to t."""
    return LaxCell(OneCell(t.functor), t.mult_family(), builtin_monad("identity"), t)


def mult_as_colax(t: MonadPres) -> ColaxCell:
    """(t, mu^t) as a colax cell from t to the identity monad."""
    return ColaxCell(OneCell(t.functor), t.mult_family(), t, builtin_monad("identity"))


def unit_as_map(t: MonadPres) -> MonadMap:
    return MonadMap(t.unit_family(), builtin_monad("identity"), t)


# ------------------------------------------------------------------ natural transformations


def elements_category(F: Diagram) -> FinCategory:
    """Objects (c, x) with x in F(c); a morphism (u, x) for every u out of c."""
    sh = F.shape
    offs = []
    k = 0
    for c in range(sh.object_count):
        offs.append(k)
        k += F.on_objects[c].size
    obj_labels = [(c, x) for c in range(sh.object_count) for x in range(F.on_objects[c].size)]
    doms, cods, labels = [], [], []
    index = {}
    for u in range(sh.morphism_count):
        c, d = sh.doms[u], sh.cods[u]
        tab = F.on_morphisms[u].table
        for x in range(F.on_objects[c].size):
            index[(u, x)] = len(labels)
            labels.append((u, x))
            doms.append(offs[c] + x)
            cods.append(offs[d] + tab[x])
    idents = [index[(sh.identities[c], x)] for c, x in obj_labels]

    def composer(m2, m1):
        u1, x = labels[m1]
        u2, _ = labels[m2]
        return index[(sh.compose(u2, u1), x)]

    cat = FinCategory(len(obj_labels), doms, cods, idents, composer=composer,
                      object_labels=obj_labels, morphism_labels=labels, name="elements")
    cat.offsets = tuple(offs)
    return cat


def enumerate_nat(source: Diagram, target: Diagram, budget: int | None = DEFAULT_BUDGET) -> list:
    """All natural transformations source => target, each a tuple of component tables.

    Computed as the limit of target over the category of elements of source,
    so the order is lexicographic in the concatenated tables.
    """
    if source.shape is not target.shape:
        raise DataError("functors live on different categories")
    el = elements_category(source)
    sh = source.shape
    objs = [target.on_objects[c] for c, _ in el.object_labels]
    mors = [target.on_morphisms[u] for u, _ in el.morphism_labels]
    res = limit(Diagram(el, objs, mors), budget)
    out = []
    offs = el.offsets
    for fam in res.families:
        out.append(tuple(tuple(fam[offs[c]: offs[c] + source.on_objects[c].size]) for c in range(sh.object_count)))
    return out


def family_from_components(components: Sequence[Sequence[int]], name: str = "") -> Family:
    return Family.from_tables({a: t for a, t in enumerate(components)}, name)


# ------------------------------------------------------------------ comma tensor


@dataclass
class CommaObject:
    """(s, sigma) with sigma_a : s(g a) -> g(t a)."""

    functor: Endofunctor
    sigma: Family


def comma_unit(t: MonadPres, g: OneCell) -> CommaObject:
    """(identity, g eta^t)."""

    def rule(a, x):
        return g.fmap(LazyTable(lambda v: t.unit(a, v), a), t.functor.size(a), x)

    return CommaObject(Identity(), Family(rule, lambda a: g.in_domain(a), "g.eta"))


def comma_tensor(o1: CommaObject, o2: CommaObject, t: MonadPres, g: OneCell) -> CommaObject:
    """(s', sigma') (x) (s, sigma) = (s's, g mu^t . sigma' t . s' sigma)."""
    s, sig = o1.functor, o1.sigma
    s2, sig2 = o2.functor, o2.sigma
    T = t.functor
    if isinstance(s2, Identity):
        F = s
    elif isinstance(s, Identity):
        F = s2
    else:
        F = Composite(s2, s)

    def rule(a, z):
        ta = T.size(a)
        if not g.in_domain(ta):
            raise CompositionError(f"t({a}) = {ta} lies outside the domain of {g.name}")
        sga = s.size(g.size(a))
        gta = g.size(ta)
        w = s2.fmap(sig.lazy(a, sga), gta, z)
        v = sig2(ta, w)
        mu = LazyTable(lambda q: t.mult(a, q), T.size(ta))
        return g.fmap(mu, ta, v)

    def defined(a):
        return sig.defined(a) and g.in_domain(T.size(a)) and sig2.defined(T.size(a))

    return CommaObject(F, Family(rule, defined, f"{sig2.name}(x){sig.name}"))


def comma_equal(o1: CommaObject, o2: CommaObject, g: OneCell, bound: int) -> bool:
    """Same functor values and components on every object <= bound where both are defined."""
    from .finset import all_functions as _af

    for a in range(bound + 1):
        if not g.in_domain(a):
            continue
        ga = g.size(a)
        if o1.functor.size(ga) != o2.functor.size(ga):
            return False
        for b in range(bound + 1):
            if not g.in_domain(b):
                continue
            gb = g.size(b)
            for f in _af(ga, gb):
                if o1.functor.fmap_table(f, gb) != o2.functor.fmap_table(f, gb):
                    return False
        d1, d2 = o1.sigma.defined(a), o2.sigma.defined(a)
        if d1 != d2:
            return False
        if d1 and o1.sigma.table(a, o1.functor.size(ga)) != o2.sigma.table(a, o2.functor.size(ga)):
            return False
    return True


def is_comma_object(o: CommaObject, t: MonadPres, g: OneCell, bound: int) -> bool:
    """Naturality of sigma : s g -> g t on objects <= bound."""
    T, s = t.functor, o.functor
    for a in range(bound + 1):
        if not (g.in_domain(a) and o.sigma.defined(a)):
            continue
        ga, ta = g.size(a), T.size(a)
        for b in range(bound + 1):
            if not (g.in_domain(b) and o.sigma.defined(b)):
                continue
            gb, tb = g.size(b), T.size(b)
            for f in all_functions(a, b):
                gf = LazyTable(lambda v, f=f, b=b: g.fmap(f, b, v), ga)
                tf = LazyTable(lambda v, f=f, b=b: T.fmap(f, b, v), ta)
                for x in range(s.size(ga)):
                    if o.sigma(b, s.fmap(gf, gb, x)) != g.fmap(tf, tb, o.sigma(a, x)):
                        return False
    return True


def require(report, what: str = "check"):
    """Raise InvariantViolation when a report did not pass."""
    if not report.passed:
        raise InvariantViolation(f"{what} failed: {report.witness}")
    return report
