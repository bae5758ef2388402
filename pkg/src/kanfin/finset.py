"""Skeletal finite sets, functions between them, and finite (co)limits.

The object ``n`` is the set {0, ..., n-1}.  Derived sets may carry labels
(subset bitmasks, tuples, tagged pairs, families) kept in ascending order,
so two constructions of the same derived set compare equal.

The limit solver treats a diagram as a constraint problem: one variable per
shape object, its domain the set assigned to that object, and one functional
constraint per non-identity morphism.  It combines arc consistency with
backtracking and never materializes the full product.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import CompositionError, DataError, InvariantViolation, ResourceExhausted

if TYPE_CHECKING:
    from .fincat import FinCategory

DEFAULT_BUDGET = 2_000_000

BOT, TOP = 0, 1


@dataclass(frozen=True)
class FinSetObj:
    size: int
    labels: tuple | None = None

    def __post_init__(self):
        if self.size < 0:
            raise DataError(f"negative set size {self.size}")
        if self.labels is not None:
            if not isinstance(self.labels, tuple):
                object.__setattr__(self, "labels", tuple(self.labels))
            labs = self.labels
            if len(labs) != self.size:
                raise DataError(f"{len(labs)} labels for a set of size {self.size}")
            for a, b in zip(labs, labs[1:]):
                if not a < b:
                    raise DataError(f"labels not strictly ascending at {a!r}, {b!r}")

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(range(self.size))

    def index_of(self, label) -> int:
        if self.labels is None:
            if isinstance(label, int) and 0 <= label < self.size:
                return label
            raise KeyError(label)
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {lab: i for i, lab in enumerate(self.labels)}
            object.__setattr__(self, "_index", idx)
        return idx[label]

    def label(self, i: int):
        return i if self.labels is None else self.labels[i]

    def plain(self) -> "FinSetObj":
        return FinSetObj(self.size)


def fset(n: int) -> FinSetObj:
    return FinSetObj(n)


@dataclass(frozen=True)
class FinFunction:
    dom: FinSetObj
    cod: FinSetObj
    table: tuple

    def __post_init__(self):
        if not isinstance(self.table, tuple):
            object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != self.dom.size:
            raise DataError(f"table length {len(self.table)} != domain size {self.dom.size}")
        c = self.cod.size
        for v in self.table:
            if not 0 <= v < c:
                raise DataError(f"table entry {v} outside codomain of size {c}")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.cod.size

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def image(self) -> tuple:
        return tuple(sorted(set(self.table)))


def function(dom, cod, table) -> FinFunction:
    """Convenience constructor accepting sizes or FinSetObj values."""
    d = dom if isinstance(dom, FinSetObj) else FinSetObj(dom)
    c = cod if isinstance(cod, FinSetObj) else FinSetObj(cod)
    return FinFunction(d, c, tuple(table))


def identity(x: FinSetObj | int) -> FinFunction:
    x = x if isinstance(x, FinSetObj) else FinSetObj(x)
    return FinFunction(x, x, tuple(range(x.size)))


def compose(f: FinFunction, g: FinFunction) -> FinFunction:
    """Return g after f."""
    if f.cod.size != g.dom.size:
        raise CompositionError(f"cannot compose: cod(f)={f.cod.size} vs dom(g)={g.dom.size}")
    gt = g.table
    return FinFunction(f.dom, g.cod, tuple(gt[v] for v in f.table))


def bang(x: FinSetObj | int) -> FinFunction:
    """The unique map to the singleton."""
    x = x if isinstance(x, FinSetObj) else FinSetObj(x)
    return FinFunction(x, FinSetObj(1), (0,) * x.size)


def product(sets: Sequence[FinSetObj | int]) -> tuple[FinSetObj, tuple[FinFunction, ...]]:
    """Cartesian product with lexicographically ordered tuple labels."""
    objs = [s if isinstance(s, FinSetObj) else FinSetObj(s) for s in sets]
    tuples = list(itertools.product(*(range(o.size) for o in objs)))
    p = FinSetObj(len(tuples), tuple(tuples))
    projs = tuple(FinFunction(p, o, tuple(t[i] for t in tuples)) for i, o in enumerate(objs))
    return p, projs


def pairing(f: FinFunction, g: FinFunction) -> FinFunction:
    if f.dom.size != g.dom.size:
        raise CompositionError("pairing needs a common domain")
    p, _ = product([f.cod, g.cod])
    m = g.cod.size
    return FinFunction(f.dom, p, tuple(a * m + b for a, b in zip(f.table, g.table)))


def characteristic(x: FinSetObj | int, subset: Iterable[int]) -> FinFunction:
    """The map x -> 2 sending members of the subset to TOP (index 1)."""
    x = x if isinstance(x, FinSetObj) else FinSetObj(x)
    members = set(subset)
    for a in members:
        if not 0 <= a < x.size:
            raise DataError(f"element {a} not in a set of size {x.size}")
    return FinFunction(x, FinSetObj(2), tuple(TOP if i in members else BOT for i in range(x.size)))


def equalizer(f: FinFunction, g: FinFunction) -> tuple[FinSetObj, FinFunction]:
    if f.dom.size != g.dom.size or f.cod.size != g.cod.size:
        raise CompositionError("equalizer needs a parallel pair")
    keep = tuple(i for i in range(f.dom.size) if f.table[i] == g.table[i])
    e = FinSetObj(len(keep), keep)
    return e, FinFunction(e, f.dom, keep)


def coproduct(sets: Sequence[FinSetObj | int]) -> tuple[FinSetObj, tuple[FinFunction, ...]]:
    """Tagged sum; summand i occupies a contiguous block, in order."""
    objs = [s if isinstance(s, FinSetObj) else FinSetObj(s) for s in sets]
    labels = tuple((i, x) for i, o in enumerate(objs) for x in range(o.size))
    s = FinSetObj(len(labels), labels)
    injs, off = [], 0
    for o in objs:
        injs.append(FinFunction(o, s, tuple(range(off, off + o.size))))
        off += o.size
    return s, tuple(injs)


def cokernel_pair(m: FinFunction) -> tuple[FinFunction, FinFunction]:
    """Pushout of m along itself.

    Elements of the result are the classes of the two-copy disjoint union of
    cod(m) under m(x) in copy 0 ~ m(x) in copy 1, numbered by smallest member.
    """
    c = m.cod.size
    parent = list(range(2 * c))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for y in m.table:
        ra, rb = find(y), find(c + y)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(a) for a in range(2 * c)})
    num = {r: i for i, r in enumerate(roots)}
    labels = tuple(tuple(a for a in range(2 * c) if find(a) == r) for r in roots)
    q = FinSetObj(len(roots), labels)
    n1 = FinFunction(m.cod, q, tuple(num[find(a)] for a in range(c)))
    n2 = FinFunction(m.cod, q, tuple(num[find(c + a)] for a in range(c)))
    return n1, n2


def image_factorization(table: Sequence[int]) -> tuple[tuple, tuple]:
    """Split a table as incl . e with e surjective onto its sorted image.

    Returns (e_table, incl_table).
    """
    img = sorted(set(table))
    pos = {v: i for i, v in enumerate(img)}
    return tuple(pos[v] for v in table), tuple(img)


def all_functions(n: int, m: int):
    """All tables n -> m in lexicographic order."""
    return itertools.product(range(m), repeat=n)


# ---------------------------------------------------------------- diagrams


@dataclass(frozen=True, eq=False)
class Diagram:
    """A FinSet-valued functor on a finite category, tabulated."""

    shape: "FinCategory"
    on_objects: tuple
    on_morphisms: tuple

    def __post_init__(self):
        object.__setattr__(self, "on_objects", tuple(self.on_objects))
        object.__setattr__(self, "on_morphisms", tuple(self.on_morphisms))
        sh = self.shape
        if len(self.on_objects) != sh.object_count:
            raise DataError("on_objects length differs from the shape's object count")
        if len(self.on_morphisms) != sh.morphism_count:
            raise DataError("on_morphisms length differs from the shape's morphism count")
        for u, fn in enumerate(self.on_morphisms):
            if fn.dom.size != self.on_objects[sh.doms[u]].size or fn.cod.size != self.on_objects[sh.cods[u]].size:
                raise DataError(f"morphism {u}: assigned function has wrong domain or codomain")

    def functoriality_violations(self, limit: int | None = None) -> list:
        """Exhaustive check; returns witness tuples."""
        out = []
        sh = self.shape
        for o in range(sh.object_count):
            i = sh.identities[o]
            if self.on_morphisms[i].table != tuple(range(self.on_objects[o].size)):
                out.append(("identity", o))
        for m2, m1, m3 in sh.composable_triples():
            want = compose(self.on_morphisms[m1], self.on_morphisms[m2]).table
            if self.on_morphisms[m3].table != want:
                out.append(("composite", m2, m1, m3))
                if limit is not None and len(out) >= limit:
                    break
        return out

    def is_functorial(self) -> bool:
        return not self.functoriality_violations(limit=1)


@dataclass(frozen=True, eq=False)
class LimitResult:
    apex: FinSetObj
    legs: tuple
    families: tuple
    stats: dict = field(default_factory=dict)

    def family(self, i: int) -> tuple:
        return self.families[i]

    def index_of_family(self, fam: tuple) -> int:
        return self.apex.index_of(tuple(fam))


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Constraint:
    __slots__ = ("src", "dst", "table", "pre", "img_cache")

    def __init__(self, src, dst, table, dst_size):
        self.src = src
        self.dst = dst
        self.table = table
        pre = [0] * dst_size
        for v, w in enumerate(table):
            pre[w] |= 1 << v
        self.pre = pre
        self.img_cache = {}

    def image(self, mask):
        hit = self.img_cache.get(mask)
        if hit is None:
            t = self.table
            hit = 0
            for v in _iter_bits(mask):
                hit |= 1 << t[v]
            self.img_cache[mask] = hit
        return hit

    def preimage(self, mask):
        pre = self.pre
        out = 0
        for w in _iter_bits(mask):
            out |= pre[w]
        return out


def _constraints(d: Diagram):
    sh = d.shape
    sizes = [o.size for o in d.on_objects]
    unary = [(1 << s) - 1 for s in sizes]
    seen = set()
    cons = []
    ident = set(sh.identities)
    for u in range(sh.morphism_count):
        if u in ident:
            continue
        j, k = sh.doms[u], sh.cods[u]
        t = d.on_morphisms[u].table
        if j == k:
            fixed = 0
            for v, w in enumerate(t):
                if v == w:
                    fixed |= 1 << v
            unary[j] &= fixed
            continue
        key = (j, k, t)
        if key in seen:
            continue
        seen.add(key)
        cons.append(_Constraint(j, k, t, sizes[k]))
    return sizes, unary, cons


def _propagate(dom, touching, queue):
    """AC-3 over functional constraints; returns False on a wipe-out."""
    pending = set(queue)
    work = list(queue)
    while work:
        v = work.pop()
        pending.discard(v)
        for c in touching[v]:
            a, b = c.src, c.dst
            da, db = dom[a], dom[b]
            nb = db & c.image(da)
            if nb != db:
                if not nb:
                    return False
                dom[b] = nb
                if b not in pending:
                    pending.add(b)
                    work.append(b)
            na = da & c.preimage(dom[b])
            if na != da:
                if not na:
                    return False
                dom[a] = na
                if a not in pending:
                    pending.add(a)
                    work.append(a)
    return True


def limit(d: Diagram, budget: int | None = DEFAULT_BUDGET, *, max_solutions: int | None = None) -> LimitResult:
    """All compatible families of the diagram, in lexicographic order.

    ``budget`` bounds the number of search nodes (value assignments).
    """
    sizes, unary, cons = _constraints(d)
    nv = len(sizes)
    touching = [[] for _ in range(nv)]
    degree = [0] * nv
    for c in cons:
        touching[c.src].append(c)
        touching[c.dst].append(c)
        degree[c.src] += 1
        degree[c.dst] += 1
    order = sorted(range(nv), key=lambda v: (-degree[v], v))
    stats = {"variables": nv, "constraints": len(cons), "nodes": 0, "solutions": 0}
    dom = list(unary)
    if any(m == 0 for m in dom) and nv:
        return _finish(d, [], stats)
    if not _propagate(dom, touching, range(nv)):
        return _finish(d, [], stats)
    sols: list = []

    def search(dom, start):
        i = start
        while i < nv and dom[order[i]] & (dom[order[i]] - 1) == 0:
            i += 1
        if i == nv:
            sols.append(tuple(m.bit_length() - 1 for m in dom))
            stats["solutions"] += 1
            if max_solutions is not None and len(sols) > max_solutions:
                raise ResourceExhausted("limit has more elements than allowed", dict(stats))
            return
        v = order[i]
        for val in _iter_bits(dom[v]):
            stats["nodes"] += 1
            if budget is not None and stats["nodes"] > budget:
                raise ResourceExhausted(f"limit solver exceeded {budget} nodes", dict(stats))
            nd = list(dom)
            nd[v] = 1 << val
            if _propagate(nd, touching, [v]):
                search(nd, i + 1)

    search(dom, 0)
    sols.sort()
    return _finish(d, sols, stats)


def _finish(d: Diagram, sols, stats) -> LimitResult:
    apex = FinSetObj(len(sols), tuple(sols))
    legs = tuple(
        FinFunction(apex, d.on_objects[j], tuple(s[j] for s in sols)) for j in range(d.shape.object_count)
    )
    stats = dict(stats)
    stats["apex"] = len(sols)
    return LimitResult(apex, legs, tuple(sols), stats)


def naive_limit(d: Diagram, max_tuples: int = 10**6) -> LimitResult:
    """Filter the full product; reference oracle for small diagrams."""
    sizes = [o.size for o in d.on_objects]
    total = 1
    for s in sizes:
        total *= s
    if total > max_tuples:
        raise ResourceExhausted(f"product has {total} tuples", {"product": total})
    sh = d.shape
    checks = [(sh.doms[u], sh.cods[u], d.on_morphisms[u].table) for u in range(sh.morphism_count)]
    sols = [
        fam
        for fam in itertools.product(*(range(s) for s in sizes))
        if all(t[fam[j]] == fam[k] for j, k, t in checks)
    ]
    return _finish(d, sols, {"product": total})


def factor_cone(res: LimitResult, cone: Sequence[Sequence[int]], test_size: int) -> tuple:
    """Unique map from a test set into the apex commuting with the legs.

    ``cone[j][x]`` is the value at shape object j of test element x.  The cone
    law is the caller's responsibility; a family that is not an apex element
    raises :class:`InvariantViolation`.
    """
    out = []
    for x in range(test_size):
        fam = tuple(col[x] for col in cone)
        try:
            out.append(res.apex.index_of(fam))
        except KeyError:
            raise InvariantViolation(f"cone element {x} has no factorization") from None
    return tuple(out)


def cone_violations(d: Diagram, cone: Sequence[Sequence[int]], test_size: int) -> list:
    sh = d.shape
    bad = []
    for u in range(sh.morphism_count):
        j, k = sh.doms[u], sh.cods[u]
        t = d.on_morphisms[u].table
        cj, ck = cone[j], cone[k]
        for x in range(test_size):
            if t[cj[x]] != ck[x]:
                bad.append((u, x))
                break
    return bad
