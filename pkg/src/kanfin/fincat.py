"""Finite categories, functors between them, and comma categories.

A :class:`FinCategory` numbers its morphisms 0..M-1 and stores their
domains, codomains and the identity of each object.  Composition is either
an explicit table or a callback, which keeps large shapes (FinSet
skeletons, comma categories) cheap to build.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .errors import CompositionError, DataError
from .finset import Diagram, FinFunction, FinSetObj, all_functions


class FinCategory:
    """A finite category presented by tables.

    ``compose_table`` maps (m2, m1) to m2 . m1 for composable pairs; a
    ``composer`` callback may stand in for it.
    """

    def __init__(
        self,
        object_count: int,
        doms: Sequence[int],
        cods: Sequence[int],
        identities: Sequence[int],
        compose_table: Mapping | None = None,
        composer: Callable[[int, int], int] | None = None,
        object_labels: Sequence | None = None,
        morphism_labels: Sequence | None = None,
        name: str = "",
    ):
        if len(doms) != len(cods):
            raise DataError("doms and cods differ in length")
        if len(identities) != object_count:
            raise DataError("one identity per object is required")
        self.object_count = object_count
        self.doms = tuple(doms)
        self.cods = tuple(cods)
        self.identities = tuple(identities)
        self.compose_table = dict(compose_table) if compose_table is not None else None
        self._composer = composer
        self.object_labels = tuple(object_labels) if object_labels is not None else None
        self.morphism_labels = tuple(morphism_labels) if morphism_labels is not None else None
        self.name = name
        self._hom: dict | None = None
        self._out: dict | None = None

    @property
    def morphism_count(self) -> int:
        return len(self.doms)

    @property
    def morphisms(self):
        return tuple((i, d, c) for i, (d, c) in enumerate(zip(self.doms, self.cods)))

    def compose(self, m2: int, m1: int) -> int:
        """m2 after m1."""
        if self.cods[m1] != self.doms[m2]:
            raise CompositionError(f"morphisms {m2} and {m1} are not composable")
        if self.compose_table is not None:
            try:
                return self.compose_table[(m2, m1)]
            except KeyError:
                raise CompositionError(f"composite of {m2} after {m1} missing from table") from None
        if self._composer is None:
            raise CompositionError("category has no composition")
        return self._composer(m2, m1)

    def hom(self, a: int, b: int) -> list:
        if self._hom is None:
            h = defaultdict(list)
            for m, (d, c) in enumerate(zip(self.doms, self.cods)):
                h[(d, c)].append(m)
            self._hom = h
        return self._hom.get((a, b), [])

    def out_of(self, a: int) -> list:
        if self._out is None:
            o = defaultdict(list)
            for m, d in enumerate(self.doms):
                o[d].append(m)
            self._out = o
        return self._out.get(a, [])

    def composable_pairs(self):
        for m1 in range(self.morphism_count):
            for m2 in self.out_of(self.cods[m1]):
                yield m2, m1

    def composable_triples(self):
        """(m2, m1, m2 . m1) for every composable pair."""
        for m2, m1 in self.composable_pairs():
            yield m2, m1, self.compose(m2, m1)

    def __repr__(self):
        return f"FinCategory({self.name or '?'}: {self.object_count} objects, {self.morphism_count} morphisms)"


@dataclass
class ValidationReport:
    valid: bool
    violations: list = field(default_factory=list)

    def as_dict(self):
        return {"valid": self.valid, "violations": [list(v) for v in self.violations]}


def validate(c: FinCategory, max_violations: int = 20) -> ValidationReport:
    """Check the category axioms exhaustively, collecting witnesses."""
    bad: list = []

    def note(*w):
        if len(bad) < max_violations:
            bad.append(w)

    for o, i in enumerate(c.identities):
        if not 0 <= i < c.morphism_count or c.doms[i] != o or c.cods[i] != o:
            note("identity-type", o, i)
    if bad:
        return ValidationReport(False, bad)
    for m in range(c.morphism_count):
        d, cd = c.doms[m], c.cods[m]
        try:
            if c.compose(m, c.identities[d]) != m:
                note("right-unit", m)
            if c.compose(c.identities[cd], m) != m:
                note("left-unit", m)
        except CompositionError:
            note("unit-missing", m)
    comp = {}
    for m2, m1 in c.composable_pairs():
        try:
            m3 = c.compose(m2, m1)
        except CompositionError:
            note("missing-composite", m2, m1)
            continue
        if not 0 <= m3 < c.morphism_count or c.doms[m3] != c.doms[m1] or c.cods[m3] != c.cods[m2]:
            note("composite-type", m2, m1, m3)
            continue
        comp[(m2, m1)] = m3
    for (m2, m1), m21 in comp.items():
        for m3 in c.out_of(c.cods[m2]):
            left = comp.get((m3, m21))
            m32 = comp.get((m3, m2))
            right = comp.get((m32, m1)) if m32 is not None else None
            if left is None or right is None or left != right:
                note("associativity", m3, m2, m1)
    return ValidationReport(not bad, bad)


def from_tables(
    object_count: int,
    morphisms: Sequence[tuple[int, int]],
    identities: Sequence[int],
    compose: Iterable[tuple[int, int, int]],
    name: str = "",
) -> FinCategory:
    table = {(m2, m1): m3 for m2, m1, m3 in compose}
    return FinCategory(
        object_count,
        [d for d, _ in morphisms],
        [c for _, c in morphisms],
        identities,
        compose_table=table,
        name=name,
    )


def discrete(n: int) -> FinCategory:
    return FinCategory(n, list(range(n)), list(range(n)), list(range(n)), compose_table={(i, i): i for i in range(n)}, name=f"discrete{n}")


def terminal_category() -> FinCategory:
    return discrete(1)


def empty_category() -> FinCategory:
    return discrete(0)


def poset_category(n: int, relation: Iterable[tuple[int, int]]) -> FinCategory:
    """Thin category of the reflexive-transitive closure of a relation."""
    le = [[i == j for j in range(n)] for i in range(n)]
    for a, b in relation:
        le[a][b] = True
    for k in range(n):
        for i in range(n):
            if le[i][k]:
                for j in range(n):
                    if le[k][j]:
                        le[i][j] = True
    for i in range(n):
        for j in range(n):
            if i != j and le[i][j] and le[j][i]:
                raise DataError("relation has a cycle; not a poset")
    pairs = [(i, j) for i in range(n) for j in range(n) if le[i][j]]
    idx = {p: m for m, p in enumerate(pairs)}
    table = {}
    for (a, b), m1 in idx.items():
        for c in range(n):
            m2 = idx.get((b, c))
            if m2 is not None:
                table[(m2, m1)] = idx[(a, c)]
    return FinCategory(
        n,
        [a for a, _ in pairs],
        [b for _, b in pairs],
        [idx[(i, i)] for i in range(n)],
        compose_table=table,
        morphism_labels=pairs,
        name=f"poset{n}",
    )


def monoid_category(size: int, unit: int, table: Sequence[Sequence[int]]) -> FinCategory:
    """One-object category whose morphisms are monoid elements.

    Composition m2 . m1 is the product m2 * m1.
    """
    comp = {(a, b): table[a][b] for a in range(size) for b in range(size)}
    return FinCategory(1, [0] * size, [0] * size, [unit], compose_table=comp, name="monoid")


_SKELETONS: dict[int, FinCategory] = {}


def finset_skeleton(n: int) -> FinCategory:
    """The full subcategory of FinSet on 0..n; morphisms labelled (a, b, table)."""
    hit = _SKELETONS.get(n)
    if hit is not None:
        return hit
    labels = []
    for a in range(n + 1):
        for b in range(n + 1):
            for t in all_functions(a, b):
                labels.append((a, b, tuple(t)))
    idx = {lab: m for m, lab in enumerate(labels)}

    def composer(m2, m1):
        a, _, t1 = labels[m1]
        _, c, t2 = labels[m2]
        return idx[(a, c, tuple(t2[v] for v in t1))]

    cat = FinCategory(
        n + 1,
        [lab[0] for lab in labels],
        [lab[1] for lab in labels],
        [idx[(a, a, tuple(range(a)))] for a in range(n + 1)],
        composer=composer,
        morphism_labels=labels,
        name=f"FinSet<={n}",
    )
    cat._label_index = idx
    _SKELETONS[n] = cat
    return cat


def skeleton_morphism(n: int, a: int, b: int, table: Sequence[int]) -> int:
    cat = finset_skeleton(n)
    return cat._label_index[(a, b, tuple(table))]


def inclusion_functor(n: int) -> Diagram:
    """The truncated inclusion J_n : FinSet<=n -> FinSet as a tabulated functor."""
    cat = finset_skeleton(n)
    objs = tuple(FinSetObj(a) for a in range(n + 1))
    mors = tuple(FinFunction(objs[a], objs[b], t) for a, b, t in cat.morphism_labels)
    d = Diagram(cat, objs, mors)
    object.__setattr__(d, "inclusion_bound", n)
    return d


def point_functor(x: int) -> Diagram:
    """The functor from the terminal category picking the set x."""
    cat = terminal_category()
    s = FinSetObj(x)
    return Diagram(cat, (s,), (FinFunction(s, s, tuple(range(x))),))


@dataclass(eq=False)
class CatFunctor:
    source: FinCategory
    target: FinCategory
    obj_map: tuple
    mor_map: tuple

    def violations(self) -> list:
        s, t = self.source, self.target
        bad = []
        for o in range(s.object_count):
            if self.mor_map[s.identities[o]] != t.identities[self.obj_map[o]]:
                bad.append(("identity", o))
        for m in range(s.morphism_count):
            fm = self.mor_map[m]
            if t.doms[fm] != self.obj_map[s.doms[m]] or t.cods[fm] != self.obj_map[s.cods[m]]:
                bad.append(("typing", m))
        if bad:
            return bad
        for m2, m1, m3 in s.composable_triples():
            if t.compose(self.mor_map[m2], self.mor_map[m1]) != self.mor_map[m3]:
                bad.append(("composite", m2, m1))
        return bad


def identity_functor(c: FinCategory) -> CatFunctor:
    return CatFunctor(c, c, tuple(range(c.object_count)), tuple(range(c.morphism_count)))


def compose_functor_diagram(g: CatFunctor, h: Diagram) -> Diagram:
    """h . g for g: A -> B and h: B -> FinSet."""
    return Diagram(
        g.source,
        tuple(h.on_objects[g.obj_map[a]] for a in range(g.source.object_count)),
        tuple(h.on_morphisms[g.mor_map[m]] for m in range(g.source.morphism_count)),
    )


# ---------------------------------------------------------------- comma categories


def _is_surjective(table, size) -> bool:
    return len(set(table)) == size


class CommaCat:
    """The comma category b | G for a finite set b and G: C -> FinSet.

    Objects are pairs (a, g) with g: b -> G(a) stored as a table, ordered by
    (a, table).  Morphisms (a, g) -> (a2, g2) are C-morphisms u with
    G(u) . g = g2; they are generated lazily.
    """

    def __init__(self, anchor: int, functor: Diagram, surjective_only: bool = False):
        self.anchor = anchor
        self.functor = functor
        self.surjective_only = surjective_only
        C = functor.shape
        objs = []
        for a in range(C.object_count):
            size = functor.on_objects[a].size
            for t in all_functions(anchor, size):
                if surjective_only and not _is_surjective(t, size):
                    continue
                objs.append((a, tuple(t)))
        self.objects = tuple(objs)
        self.index = {o: i for i, o in enumerate(objs)}
        self._morphisms = None
        self._category = None
        self._projection = None

    @property
    def base(self) -> FinCategory:
        return self.functor.shape

    @property
    def object_count(self) -> int:
        return len(self.objects)

    def _candidate_out(self, a):
        C = self.base
        ms = C.out_of(a)
        if self.surjective_only:
            fo = self.functor.on_objects
            ms = [u for u in ms if _is_surjective(self.functor.on_morphisms[u].table, fo[C.cods[u]].size) or fo[a].size == 0]
        return ms

    def morphisms(self) -> tuple:
        """(src, dst, underlying C-morphism) triples; identities included."""
        if self._morphisms is None:
            C = self.base
            G = self.functor.on_morphisms
            out = []
            cand = {}
            for i, (a, g) in enumerate(self.objects):
                ms = cand.get(a)
                if ms is None:
                    ms = cand[a] = self._candidate_out(a)
                for u in ms:
                    t = G[u].table
                    j = self.index.get((C.cods[u], tuple(t[v] for v in g)))
                    if j is not None:
                        out.append((i, j, u))
            self._morphisms = tuple(out)
        return self._morphisms

    def category(self) -> FinCategory:
        if self._category is None:
            ms = self.morphisms()
            C = self.base
            lookup = {m: k for k, m in enumerate(ms)}
            ident = [lookup[(i, i, C.identities[a])] for i, (a, _) in enumerate(self.objects)]

            def composer(k2, k1):
                i, _, u1 = ms[k1]
                _, j, u2 = ms[k2]
                return lookup[(i, j, C.compose(u2, u1))]

            self._category = FinCategory(
                len(self.objects),
                [m[0] for m in ms],
                [m[1] for m in ms],
                ident,
                composer=composer,
                object_labels=self.objects,
                name=f"{self.anchor}|G" + ("(surj)" if self.surjective_only else ""),
            )
        return self._category

    def projection(self) -> CatFunctor:
        if self._projection is None:
            cat = self.category()
            self._projection = CatFunctor(
                cat, self.base, tuple(a for a, _ in self.objects), tuple(u for _, _, u in self.morphisms())
            )
        return self._projection

    def diagram(self, values: Diagram) -> Diagram:
        """The composite F . projection for F: C -> FinSet."""
        return compose_functor_diagram(self.projection(), values)

    def object_counts_by_base(self) -> dict:
        counts: dict = defaultdict(int)
        for a, _ in self.objects:
            counts[a] += 1
        return dict(counts)


def comma_over(b: int, G: Diagram | int, surjective: bool = False) -> CommaCat:
    """b | G; an integer G means the truncated inclusion J_G."""
    if isinstance(G, int):
        G = inclusion_functor(G)
    return CommaCat(b, G, surjective_only=surjective)


def surjection_subcategory(cc: CommaCat) -> CommaCat:
    """Full subcategory on the objects whose anchor map is onto."""
    return CommaCat(cc.anchor, cc.functor, surjective_only=True)


def connected_components(c: FinCategory) -> list:
    parent = list(range(c.object_count))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for d, cd in zip(c.doms, c.cods):
        ra, rb = find(d), find(cd)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict = defaultdict(list)
    for o in range(c.object_count):
        groups[find(o)].append(o)
    return sorted(groups.values())


def initial_objects(c: FinCategory) -> list:
    counts: dict = defaultdict(int)
    for d, cd in zip(c.doms, c.cods):
        counts[(d, cd)] += 1
    n = c.object_count
    return [x for x in range(n) if all(counts.get((x, y), 0) == 1 for y in range(n))]


def component_initials(c: FinCategory) -> list:
    """Per connected component, the objects initial within that component."""
    counts: dict = defaultdict(int)
    for d, cd in zip(c.doms, c.cods):
        counts[(d, cd)] += 1
    return [[x for x in comp if all(counts.get((x, y), 0) == 1 for y in comp)]
            for comp in connected_components(c)]


# ---------------------------------------------------------------- cofinality


@dataclass
class CofinalityReport:
    cofinal: bool
    checked_objects: int
    witness: tuple | None = None


def _kernel(table) -> tuple:
    first: dict = {}
    return tuple(first.setdefault(v, len(first)) for v in table)


def _refines(fine, coarse) -> bool:
    """ker(fine) is contained in ker(coarse)."""
    seen: dict = {}
    for x, y in zip(fine, coarse):
        if seen.setdefault(x, y) != y:
            return False
    return True


_COFINAL_CACHE: dict = {}


def check_cofinal(sub: CommaCat) -> CofinalityReport:
    """Decide whether limits over b | J_n may be computed over ``sub``.

    For every object x of the full comma, the category sub | x must be
    nonempty and connected.  For the truncated inclusion an object (I, e) of
    ``sub`` maps to x = (Y, g) exactly when g is constant on the fibres of e,
    and then by a unique map, so sub | x depends only on the kernel of g.
    The check therefore runs once per kernel partition realised by the full
    comma, using the actual morphisms of ``sub`` for connectivity.
    """
    n = getattr(sub.functor, "inclusion_bound", None)
    if n is None:
        return _check_cofinal_generic(sub)
    key = (sub.anchor, n)
    hit = _COFINAL_CACHE.get(key)
    if hit is not None:
        return hit
    b = sub.anchor
    kernels = {}
    for Y in range(n + 1):
        for g in all_functions(b, Y):
            kernels.setdefault(_kernel(g), (Y, tuple(g)))
    out_edges: dict = defaultdict(list)
    for i, j, _ in sub.morphisms():
        if i != j:
            out_edges[i].append(j)
    checked = 0
    result = CofinalityReport(True, 0)
    for ker, x in sorted(kernels.items()):
        members = [i for i, (_, e) in enumerate(sub.objects) if _refines(e, ker)]
        checked += 1
        if not members:
            result = CofinalityReport(False, checked, ("empty", x))
            break
        mset = set(members)
        parent = {m: m for m in members}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i in members:
            for j in out_edges[i]:
                if j in mset:
                    ra, rb = find(i), find(j)
                    if ra != rb:
                        parent[ra] = rb
        roots = {find(m) for m in members}
        if len(roots) != 1:
            result = CofinalityReport(False, checked, ("disconnected", x))
            break
    else:
        result = CofinalityReport(True, checked)
    _COFINAL_CACHE[key] = result
    return result


def _check_cofinal_generic(sub: CommaCat) -> CofinalityReport:
    """Literal check: objects of sub | x are pairs (d, u) with u: d -> x."""
    full = CommaCat(sub.anchor, sub.functor)
    C = full.base
    G = full.functor.on_morphisms
    sub_edges = [(i, j, w) for i, j, w in sub.morphisms() if i != j or w != C.identities[sub.objects[i][0]]]
    for xi, (a, g) in enumerate(full.objects):
        members = []
        for di, (a2, e) in enumerate(sub.objects):
            for u in C.hom(a2, a):
                t = G[u].table
                if tuple(t[v] for v in e) == g:
                    members.append((di, u))
        if not members:
            return CofinalityReport(False, xi + 1, ("empty", (a, g)))
        parent = {m: m for m in members}
        by_obj: dict = defaultdict(list)
        for di, u in members:
            by_obj[di].append(u)

        def find(z):
            while parent[z] != z:
                z = parent[z]
            return z

        for i, j, w in sub_edges:
            for u1 in by_obj.get(i, ()):
                for u2 in by_obj.get(j, ()):
                    if C.compose(u2, w) == u1:
                        ra, rb = find((i, u1)), find((j, u2))
                        if ra != rb:
                            parent[ra] = rb
        if len({find(m) for m in members}) != 1:
            return CofinalityReport(False, xi + 1, ("disconnected", (a, g)))
    return CofinalityReport(True, full.object_count)
