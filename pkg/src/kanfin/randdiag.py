"""Seeded random FinSet-valued diagrams for cross-checking the limit solver.

Three families are produced:

* posets, with values built as quotients of a common set plus stray points;
* one-object categories from small monoids, with random actions;
* comma categories b | J_n carrying a builtin endofunctor.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .fincat import comma_over, monoid_category, poset_category
from .finset import Diagram, FinFunction, FinSetObj, limit, naive_limit

MAX_PRODUCT = 10**6


def _random_partition(rng: random.Random, u: int, blocks: int) -> list:
    return [rng.randrange(blocks) for _ in range(u)]


class _UF:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, a):
        while self.p[a] != a:
            self.p[a] = self.p[self.p[a]]
            a = self.p[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[max(a, b)] = min(a, b)


def random_poset_diagram(rng: random.Random, max_objects: int = 5, max_base: int = 5) -> Diagram:
    """i <= j gets the canonical map between quotients, coarser upward; strays go to the class of 0."""
    n = rng.randint(1, max_objects)
    rel = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
    cat = poset_category(n, rel)
    u = rng.randint(1, max_base)
    # own partition of each object, joined with those of everything below it
    ufs = []
    below = {j: [i for i in range(n) if i != j and _le(cat, i, j)] for j in range(n)}
    own = [_random_partition(rng, u, rng.randint(1, u)) for _ in range(n)]
    for j in range(n):
        uf = _UF(u)
        for i in [j] + below[j]:
            first = {}
            for x, blk in enumerate(own[i]):
                if blk in first:
                    uf.union(x, first[blk])
                else:
                    first[blk] = x
        ufs.append(uf)
    # the join over everything below is not transitive in one pass; repeat to a fixpoint
    changed = True
    while changed:
        changed = False
        for j in range(n):
            for i in below[j]:
                for x in range(u):
                    for y in range(u):
                        if ufs[i].find(x) == ufs[i].find(y) and ufs[j].find(x) != ufs[j].find(y):
                            ufs[j].union(x, y)
                            changed = True
    classes = []
    for j in range(n):
        roots = sorted({ufs[j].find(x) for x in range(u)})
        classes.append({r: k for k, r in enumerate(roots)})
    strays = [rng.randint(0, 2) for _ in range(n)]
    sizes = [len(classes[j]) + strays[j] for j in range(n)]
    objs = [FinSetObj(s) for s in sizes]
    mors = []
    for m in range(cat.morphism_count):
        i, j = cat.doms[m], cat.cods[m]
        table = [classes[j][ufs[j].find(_rep(ufs[i], classes[i], k, u))] for k in range(len(classes[i]))]
        if i == j:
            table += list(range(len(classes[j]), sizes[j]))
        else:
            table += [classes[j][ufs[j].find(0)]] * strays[i]
        mors.append(FinFunction(objs[i], objs[j], tuple(table)))
    return Diagram(cat, objs, mors)


def _le(cat, i, j) -> bool:
    return bool(cat.hom(i, j))


def _rep(uf: _UF, cls: dict, k: int, u: int) -> int:
    for x in range(u):
        if cls[uf.find(x)] == k:
            return x
    raise AssertionError("empty class")


def _cyclic(k: int) -> tuple:
    return tuple(tuple((a + b) % k for b in range(k)) for a in range(k))


# (size, unit, table)
SMALL_MONOIDS = (
    (2, 0, _cyclic(2)),
    (3, 0, _cyclic(3)),
    (2, 0, ((0, 1), (1, 1))),
    # {1, a, 0}: a*a = 0, 0 absorbing
    (3, 0, ((0, 1, 2), (1, 2, 2), (2, 2, 2))),
)


def _random_action(rng: random.Random, size: int, unit: int, table, x: int):
    """A random left action, found by rejection over small candidate maps."""
    for _ in range(2000):
        acts = [None] * size
        acts[unit] = tuple(range(x))
        for a in range(size):
            if acts[a] is None:
                acts[a] = tuple(rng.randrange(x) for _ in range(x))
        if all(acts[table[a][b]] == tuple(acts[a][acts[b][v]] for v in range(x)) for a in range(size) for b in range(size)):
            return acts
    # the trivial action always works
    return [tuple(range(x))] * size


def random_monoid_diagram(rng: random.Random, max_carrier: int = 6) -> Diagram:
    size, unit, table = rng.choice(SMALL_MONOIDS)
    cat = monoid_category(size, unit, table)
    x = rng.randint(1, max_carrier)
    acts = _random_action(rng, size, unit, table, x)
    obj = FinSetObj(x)
    return Diagram(cat, (obj,), tuple(FinFunction(obj, obj, acts[m]) for m in range(size)))


def random_comma_diagram(rng: random.Random) -> Diagram:
    from .setfun import Exception_, Identity, Powerset, SubTerminal, truncate

    n = rng.randint(1, 3)
    b = rng.randint(0, 3)
    F = rng.choice([Identity(), Powerset(), SubTerminal(), Exception_(1)])
    cc = comma_over(b, n, surjective=rng.random() < 0.5)
    return cc.diagram(truncate(F, n))


def product_size(d: Diagram) -> int:
    total = 1
    for o in d.on_objects:
        total *= o.size
    return total


KINDS = ("poset", "monoid", "comma")


def random_diagram(rng: random.Random) -> tuple[str, Diagram]:
    """(kind, diagram) from one of the three families, redrawn until the product is small enough."""
    makers = (random_poset_diagram, random_monoid_diagram, random_comma_diagram)
    while True:
        k = rng.randrange(3)
        d = makers[k](rng)
        if product_size(d) <= MAX_PRODUCT:
            return KINDS[k], d


@dataclass
class FuzzReport:
    count: int
    seed: int
    agreed: int
    kinds: dict
    mismatches: list
    nonempty: int = 0

    @property
    def passed(self) -> bool:
        return self.agreed == self.count

    def as_dict(self):
        return {"count": self.count, "seed": self.seed, "agreed": self.agreed, "kinds": self.kinds,
                "nonempty": self.nonempty, "mismatches": self.mismatches[:5], "passed": self.passed}


def fuzz_limits(count: int = 200, seed: int = 0, budget: int | None = None) -> FuzzReport:
    """Solver against the filtered product, element for element."""
    rng = random.Random(seed)
    agreed = nonempty = 0
    kinds = dict.fromkeys(KINDS, 0)
    bad = []
    for k in range(count):
        kind, d = random_diagram(rng)
        kinds[kind] = kinds.get(kind, 0) + 1
        fast = limit(d, budget)
        slow = naive_limit(d, MAX_PRODUCT)
        if fast.families == slow.families:
            agreed += 1
            nonempty += bool(fast.families)
        else:
            bad.append({"index": k, "solver": len(fast.families), "oracle": len(slow.families)})
    return FuzzReport(count, seed, agreed, kinds, bad, nonempty)
