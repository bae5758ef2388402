"""Computable endofunctors of skeletal FinSet.

Every rule works on element *indices*: ``size(n)`` gives |F(n)| and
``fmap(f, m, x)`` sends the element x of F(len(f)) along f: n -> m.  Index
arithmetic means elements of very large sets (say F(F(F(3))) for the
powerset) can still be manipulated one at a time, which the law checkers
rely on.  ``eval_object`` / ``eval_morphism`` materialize labelled sets and
tables when they are small enough, with per-instance memoization.

Canonical encodings:

* powerset and filters: a subset (or a principal generator) is its bitmask;
* exception ``X + E``: the X block first, then E;
* action ``M x X``: pair (m, x) at index m * |X| + x;
* endomorphism ``X^(X^Y)``: a function on X^Y (lex order) is read as a
  base-|X| numeral, most significant digit first.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

from .errors import DataError, ResourceExhausted
from .finset import Diagram, FinFunction, FinSetObj

MAX_MATERIALIZE = 1 << 20
# stands in for bit lengths too large to compute
ASTRONOMICAL = 1 << 64


class LazyTable:
    """A function table computed on demand; behaves like a sequence."""

    __slots__ = ("fn", "length", "_cache")

    def __init__(self, fn, length):
        self.fn = fn
        self.length = length
        self._cache = {}

    def __len__(self):
        return self.length

    def __getitem__(self, i):
        hit = self._cache.get(i)
        if hit is None:
            hit = self._cache[i] = self.fn(i)
        return hit

    def __iter__(self):
        return (self[i] for i in range(self.length))


def to_digits(v: int, base: int, width: int) -> list:
    """Digits of v in the given base, most significant first, zero padded."""
    if base == 2:
        if v == 0:
            return [0] * width
        s = bin(v)[2:]
        if len(s) > width:
            raise DataError("value too large for width")
        return [0] * (width - len(s)) + [c == "1" and 1 or 0 for c in s]
    if width <= 64:
        out = [0] * width
        for i in range(width - 1, -1, -1):
            v, out[i] = divmod(v, base)
        return out
    half = width // 2
    hi, lo = divmod(v, base ** (width - half))
    return to_digits(hi, base, half) + to_digits(lo, base, width - half)


def from_digits(ds: Sequence[int], base: int) -> int:
    if base == 2:
        return int("".join("1" if d else "0" for d in ds), 2) if ds else 0
    if len(ds) <= 64:
        v = 0
        for d in ds:
            v = v * base + d
        return v
    half = len(ds) // 2
    return from_digits(ds[:half], base) * base ** (len(ds) - half) + from_digits(ds[half:], base)


class Endofunctor:
    """Base class; subclasses implement ``size`` and ``fmap``."""

    name = "functor"

    def __init__(self):
        self._objects: dict = {}
        self._tables: dict = {}
        self._lock = threading.Lock()

    # -- rule interface
    def size(self, n: int) -> int:
        raise NotImplementedError

    def fmap(self, f: Sequence[int], m: int, x: int) -> int:
        raise NotImplementedError

    def label(self, n: int, x: int):
        return x

    def has_labels(self) -> bool:
        return False

    def size_bits(self, n: int) -> int:
        """Bit length of |F(n)|; overridden where |F(n)| itself is too big to form."""
        return self.size(n).bit_length()

    # -- materialization
    def eval_object(self, n: int | FinSetObj) -> FinSetObj:
        n = n.size if isinstance(n, FinSetObj) else n
        hit = self._objects.get(n)
        if hit is not None:
            return hit
        s = self.size(n)
        if s > MAX_MATERIALIZE:
            raise ResourceExhausted(f"{self.name}({n}) has {s} elements", {"size": s})
        labels = tuple(self.label(n, x) for x in range(s)) if self.has_labels() else None
        obj = FinSetObj(s, labels)
        with self._lock:
            return self._objects.setdefault(n, obj)

    def fmap_table(self, f: Sequence[int], m: int) -> tuple:
        key = (tuple(f), m)
        hit = self._tables.get(key)
        if hit is not None:
            return hit
        n = len(f)
        s = self.size(n)
        if s > MAX_MATERIALIZE:
            raise ResourceExhausted(f"{self.name}({n}) has {s} elements", {"size": s})
        t = tuple(self.fmap(f, m, x) for x in range(s))
        with self._lock:
            return self._tables.setdefault(key, t)

    def eval_morphism(self, f: FinFunction) -> FinFunction:
        n, m = f.dom.size, f.cod.size
        return FinFunction(self.eval_object(n), self.eval_object(m), self.fmap_table(f.table, m))

    def __call__(self, x):
        if isinstance(x, FinFunction):
            return self.eval_morphism(x)
        return self.eval_object(x)

    def __repr__(self):
        return self.name


class Identity(Endofunctor):
    name = "identity"

    def size(self, n):
        return n

    def fmap(self, f, m, x):
        return f[x]


class Constant(Endofunctor):
    def __init__(self, k: int, name: str | None = None):
        super().__init__()
        self.k = k
        self.name = name or f"constant:{k}"

    def size(self, n):
        return self.k

    def fmap(self, f, m, x):
        return x


def Terminal() -> Constant:
    return Constant(1, name="terminal")


class SubTerminal(Endofunctor):
    """Empty at the empty set, a point elsewhere."""

    name = "subterminal"

    def size(self, n):
        return 0 if n == 0 else 1

    def fmap(self, f, m, x):
        return 0


class Powerset(Endofunctor):
    name = "powerset"

    def size(self, n):
        return 1 << n

    def size_bits(self, n):
        return n + 1

    def fmap(self, f, m, x):
        out = 0
        i = 0
        while x:
            if x & 1:
                out |= 1 << f[i]
            x >>= 1
            i += 1
        return out

    def has_labels(self):
        return True


def mask_members(x: int) -> list:
    out = []
    i = 0
    while x:
        if x & 1:
            out.append(i)
        x >>= 1
        i += 1
    return out


class Exception_(Endofunctor):
    """X |-> X + E, the X block first."""

    def __init__(self, e: int):
        super().__init__()
        self.e = e
        self.name = f"exception:E={e}"

    def size(self, n):
        return n + self.e

    def fmap(self, f, m, x):
        n = len(f)
        return f[x] if x < n else m + (x - n)

    def label(self, n, x):
        return ("L", x) if x < n else ("R", x - n)

    def has_labels(self):
        return True


@dataclass(frozen=True)
class FinMonoid:
    size: int
    unit: int
    table: tuple
    name: str = "monoid"

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(tuple(r) for r in self.table))
        if len(self.table) != self.size or any(len(r) != self.size for r in self.table):
            raise DataError("monoid table must be size x size")
        if not 0 <= self.unit < self.size:
            raise DataError("monoid unit out of range")
        for r in self.table:
            for v in r:
                if not 0 <= v < self.size:
                    raise DataError("monoid table entry out of range")

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def violations(self) -> list:
        bad = []
        M = range(self.size)
        for a in M:
            if self.mul(self.unit, a) != a or self.mul(a, self.unit) != a:
                bad.append(("unit", a))
        for a in M:
            for b in M:
                for c in M:
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                        bad.append(("assoc", a, b, c))
        return bad


Z2 = FinMonoid(2, 0, ((0, 1), (1, 0)), name="Z2")
# unit 0 and an element 1 with 1*x = 1 = x*1
ABSORBING = FinMonoid(2, 0, ((0, 1), (1, 1)), name="absorbing")
MONOIDS = {"Z2": Z2, "z2": Z2, "absorbing": ABSORBING, "left-zero": ABSORBING, "leftzero": ABSORBING}


class Action(Endofunctor):
    """X |-> M x X."""

    def __init__(self, monoid: FinMonoid):
        super().__init__()
        self.monoid = monoid
        self.name = f"action:M={monoid.name}"

    def size(self, n):
        return self.monoid.size * n

    def fmap(self, f, m, x):
        n = len(f)
        a, y = divmod(x, n)
        return a * m + f[y]

    def label(self, n, x):
        return divmod(x, n)

    def has_labels(self):
        return True


class FilterFunctor(Endofunctor):
    """Filters (or ultrafilters) on finite sets, encoded by principal generator.

    The action on maps is evaluated literally as {B | f^-1 B in F} when
    ``literal`` is set; otherwise by the direct image of the generator.
    """

    def __init__(self, ultra: bool = False, literal: bool = False):
        super().__init__()
        self.ultra = ultra
        self.literal = literal
        self.name = "ultrafilter" if ultra else "filter"

    def size(self, n):
        return n if self.ultra else 1 << n

    def size_bits(self, n):
        return n.bit_length() if self.ultra else n + 1

    def generator(self, n, x) -> int:
        return 1 << x if self.ultra else x

    def element(self, n, gen: int) -> int:
        if self.ultra:
            if gen == 0 or gen & (gen - 1):
                raise DataError("not an ultrafilter generator")
            return gen.bit_length() - 1
        return gen

    def fmap(self, f, m, x):
        n = len(f)
        if self.literal:
            from .filters import FilterOnSet, filter_image

            img = filter_image(f, FilterOnSet.principal(n, self.generator(n, x)), m)
            return self.element(m, img.generator)
        if self.ultra:
            return f[x]
        return Powerset.fmap(None, f, m, x)

    def label(self, n, x):
        return self.generator(n, x)

    def has_labels(self):
        return True


class Endomorphism(Endofunctor):
    """Y |-> X^(X^Y)."""

    def __init__(self, x: int):
        super().__init__()
        self.x = x
        self.name = f"endomorphism:X={x}"
        self._pos: dict = {}
        self._big: dict = {}

    def size(self, n):
        return self.x ** (self.x**n)

    def size_bits(self, n):
        if self.x < 2:
            return 1
        if n > 1 << 16:
            return ASTRONOMICAL
        return self.x**n * (self.x - 1).bit_length() + 1

    def width(self, n):
        return self.x**n

    def digits(self, n, v):
        return to_digits(v, self.x, self.width(n))

    def encode(self, ds):
        return from_digits(ds, self.x)

    def _positions(self, f, m):
        """For every h' in X^m (lex), the lex index of h'.f in X^n."""
        key = (tuple(f), m)
        hit = self._pos.get(key) or self._big.get(key)
        if hit is not None:
            return hit
        x = self.x
        n = len(key[0])
        fs = key[0]
        out = []
        for j in range(x**m):
            hd = to_digits(j, x, m)
            out.append(from_digits([hd[fs[i]] for i in range(n)], x))
        # keep small position lists; only a handful of large ones
        if len(out) <= 256 and len(self._pos) < 4096:
            self._pos[key] = out
        elif len(out) > 256:
            if len(self._big) >= 8:
                self._big.pop(next(iter(self._big)))
            self._big[key] = out
        return out

    def fmap(self, f, m, v):
        n = len(f)
        x = self.x
        pos = self._positions(f, m)
        if x == 2:
            s = bin(v)[2:].zfill(x**n)
            return int("".join(s[p] for p in pos), 2) if pos else 0
        ds = self.digits(n, v)
        return self.encode([ds[p] for p in pos])

    def label(self, n, v):
        return tuple(self.digits(n, v))

    def has_labels(self):
        return True


class Composite(Endofunctor):
    """outer . inner."""

    def __init__(self, outer: Endofunctor, inner: Endofunctor):
        super().__init__()
        self.outer = outer
        self.inner = inner
        self.name = f"({outer.name}).({inner.name})"

    def size(self, n):
        return self.outer.size(self.inner.size(n))

    def size_bits(self, n):
        if self.inner.size_bits(n) > 1 << 20:
            return ASTRONOMICAL
        return self.outer.size_bits(self.inner.size(n))

    def fmap(self, f, m, x):
        n = len(f)
        g = self.inner
        gf = LazyTable(lambda y: g.fmap(f, m, y), g.size(n))
        return self.outer.fmap(gf, g.size(m), x)


class Tabulated(Endofunctor):
    """An endofunctor of FinSet<=n given by a tabulated diagram on the skeleton.

    Objects must land back in sizes <= n so that composites stay tabulated.
    """

    def __init__(self, diagram: Diagram, name: str = "tabulated"):
        super().__init__()
        from .fincat import finset_skeleton

        n = diagram.shape.object_count - 1
        if diagram.shape is not finset_skeleton(n):
            raise DataError("a tabulated endofunctor must live on a FinSet skeleton")
        for o in diagram.on_objects:
            if o.size > n:
                raise DataError(f"value of size {o.size} leaves FinSet<={n}")
        self.diagram = diagram
        self.bound = n
        self.name = name

    def size(self, n):
        if n > self.bound:
            raise DataError(f"{self.name} is only tabulated up to size {self.bound}")
        return self.diagram.on_objects[n].size

    def fmap(self, f, m, x):
        from .fincat import skeleton_morphism

        u = skeleton_morphism(self.bound, len(f), m, f)
        return self.diagram.on_morphisms[u].table[x]


# ---------------------------------------------------------------- tabulation

TabFunctor = Diagram


def truncate(F: Endofunctor, n: int) -> Diagram:
    """F restricted to FinSet<=n, tabulated on all functions."""
    from .fincat import finset_skeleton

    cat = finset_skeleton(n)
    objs = tuple(F.eval_object(a) for a in range(n + 1))
    mors = tuple(FinFunction(objs[a], objs[b], F.fmap_table(t, b)) for a, b, t in cat.morphism_labels)
    return Diagram(cat, objs, mors)


def restrict_along_inclusion(F: Endofunctor, n: int) -> Diagram:
    """The lift along the full inclusion FinSet<=n -> FinSet is restriction."""
    d = truncate(F, n)
    object.__setattr__(d, "restricted_from", F.name)
    return d


def functoriality_violations(F: Endofunctor, bound: int, limit: int = 10) -> list:
    """Check F(id) = id and F(g.f) = F(g).F(f) for all maps among sets of size <= bound."""
    from .finset import all_functions

    bad = []
    for n in range(bound + 1):
        if F.fmap_table(tuple(range(n)), n) != tuple(range(F.size(n))):
            bad.append(("identity", n))
    for a in range(bound + 1):
        for b in range(bound + 1):
            for f in all_functions(a, b):
                Ff = F.fmap_table(f, b)
                for c in range(bound + 1):
                    for g in all_functions(b, c):
                        Fg = F.fmap_table(g, c)
                        gf = tuple(g[v] for v in f)
                        if F.fmap_table(gf, c) != tuple(Fg[v] for v in Ff):
                            bad.append(("composite", f, g))
                            if len(bad) >= limit:
                                return bad
    return bad


def parse_functor(spec: str) -> Endofunctor:
    """Build a rule from a CLI-style name such as ``exception:E=2``."""
    name, _, arg = spec.partition(":")
    params = {}
    if arg:
        for part in arg.split(","):
            k, _, v = part.partition("=")
            params[k.strip()] = v.strip()
    name = name.strip().lower()
    try:
        if name in ("identity", "id"):
            return Identity()
        if name == "terminal":
            return Terminal()
        if name == "subterminal":
            return SubTerminal()
        if name in ("powerset", "p"):
            return Powerset()
        if name == "constant":
            return Constant(int(params.get("k", "1")))
        if name == "exception":
            return Exception_(int(params.get("E", "1")))
        if name == "action":
            m = params.get("M", "Z2")
            if m not in MONOIDS:
                from .cli import load_monoid

                return Action(load_monoid(m))
            return Action(MONOIDS[m])
        if name in ("filter", "filters"):
            return FilterFunctor()
        if name in ("ultrafilter", "beta"):
            return FilterFunctor(ultra=True)
        if name in ("endomorphism", "end"):
            return Endomorphism(int(params.get("X", "2")))
    except ValueError as exc:
        raise DataError(f"bad parameter in {spec!r}: {exc}") from None
    raise DataError(f"unknown functor {spec!r}")
