"""Filters and ultrafilters on finite sets.

Subsets of an n-element set are bitmasks.  A filter is stored by its
principal generator (the intersection of its members); construction from an
arbitrary family of subsets verifies the filter axioms and extracts that
generator, so nothing about principality is assumed silently.

The improper filter (all subsets, generated by the empty set) counts as a
filter.  Ultrafilters are the proper filters with a singleton generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .errors import DataError, InvariantViolation, PreconditionError
from .finset import TOP, all_functions, image_factorization

LITERAL_LIMIT = 12


def full_mask(n: int) -> int:
    return (1 << n) - 1


def preimage_mask(f: Sequence[int], b: int) -> int:
    out = 0
    for i, v in enumerate(f):
        if b >> v & 1:
            out |= 1 << i
    return out


def image_mask(f: Sequence[int], a: int) -> int:
    out = 0
    i = 0
    while a:
        if a & 1:
            out |= 1 << f[i]
        a >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class FilterOnSet:
    carrier: int
    generator: int

    def __post_init__(self):
        if self.generator & ~full_mask(self.carrier):
            raise DataError("generator is not a subset of the carrier")

    @classmethod
    def principal(cls, n: int, gen: int) -> "FilterOnSet":
        return cls(n, gen)

    @classmethod
    def from_members(cls, n: int, members: Iterable[int]) -> "FilterOnSet":
        """Validate a family of subsets as a filter and return it."""
        fam = set(members)
        full = full_mask(n)
        if full not in fam:
            raise DataError("a filter must contain the whole carrier")
        violation = filter_axiom_violation(n, fam)
        if violation is not None:
            raise DataError(f"not a filter: {violation}")
        gen = full
        for a in fam:
            gen &= a
        # on a finite carrier the intersection of members is a member
        if gen not in fam:
            raise InvariantViolation("finite filter without least member")
        return cls(n, gen)

    def contains(self, a: int) -> bool:
        return a & self.generator == self.generator

    def members(self) -> tuple:
        if self.carrier > LITERAL_LIMIT:
            raise PreconditionError("carrier too large to list members")
        return tuple(a for a in range(1 << self.carrier) if self.contains(a))

    @property
    def is_ultra(self) -> bool:
        g = self.generator
        return g != 0 and g & (g - 1) == 0

    def point(self) -> int:
        if not self.is_ultra:
            raise PreconditionError("not an ultrafilter")
        return self.generator.bit_length() - 1


def filter_axiom_violation(n: int, fam: set) -> tuple | None:
    """Witness against: X in F, and A & B in F iff A in F and B in F."""
    if full_mask(n) not in fam:
        return ("missing-carrier",)
    for a in range(1 << n):
        ina = a in fam
        for b in range(a, 1 << n):
            if ((a & b) in fam) != (ina and b in fam):
                return ("intersection", a, b)
    return None


def is_ultrafilter_family(n: int, fam: set) -> bool:
    full = full_mask(n)
    return filter_axiom_violation(n, fam) is None and all((a in fam) != ((full ^ a) in fam) for a in range(1 << n))


def enumerate_filters(n: int) -> list:
    """Every filter on n, ordered by generator bitmask."""
    return [FilterOnSet(n, g) for g in range(1 << n)]


def enumerate_ultrafilters(n: int) -> list:
    return [FilterOnSet(n, 1 << x) for x in range(n)]


def enumerate_filters_bruteforce(n: int) -> list:
    """Oracle: test every family of subsets against the axioms (n <= 4)."""
    if n > 4:
        raise PreconditionError("brute force over families only for n <= 4")
    subsets = list(range(1 << n))
    out = []
    for code in range(1 << len(subsets)):
        fam = {a for a in subsets if code >> a & 1}
        if filter_axiom_violation(n, fam) is None:
            out.append(fam)
    return out


def filter_image(f: Sequence[int], flt: FilterOnSet, m: int) -> FilterOnSet:
    """{B subset of cod | f^-1 B in flt}, evaluated literally on small codomains."""
    if len(f) != flt.carrier:
        raise DataError("filter carrier differs from the map's domain")
    if m <= LITERAL_LIMIT:
        f = tuple(f)
        point_pre = [0] * m
        for i, v in enumerate(f):
            point_pre[v] |= 1 << i
        # preimages of all subsets of the codomain, built up one low bit at a time
        pre = [0] * (1 << m)
        gen = full_mask(m)
        for b in range(1, 1 << m):
            low = b & -b
            pre[b] = pre[b ^ low] | point_pre[low.bit_length() - 1]
        for b in range(1 << m):
            if flt.contains(pre[b]):
                gen &= b
        return FilterOnSet(m, gen)
    return FilterOnSet(m, image_mask(f, flt.generator))


# ------------------------------------------------------------ multiplication


@lru_cache(maxsize=None)
def _sharp_table(n: int) -> tuple:
    """A^# for every A, as a bitmask over the filters on n (indexed by generator)."""
    out = []
    for a in range(1 << n):
        s = 0
        for g in range(1 << n):
            if a & g == g:
                s |= 1 << g
        out.append(s)
    return tuple(out)


def a_sharp(n: int, a: int, ultra: bool = False) -> int:
    """A^# as a set of filter indices; with ``ultra``, A^# intersected with the ultrafilters.

    Ultrafilters on n are indexed by their point.
    """
    if ultra:
        out = 0
        for x in range(n):
            if FilterOnSet(n, 1 << x).contains(a):
                out |= 1 << x
        return out
    return _sharp_table(n)[a]


def mu_filter(n: int, big: FilterOnSet) -> FilterOnSet:
    """Filter multiplication: {A | A^# in big}, big a filter on the filters of n."""
    if big.carrier != 1 << n:
        raise DataError("outer filter must live on the set of filters of the carrier")
    members = [a for a in range(1 << n) if big.contains(a_sharp(n, a))]
    gen = full_mask(n)
    for a in members:
        gen &= a
    if not big.contains(a_sharp(n, gen)):
        raise InvariantViolation("multiplication produced a non-principal family")
    return FilterOnSet(n, gen)


def mu_ultra(n: int, big: FilterOnSet) -> FilterOnSet:
    """Ultrafilter multiplication: {A | A^# meet beta(n) in big}."""
    if big.carrier != n:
        raise DataError("outer ultrafilter must live on the ultrafilters of the carrier")
    if not big.is_ultra:
        raise DataError("outer family is not an ultrafilter")
    members = [a for a in range(1 << n) if big.contains(a_sharp(n, a, ultra=True))]
    gen = full_mask(n)
    for a in members:
        gen &= a
    out = FilterOnSet(n, gen)
    if not out.is_ultra:
        raise InvariantViolation("ultrafilter multiplication left the ultrafilters")
    return out


def sigma(n: int) -> tuple:
    """A |-> principal filter at A, as an index table P(n) -> F(n)."""
    return tuple(range(1 << n))


# ------------------------------------------------------------ distributive laws


def _split_ultra(gen: int, blocks: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """Locate an ultrafilter on a block-sum: (block number, point inside the block).

    Decided by asking which block (as a subset) belongs to the ultrafilter.
    """
    flt = FilterOnSet(sum(size for _, size in blocks), gen)
    hits = []
    for k, (off, size) in enumerate(blocks):
        block = ((1 << size) - 1) << off
        if flt.contains(block):
            hits.append(k)
    if len(hits) != 1:
        raise InvariantViolation("ultrafilter on a sum must contain exactly one summand")
    k = hits[0]
    off, size = blocks[k]
    # the restriction to the chosen summand: {A | A shifted into the block is a member}
    restricted = [a for a in range(1 << size) if flt.contains(a << off)]
    g = (1 << size) - 1
    for a in restricted:
        g &= a
    return k, g.bit_length() - 1


def delta_exception(n: int, e: int) -> tuple:
    """beta(n + E) -> beta(n) + E, indexed as in the exception functor."""
    out = []
    for x in range(n + e):
        gen = 1 << x
        k, p = _split_ultra(gen, [(0, n)] + [(n + i, 1) for i in range(e)])
        out.append(p if k == 0 else n + (k - 1))
    return tuple(out)


def delta_action(n: int, msize: int) -> tuple:
    """beta(M x n) -> M x beta(n); blocks are the slices {m} x n."""
    out = []
    for x in range(msize * n):
        k, p = _split_ultra(1 << x, [(a * n, n) for a in range(msize)])
        out.append(k * n + p)
    return tuple(out)


@dataclass
class PentagonReport:
    flavor: str
    x: int
    param: str
    passed: bool
    diagrams: dict = field(default_factory=dict)
    bijective: bool = True
    natural: bool | None = None
    witness: tuple | None = None

    def as_dict(self):
        return {
            "flavor": self.flavor,
            "x": self.x,
            "param": self.param,
            "passed": self.passed,
            "diagrams": self.diagrams,
            "delta_bijective": self.bijective,
            "natural": self.natural,
            "witness": list(self.witness) if self.witness else None,
        }


def pentagon_check(flavor: str, x: int, param, natural_bound: int | None = None) -> PentagonReport:
    """Check the two unit triangles and both pentagons elementwise at carrier x.

    ``param`` is |E| for the exception flavour and a FinMonoid for the action
    flavour.
    """
    from .monadcalc import builtin_monad
    from .setfun import FinMonoid

    beta = builtin_monad("ultrafilter")
    if flavor == "exception":
        S = builtin_monad(f"exception:E={int(param)}")
        delta = lambda n: delta_exception(n, int(param))  # noqa: E731
        pname = f"E={int(param)}"
    elif flavor == "action":
        if not isinstance(param, FinMonoid):
            from .setfun import MONOIDS

            param = MONOIDS[str(param)]
        S = builtin_monad("action", monoid=param)
        delta = lambda n: delta_action(n, param.size)  # noqa: E731
        pname = f"M={param.name}"
    else:
        raise PreconditionError(f"unknown flavour {flavor!r}")
    B, SF = beta.functor, S.functor
    rep = PentagonReport(flavor, x, pname, True)

    def fail(name, elem):
        rep.diagrams[name] = False
        rep.passed = False
        if rep.witness is None:
            rep.witness = (name, x, elem)

    n = x
    d_n = delta(n)
    if sorted(d_n) != list(range(SF.size(B.size(n)))):
        rep.bijective = False
        rep.passed = False
    eta_s = S.unit_table(n)
    eta_b = beta.unit_table(n)
    # unit triangle for the outer monad: delta . beta(eta^S) = eta^S beta
    ok = True
    for u in range(B.size(n)):
        if d_n[B.fmap(eta_s, SF.size(n), u)] != S.unit(B.size(n), u):
            ok = False
            fail("unit-beta", u)
            break
    rep.diagrams.setdefault("unit-beta", ok)
    ok = True
    for s in range(SF.size(n)):
        if d_n[beta.unit(SF.size(n), s)] != SF.fmap(eta_b, B.size(n), s):
            ok = False
            fail("unit-S", s)
            break
    rep.diagrams.setdefault("unit-S", ok)
    # top pentagon: delta . beta(mu^S) = mu^S beta . S(delta) . delta S
    sn = SF.size(n)
    ssn = SF.size(sn)
    mu_s = S.mult_table(n)
    d_sn = delta(sn)
    bn = B.size(n)
    ok = True
    for w in range(B.size(ssn)):
        left = d_n[B.fmap(mu_s, sn, w)]
        right = S.mult(bn, SF.fmap(d_n, SF.size(bn), d_sn[w]))
        if left != right:
            ok = False
            fail("top-pentagon", w)
            break
    rep.diagrams.setdefault("top-pentagon", ok)
    # bottom pentagon: delta . mu^beta S = S(mu^beta) . delta beta . beta(delta)
    bsn = B.size(sn)
    mu_b = beta.mult_table(n)
    d_bn = delta(bn)
    ok = True
    for w in range(B.size(bsn)):
        left = d_n[beta.mult(sn, w)]
        right = SF.fmap(mu_b, bn, d_bn[B.fmap(d_n, SF.size(bn), w)])
        if left != right:
            ok = False
            fail("bottom-pentagon", w)
            break
    rep.diagrams.setdefault("bottom-pentagon", ok)
    if natural_bound is not None:
        rep.natural = delta_natural(delta, B, SF, natural_bound)
        rep.passed = rep.passed and rep.natural
    return rep


def delta_natural(delta: Callable, B, SF, bound: int) -> bool:
    """delta_m . beta(S f) = S(beta f) . delta_n for all f: n -> m, n, m <= bound."""
    for n in range(bound + 1):
        dn = delta(n)
        for m in range(bound + 1):
            dm = delta(m)
            for f in all_functions(n, m):
                sf = SF.fmap_table(f, m)
                bf = B.fmap_table(f, m)
                for u in range(B.size(SF.size(n))):
                    if dm[B.fmap(sf, SF.size(m), u)] != SF.fmap(bf, B.size(m), dn[u]):
                        return False
    return True


# ------------------------------------------------------------ nu and recovery


LegFn = Callable[[Sequence[int], int], int]


def nu_value(flt: FilterOnSet, g: Sequence[int], y: int) -> int:
    """The intersection of the image filter F g (flt), a subset of y."""
    return filter_image(g, flt, y).generator


def nu_family(flt: FilterOnSet, objects: Sequence[tuple[int, tuple]]) -> tuple:
    """g |-> intersection of F g (flt), over the given comma objects (y, g)."""
    return tuple(nu_value(flt, g, y) for y, g in objects)


def recover_filter(n: int, leg: LegFn, bound: int, check: bool = True) -> tuple[FilterOnSet | None, dict]:
    """{A | <chi_A>(phi) within {TOP}} for a family given through its legs.

    ``leg(table, y)`` returns the component (a subset of y, as a bitmask) of
    the family at the map ``table``: n -> y.  Returns the filter (or None if
    the family of subsets fails the axioms) and a diagnostics dict.
    """
    if bound < 2:
        raise PreconditionError("recovering a filter needs codomain 2 inside the truncation")
    top_only = 1 << TOP
    fam = set()
    for a in range(1 << n):
        chi = tuple(TOP if a >> i & 1 else 0 for i in range(n))
        if leg(chi, 2) & ~top_only == 0:
            fam.add(a)
    info: dict = {"members": len(fam)}
    if not check:
        gen = full_mask(n)
        for a in fam:
            gen &= a
        return FilterOnSet(n, gen), info
    violation = filter_axiom_violation(n, fam)
    info["violation"] = violation
    if violation is not None:
        return None, info
    return FilterOnSet.from_members(n, fam), info


def tfae_check(n: int, leg: LegFn, bound: int) -> tuple | None:
    """Compare the three membership tests for every A; return a witness on disagreement.

    (i) for all f: n -> y (y <= bound) and B with f^-1 B = A: leg(f) within B;
    (ii) the same for some such pair; (iii) leg(chi_A) within {TOP}.
    """
    res = {a: [True, False] for a in range(1 << n)}
    for y in range(bound + 1):
        for f in all_functions(n, y):
            lf = leg(f, y)
            for b in range(1 << y):
                a = preimage_mask(f, b)
                inside = lf & ~b == 0
                r = res[a]
                r[0] = r[0] and inside
                r[1] = r[1] or inside
    for a in range(1 << n):
        chi = tuple(TOP if a >> i & 1 else 0 for i in range(n))
        iii = leg(chi, 2) & ~(1 << TOP) == 0
        i_, ii = res[a]
        if not (i_ == ii == iii):
            return (a, i_, ii, iii)
    return None


def leg_from_family(objects_index: dict, family: Sequence[int], fmap) -> LegFn:
    """Leg at an arbitrary map, via its image factorization through a surjective comma object.

    ``fmap(incl_table, y, value)`` pushes a value along the inclusion.
    """

    def leg(table, y):
        key = (y, tuple(table))
        i = objects_index.get(key)
        if i is not None:
            return family[i]
        e, incl = image_factorization(table)
        j = objects_index[(len(incl), e)]
        return fmap(incl, y, family[j])

    return leg
