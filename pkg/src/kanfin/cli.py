"""kanfin command line.

Every subcommand builds a report dict with verdicts, a result payload and
statistics, prints it as JSON or as a plain table, and exits 0 only when
every verdict is "pass".
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .errors import DataError, InvariantViolation, KanfinError, ResourceExhausted
from .finset import DEFAULT_BUDGET, Diagram, FinFunction, FinSetObj
from .schemas import FORMAT_VERSION, SCHEMAS

EXIT_OK, EXIT_FAIL, EXIT_DATA, EXIT_RESOURCE, EXIT_INVARIANT = 0, 1, 2, 3, 4


# ---------------------------------------------------------------- file formats


def _read_json(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from None


def _ints(xs, what):
    if not isinstance(xs, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in xs):
        raise DataError(f"{what} must be a list of integers")
    return xs


def category_from_json(doc: dict):
    from .fincat import from_tables

    try:
        objs = doc["objects"]
        count = objs if isinstance(objs, int) else len(objs)
        morphs = sorted(doc["morphisms"], key=lambda m: m["id"])
        if [m["id"] for m in morphs] != list(range(len(morphs))):
            raise DataError("morphism ids must be 0..k-1")
        pairs = [(m["dom"], m["cod"]) for m in morphs]
        ident = _ints(doc["identities"], "identities")
        comp = [tuple(_ints(t, "compose entry")) for t in doc["compose"]]
    except (KeyError, TypeError) as exc:
        raise DataError(f"malformed category: {exc}") from None
    for d, c in pairs:
        if not (0 <= d < count and 0 <= c < count):
            raise DataError("morphism endpoint out of range")
    if any(len(t) != 3 for t in comp):
        raise DataError("compose entries are [m2, m1, m3]")
    return from_tables(count, pairs, ident, comp, name=doc.get("name", ""))


def diagram_from_json(doc: dict) -> Diagram:
    try:
        cat = category_from_json(doc["shape"])
        sizes = _ints(doc["on_objects"], "on_objects")
        tables = doc["on_morphisms"]
    except KeyError as exc:
        raise DataError(f"malformed diagram: missing {exc}") from None
    objs = [FinSetObj(s) for s in sizes]
    if len(objs) != cat.object_count or len(tables) != cat.morphism_count:
        raise DataError("diagram does not match its shape")
    mors = [FinFunction(objs[cat.doms[m]], objs[cat.cods[m]], tuple(_ints(t, "table"))) for m, t in enumerate(tables)]
    return Diagram(cat, objs, mors)


def load_monoid(spec: str):
    """A monoid file {size, unit, table}, or a registered name."""
    from .setfun import MONOIDS, FinMonoid

    if spec in MONOIDS:
        return MONOIDS[spec]
    doc = _read_json(spec)
    try:
        m = FinMonoid(doc["size"], doc["unit"], doc["table"], name=doc.get("name", Path(spec).stem))
    except KeyError as exc:
        raise DataError(f"malformed monoid: missing {exc}") from None
    bad = m.violations()
    if bad:
        raise DataError(f"not a monoid: {bad[0]}")
    return m


# ---------------------------------------------------------------- reports


class Report:
    def __init__(self, argv, deterministic: bool):
        self.data = {
            "format_version": FORMAT_VERSION,
            "command": list(argv),
            "verdicts": {},
            "result": {},
            "witnesses": {},
            "stats": {},
        }
        if not deterministic:
            self.data["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")

    def verdict(self, name, ok, witness=None):
        self.data["verdicts"][name] = "pass" if ok else "fail"
        if witness is not None and not ok:
            self.data["witnesses"][name] = witness

    @property
    def result(self):
        return self.data["result"]

    @property
    def stats(self):
        return self.data["stats"]

    @property
    def passed(self) -> bool:
        return all(v == "pass" for v in self.data["verdicts"].values())


def _render_table(data: dict) -> str:
    lines = [f"command: {' '.join(data['command'])}"]
    for name, v in data["verdicts"].items():
        w = data["witnesses"].get(name)
        lines.append(f"  {v.upper():8} {name}" + (f"  witness={json.dumps(w)}" if w is not None else ""))
    for key, val in data["result"].items():
        text = json.dumps(val, sort_keys=True)
        if len(text) > 160:
            text = text[:157] + "..."
        lines.append(f"  {key}: {text}")
    if data["stats"]:
        lines.append("  stats: " + json.dumps(data["stats"], sort_keys=True))
    if "error" in data:
        lines.append(f"  error: {data['error']}")
    return "\n".join(lines)


def emit(data: dict, fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(data, sort_keys=True, indent=1) + "\n")
    else:
        out.write(_render_table(data) + "\n")


# ---------------------------------------------------------------- commands


def cmd_validate(args, rep: Report):
    from .fincat import validate

    doc = _read_json(args.file)
    kind = args.kind
    if kind == "auto":
        if "shape" in doc:
            kind = "diagram"
        elif "table" in doc:
            kind = "monoid"
        elif "obj_map" in doc:
            kind = "functor"
        else:
            kind = "category"
    rep.result["kind"] = kind
    if kind == "category":
        r = validate(category_from_json(doc))
        rep.verdict("category-axioms", r.valid, r.as_dict()["violations"])
    elif kind == "diagram":
        d = diagram_from_json(doc)
        r = validate(d.shape)
        rep.verdict("category-axioms", r.valid, r.as_dict()["violations"])
        if r.valid:
            bad = d.functoriality_violations(10)
            rep.verdict("functoriality", not bad, [list(map(str, b)) for b in bad])
    elif kind == "monoid":
        from .setfun import FinMonoid

        m = FinMonoid(doc["size"], doc["unit"], doc["table"])
        bad = m.violations()
        rep.verdict("monoid-axioms", not bad, [list(b) for b in bad[:10]])
    else:
        from .fincat import CatFunctor

        if not (args.source and args.target):
            raise DataError("a functor file needs --source and --target category files")
        src = category_from_json(_read_json(args.source))
        tgt = category_from_json(_read_json(args.target))
        F = CatFunctor(src, tgt, tuple(_ints(doc["obj_map"], "obj_map")), tuple(_ints(doc["mor_map"], "mor_map")))
        if len(F.obj_map) != src.object_count or len(F.mor_map) != src.morphism_count:
            raise DataError("functor maps do not match the source category")
        bad = F.violations()
        rep.verdict("functor-axioms", not bad, [list(b) for b in bad[:10]])


def cmd_limit(args, rep: Report):
    from .finset import limit, naive_limit

    d = diagram_from_json(_read_json(args.file))
    res = limit(d, args.budget)
    rep.result["apex_size"] = res.apex.size
    rep.result["families"] = [list(f) for f in res.families]
    rep.stats.update(res.stats)
    if args.oracle:
        slow = naive_limit(d)
        rep.verdict("oracle-agreement", slow.families == res.families)


def cmd_limit_fuzz(args, rep: Report):
    from .randdiag import fuzz_limits

    r = fuzz_limits(args.count, args.seed, args.budget)
    rep.result.update(r.as_dict())
    rep.verdict("solver-equals-oracle", r.passed, r.mismatches[:5])


def cmd_comma(args, rep: Report):
    from .fincat import check_cofinal, comma_over

    cc = comma_over(args.size, args.trunc, surjective=args.surjective)
    rep.result["objects"] = cc.object_count
    rep.result["morphisms"] = len(cc.morphisms())
    rep.result["by_codomain"] = {str(k): v for k, v in sorted(cc.object_counts_by_base().items())}
    if args.list:
        rep.result["object_list"] = [[a, list(g)] for a, g in cc.objects]
    if args.surjective:
        c = check_cofinal(cc)
        rep.result["cofinality"] = {"cofinal": c.cofinal, "detail": getattr(c, "detail", None)}
        rep.verdict("cofinal", c.cofinal)


def _ran_payload(rep: Report, r, with_families: bool):
    rep.result["apex_size"] = r.size
    rep.result["comma_objects"] = r.extra.get("objects")
    rep.result["comma_morphisms"] = r.extra.get("morphisms")
    if with_families:
        rep.result["families"] = [list(r.family(x)) for x in range(r.size)]
    rep.stats.update(r.provenance.stats)


def cmd_ran(args, rep: Report):
    from .kan import ran_at
    from .setfun import parse_functor

    F = parse_functor(args.functor)
    r = ran_at(F, args.trunc, args.at, args.budget)
    _ran_payload(rep, r, args.families)
    if r.cofinality is not None:
        rep.verdict("cofinal", r.cofinality.cofinal)
    if args.oracle:
        _oracle(rep, r)


def _oracle(rep: Report, r):
    from .finset import naive_limit

    d = r.comma.diagram(r.values)
    try:
        slow = naive_limit(d)
    except ResourceExhausted as exc:
        rep.result["oracle"] = f"skipped: {exc}"
        return
    rep.verdict("oracle-agreement", slow.families == r.provenance.families)


def cmd_codensity(args, rep: Report):
    from .monadcalc import builtin_monad
    from .pushfwd import PushforwardMonad

    Pf = PushforwardMonad(builtin_monad("identity"), args.trunc, args.budget)
    r = Pf.ran(args.at)
    _ran_payload(rep, r, False)
    unit = [Pf.unit(args.at, x) for x in range(args.at)]
    rep.result["unit"] = unit
    # an apex element is principal when its family is h |-> h(x) for a point x
    labels = []
    for y in range(r.size):
        pts = [x for x in range(args.at) if unit[x] == y]
        labels.append({"principal_at": pts[0]} if pts else {"family": list(r.family(y))})
    rep.result["labels"] = labels
    rep.result["unit_bijective"] = sorted(unit) == list(range(r.size))
    if args.expect is not None:
        rep.verdict("apex-size", r.size == args.expect, {"got": r.size, "expected": args.expect})
    if args.oracle:
        _oracle(rep, r)


def cmd_pushforward(args, rep: Report):
    from .monadcalc import builtin_monad, check_monad_laws, is_lax
    from .pushfwd import PushforwardMonad, filter_shadow, kappa_checks

    T = builtin_monad(args.monad, load_monoid(args.monoid) if args.monoid else None)
    Pf = PushforwardMonad(T, args.trunc, args.budget)
    b = args.at
    r = Pf.ran(b)
    _ran_payload(rep, r, args.families)
    if args.unit:
        rep.result["unit"] = [Pf.unit(b, x) for x in range(b)]
    if args.mult:
        try:
            pb = Pf.size(r.size)
            rep.result["mult"] = [Pf.mult(b, z) for z in range(pb)]
        except (ResourceExhausted, DataError) as exc:
            rep.result["mult"] = f"not tabulated: {exc}"
    if args.laws:
        small = min(b, 2)
        lr = check_monad_laws(Pf.monad(), small, seed=args.seed)
        rep.verdict("monad-laws", lr.passed, list(lr.witness) if lr.witness else None)
        rep.result["laws"] = lr.as_dict()
        kc = kappa_checks(Pf, b, seed=args.seed)
        rep.result["kappa_checks"] = kc
        for k, v in kc.items():
            rep.verdict(f"{k}@{b}", v["passed"])
        cr = is_lax(Pf.counit_cell(), min(args.trunc, 3))
        rep.verdict("counit-lax", cr.passed, list(cr.witness) if cr.witness else None)
        if T.name == "powerset" and args.trunc >= 2:
            fs = filter_shadow(Pf, b, seed=args.seed)
            rep.result["filter_shadow"] = fs.as_dict()
            rep.verdict("filter-shadow", fs.passed)


def cmd_laws(args, rep: Report):
    from .monadcalc import builtin_monad, check_monad_laws

    T = builtin_monad(args.monad, load_monoid(args.monoid) if args.monoid else None)
    lr = check_monad_laws(T, args.bound, seed=args.seed, samples=args.samples)
    rep.result.update(lr.as_dict())
    rep.verdict("monad-laws", lr.passed, list(lr.witness) if lr.witness else None)


UNIV_SOURCES = ("identity", "terminal", "subterminal", "ultrafilter")
UNIV_TARGETS = (
    "identity", "terminal", "subterminal", "powerset", "powerset-intersection", "filter", "ultrafilter",
    "action:M=Z2", "action:M=absorbing", "exception:E=1", "exception:E=2", "endomorphism:X=2",
)


def cmd_univ_check(args, rep: Report):
    from .monadcalc import builtin_monad
    from .pushfwd import PushforwardMonad, colax_suite, is_g_determined, univ_round_trip

    extra = max(0, args.bound - args.trunc)
    rows = []
    for tn in UNIV_SOURCES:
        t = builtin_monad(tn)
        for sn in UNIV_TARGETS:
            r = univ_round_trip(t, builtin_monad(sn), args.trunc, extra, args.budget)
            rows.append(r.as_dict())
            rep.verdict(f"lax:{tn}->{sn}", r.passed, r.failures[:1] or None)
    rep.result["lax"] = rows
    if args.colax:
        # colax_hat needs a target that is the extension of its own restriction
        targets = [m for m in map(builtin_monad, UNIV_TARGETS)
                   if is_g_determined(m, args.trunc, args.bound, args.budget).determined]
        targets += [PushforwardMonad(builtin_monad(n), args.trunc, args.budget).monad() for n in UNIV_SOURCES]
        crow = []
        for tn in UNIV_SOURCES:
            t = builtin_monad(tn)
            for s in targets:
                c = colax_suite(t, s, args.trunc, extra, args.budget)
                crow.append(c.as_dict())
                rep.verdict(f"colax:{tn}->{s.name}", c.passed)
        rep.result["colax"] = crow


def cmd_pentagon(args, rep: Report):
    from .filters import pentagon_check

    if args.flavor == "exception":
        param = int(args.param)
    else:
        param = load_monoid(args.param)
    r = pentagon_check(args.flavor, args.x, param, natural_bound=args.natural)
    rep.result.update(r.as_dict())
    rep.verdict("pentagons", r.passed, list(r.witness) if r.witness else None)
    rep.verdict("delta-bijective", r.bijective)
    if r.natural is not None:
        rep.verdict("delta-natural", r.natural)


def cmd_filters(args, rep: Report):
    from .filters import (
        enumerate_filters,
        enumerate_filters_bruteforce,
        enumerate_ultrafilters,
        is_ultrafilter_family,
        sigma,
    )

    n = args.size
    fl = enumerate_ultrafilters(n) if args.ultra else enumerate_filters(n)
    rep.result["count"] = len(fl)
    rep.result["generators"] = [f.generator for f in fl]
    if n <= 4:
        rep.result["members"] = [list(f.members()) for f in fl]
        brute = enumerate_filters_bruteforce(n)
        if args.ultra:
            brute = [fam for fam in brute if is_ultrafilter_family(n, fam)]
        mine = sorted(tuple(sorted(f.members())) for f in fl)
        rep.verdict("bruteforce-agreement", sorted(tuple(sorted(fam)) for fam in brute) == mine)
    expected = n if args.ultra else 1 << n
    rep.verdict("count", len(fl) == expected, {"got": len(fl), "expected": expected})
    if not args.ultra:
        s = sigma(n)
        rep.verdict("sigma-bijective", sorted(s) == list(range(len(fl))))


def cmd_algebras(args, rep: Report):
    from .emcat import algebras_vs_monad_maps, enumerate_algebras, enumerate_algebras_bruteforce
    from .monadcalc import builtin_monad

    T = builtin_monad(args.monad, load_monoid(args.monoid) if args.monoid else None)
    algs = enumerate_algebras(T, args.carrier, args.budget)
    rep.result["count"] = len(algs)
    rep.result["structures"] = [list(a.structure.table) for a in algs]
    try:
        brute = enumerate_algebras_bruteforce(T, args.carrier)
        rep.verdict("bruteforce-agreement", [a.structure.table for a in brute] == [a.structure.table for a in algs])
    except ResourceExhausted as exc:
        rep.result["bruteforce"] = f"skipped: {exc}"
    rep.verdict("laws-recheck", all(not a.violations(1) for a in algs))
    if args.maps:
        c = algebras_vs_monad_maps(T, args.carrier, args.bound, args.budget)
        rep.result["correspondence"] = c.as_dict()
        rep.verdict("algebras-vs-maps", c.passed)


def cmd_determined(args, rep: Report):
    from .monadcalc import builtin_monad
    from .pushfwd import is_g_determined

    T = builtin_monad(args.monad, load_monoid(args.monoid) if args.monoid else None)
    r = is_g_determined(T, args.trunc, args.bound, args.budget)
    rep.result.update(r.as_dict())
    if args.expect is not None:
        want = args.expect == "yes"
        rep.verdict("verdict-as-expected", r.determined == want, {"determined": r.determined})


def cmd_comparison(args, rep: Report):
    from .fincat import empty_category, inclusion_functor, point_functor, terminal_category
    from .pushfwd import comparison, empty_functor, identity_cat_monad, object_functor
    from .fincat import identity_functor

    if args.case == "counterexample":
        r = comparison(point_functor(args.x), empty_functor(terminal_category()),
                       identity_cat_monad(empty_category()), args.at, args.budget)
    elif args.case == "identity":
        J = inclusion_functor(args.trunc)
        r = comparison(J, identity_functor(J.shape), identity_cat_monad(J.shape), args.at, args.budget)
    else:
        J = inclusion_functor(args.trunc)
        r = comparison(J, object_functor(J.shape, args.trunc), identity_cat_monad(terminal_category()),
                       args.at, args.budget)
    rep.result.update(r.as_dict())


def cmd_stabilize(args, rep: Report):
    from .monadcalc import builtin_monad
    from .pushfwd import stabilization

    T = builtin_monad(args.monad, load_monoid(args.monoid) if args.monoid else None)
    rows = []
    for m in range(args.at_max + 1):
        if args.monad.startswith("exception"):
            expected = m + T.functor.e
        elif args.monad.startswith("action"):
            expected = T.functor.monoid.size * m
        else:
            expected = T.functor.size(m)
        row = stabilization(T, m, expected, range(args.trunc_min, args.trunc_max + 1), args.budget)
        rows.append(row)
        rep.verdict(f"stable@{m}", row["threshold"] is not None, row["sizes"])
    rep.result["rows"] = rows


def cmd_schema(args, rep: Report):
    rep.result["schema"] = SCHEMAS[args.name]


# ---------------------------------------------------------------- parser


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with suppressed defaults so they do not
    # overwrite values given before the subcommand name
    g = argparse.ArgumentParser(add_help=False)

    def d(v):
        return argparse.SUPPRESS if suppress else v

    g.add_argument("--budget", type=int, default=d(DEFAULT_BUDGET), help="search node budget (0 = unlimited)")
    g.add_argument("--format", choices=("json", "table"), default=d("json"))
    g.add_argument("--deterministic", action="store_true", default=d(False), help="omit the timestamp")
    g.add_argument("--seed", type=int, default=d(0))
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(True)
    p = argparse.ArgumentParser(prog="kanfin", description="Finite pushforward monads and Kan extensions.",
                                parents=[_global_flags(False)])
    p.add_argument("--version", action="version", version=f"kanfin {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.set_defaults(func=fn)
        return sp

    sp = add("validate", cmd_validate, "check a category, functor, monoid or diagram file")
    sp.add_argument("file")
    sp.add_argument("--kind", choices=("auto", "category", "functor", "monoid", "diagram"), default="auto")
    sp.add_argument("--source")
    sp.add_argument("--target")

    sp = add("limit", cmd_limit, "limit of a diagram file")
    sp.add_argument("file")
    sp.add_argument("--oracle", action="store_true", help="cross-check against the filtered product")

    sp = add("limit-fuzz", cmd_limit_fuzz, "solver against the filtered product on random diagrams")
    sp.add_argument("--count", type=int, default=200)

    sp = add("comma", cmd_comma, "the comma category b | J_n")
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--trunc", type=int, required=True)
    sp.add_argument("--surjective", action="store_true")
    sp.add_argument("--list", action="store_true")

    sp = add("ran", cmd_ran, "right Kan extension of a functor rule along J_n at one set")
    sp.add_argument("--functor", required=True)
    sp.add_argument("--trunc", type=int, required=True)
    sp.add_argument("--at", type=int, required=True)
    sp.add_argument("--families", action="store_true")
    sp.add_argument("--oracle", action="store_true")

    sp = add("pushforward", cmd_pushforward, "pushforward of a monad along J_n at one set")
    sp.add_argument("--monad", required=True)
    sp.add_argument("--monoid")
    sp.add_argument("--trunc", type=int, required=True)
    sp.add_argument("--at", type=int, required=True)
    sp.add_argument("--unit", action="store_true")
    sp.add_argument("--mult", action="store_true")
    sp.add_argument("--laws", action="store_true")
    sp.add_argument("--families", action="store_true")

    sp = add("codensity", cmd_codensity, "codensity monad of J_n at one set")
    sp.add_argument("--trunc", type=int, required=True)
    sp.add_argument("--at", type=int, required=True)
    sp.add_argument("--expect", type=int)
    sp.add_argument("--oracle", action="store_true")

    sp = add("laws", cmd_laws, "monad law check for a builtin monad")
    sp.add_argument("--monad", required=True)
    sp.add_argument("--monoid")
    sp.add_argument("--bound", type=int, default=3)
    sp.add_argument("--samples", type=int, default=48)

    sp = add("univ-check", cmd_univ_check, "lax-cell / monad-map round trips on enumerated cells")
    sp.add_argument("--trunc", type=int, default=2)
    sp.add_argument("--bound", type=int, default=3, help="largest set where maps are evaluated")
    sp.add_argument("--colax", action="store_true", help="also run the colax suite")

    sp = add("pentagon", cmd_pentagon, "distributive-law diagrams")
    sp.add_argument("--flavor", choices=("exception", "action"), required=True)
    sp.add_argument("--x", type=int, required=True)
    sp.add_argument("--param", required=True, help="|E|, or a monoid name or file")
    sp.add_argument("--natural", type=int, help="also check naturality up to this size")

    sp = add("filters", cmd_filters, "filters or ultrafilters on a finite set")
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--ultra", action="store_true")

    sp = add("algebras", cmd_algebras, "Eilenberg-Moore algebras on a carrier")
    sp.add_argument("--monad", required=True)
    sp.add_argument("--monoid")
    sp.add_argument("--carrier", type=int, required=True)
    sp.add_argument("--maps", action="store_true", help="compare with monad maps into End(carrier)")
    sp.add_argument("--bound", type=int)

    sp = add("determined", cmd_determined, "is a monad the right extension of its own restriction")
    sp.add_argument("--monad", required=True)
    sp.add_argument("--monoid")
    sp.add_argument("--trunc", type=int, required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--expect", choices=("yes", "no"))

    sp = add("comparison", cmd_comparison, "comparison map for a composite pushforward")
    sp.add_argument("--case", choices=("counterexample", "identity", "adjoint"), required=True)
    sp.add_argument("--x", type=int, default=2)
    sp.add_argument("--trunc", type=int, default=2)
    sp.add_argument("--at", type=int, default=1)

    sp = add("stabilize", cmd_stabilize, "sizes of truncated pushforwards over a range of truncations")
    sp.add_argument("--monad", required=True)
    sp.add_argument("--monoid")
    sp.add_argument("--at-max", type=int, default=4)
    sp.add_argument("--trunc-min", type=int, default=2)
    sp.add_argument("--trunc-max", type=int, default=6)

    sp = add("schema", cmd_schema, "print a JSON schema")
    sp.add_argument("name", choices=sorted(SCHEMAS))
    return p


def run(argv: list[str] | None = None, out=None) -> tuple[int, dict]:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the CLI reserves 2 for bad data
        code = exc.code if isinstance(exc.code, int) else 1
        return (EXIT_OK if code == 0 else EXIT_FAIL), {}
    if args.budget == 0:
        args.budget = None
    rep = Report(argv, args.deterministic)
    code = EXIT_OK
    try:
        args.func(args, rep)
        code = EXIT_OK if rep.passed else EXIT_FAIL
    except ResourceExhausted as exc:
        rep.data["error"] = str(exc)
        rep.data["verdicts"]["run"] = "resource"
        rep.stats.update(exc.stats)
        code = EXIT_RESOURCE
    except InvariantViolation as exc:
        rep.data["error"] = str(exc)
        code = EXIT_INVARIANT
    except (DataError, KeyError, TypeError, ValueError) as exc:
        rep.data["error"] = f"{type(exc).__name__}: {exc}"
        code = EXIT_DATA
    except KanfinError as exc:
        rep.data["error"] = str(exc)
        code = EXIT_DATA
    emit(rep.data, args.format, out)
    return code, rep.data


def main(argv: list[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
