"""Command line front end: ``bicat tables``, ``bicat verify`` and ``bicat inspect``."""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field
from math import comb
from typing import Callable

from . import arcs, cambrian, catalan
from . import coxeter as cox
from .errors import BicatError, CapExceeded, ConsistencyError, MissingTable, ParseError, UnsupportedSpec
from .poset import QPoly, is_distributive
from .roots import CartanSpec, coxeter_number, doubled_root_poset, irreducible_root_poset

POSET_CAP = 250


@dataclass
class RunConfig:
    command: str
    families: list[str] | None = None
    rank: int | None = None
    m: int | None = None
    coxeter: str = "bipartite"
    weak_order_cap: int = cox.WEAK_ORDER_CAP
    poset_cap: int = POSET_CAP
    arc_cap: int = arcs.ARC_CAP
    cache_dir: str | None = None
    fmt: str = "plain"
    extended: bool = False
    only: list[str] | None = None
    identity: str | None = None
    max_rank: int = 10
    types: list[str] | None = None
    with_bisortable: bool = False
    verbose: int = 0


# ---------------------------------------------------------------- type selection


DEFAULT_RANKS = {"A": range(1, 9), "B": range(2, 7), "D": range(4, 11)}
FIXED = {"E": (6, 7, 8), "F": (4,), "G": (2,), "H": (3, 4)}


def select_types(cfg: RunConfig) -> list[CartanSpec]:
    fams = cfg.families or list("ABDEFGHI")
    out = []
    for f in fams:
        if f not in "ABDEFGHI":
            raise UnsupportedSpec(f"unknown family {f!r}")
        if f == "I":
            ms = [cfg.m] if cfg.m else list(range(5, 13))
            out += [CartanSpec("I", 2, m) for m in ms]
            continue
        ranks = FIXED.get(f) or DEFAULT_RANKS[f]
        if cfg.rank is not None:
            ranks = [cfg.rank]
        out += [CartanSpec(f, r) for r in ranks]
    return out


def coxeter_choice(g: cox.Group, text: str) -> cambrian.CoxeterElementSpec:
    if text == "bipartite":
        return cambrian.bipartite_coxeter(g)
    if text == "linear":
        return cambrian.linear_coxeter(g)
    if text.startswith("word:"):
        try:
            word = [int(t) for t in text[5:].replace(",", " ").split()]
        except ValueError as exc:
            raise ParseError(f"bad Coxeter word {text!r}") from exc
        return cambrian.coxeter_from_word(g, word)
    raise ParseError(f"unknown Coxeter element selector {text!r}")


# ---------------------------------------------------------------- pipelines


def bisortable_polynomial(s, cfg: RunConfig, c_text: str = "bipartite") -> QPoly | None:
    """Descent polynomial of bisortable elements, or None when the weak order is over cap."""
    g = cox.build_group(s)
    try:
        L = cox.weak_order_lattice(g, cfg.weak_order_cap, cfg.cache_dir)
    except CapExceeded:
        return None
    data = cambrian.compute_cambrian_data(L, coxeter_choice(g, c_text))
    return cambrian.bisortable_descent_polynomial(data, L)


def cmd_tables(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    records, failures = [], []
    for s in select_types(cfg):
        def bis(t, s=s):
            formula_ok = str(t) != "H4"
            if formula_ok and not (cfg.with_bisortable or cfg.extended):
                return None
            return bisortable_polynomial(t, cfg)

        try:
            records.append(catalan.table_record(s, bis))
        except (ConsistencyError, MissingTable) as exc:
            failures.append(f"{s}: {exc}")
    if cfg.fmt == "json":
        print(catalan.tables_json(records), file=out)
    elif cfg.fmt == "markdown":
        print(catalan.tables_markdown(records), file=out)
    else:
        for r in records:
            poly = QPoly(r.binar_coeffs)
            print(f"{r.name:8} {r.bicat:>8}  {poly}  [{', '.join(r.sources)}]", file=out)
    for f in failures:
        print(f"FAIL {f}", file=out)
    return 1 if failures else 0


# ---------------------------------------------------------------- verify


@dataclass
class Check:
    group: str
    name: str
    run: Callable[[], bool]


@dataclass
class Report:
    results: list[tuple[str, str, bool, float, str]] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(not ok for _, _, ok, _, _ in self.results)


def _closed_form(s: CartanSpec) -> int | None:
    f, n = s.family, s.rank
    if f == "A":
        return comb(2 * n, n)
    if f == "B":
        return 2 ** (2 * n - 1)
    if f == "D":
        return 6 * 4 ** (n - 2) - 2 * comb(2 * n - 4, n - 2)
    if f == "I":
        return 2 * s.m
    return {"E6": 1700, "E7": 8872, "E8": 54066, "F4": 196, "G2": 12, "H3": 56, "H4": 550}.get(str(s))


def _pipeline_check(s: CartanSpec, cfg: RunConfig) -> Callable[[], bool]:
    def run():
        a = catalan.doubled_q(s)
        b = catalan.bicat_q(s)
        c = bisortable_polynomial(s, cfg)
        return c is not None and a == b == c

    return run


def _structure_check(s: CartanSpec) -> Callable[[], bool]:
    def run():
        dp = doubled_root_poset(irreducible_root_poset(s))
        return is_distributive(dp.poset) and catalan.bicat_q(s).coeff(1) == s.rank * (
            coxeter_number(s) - 1
        )

    return run


def _arc_check(n: int) -> Callable[[], bool]:
    def run():
        counts = arcs.enumerate_alternating(n)
        return list(counts) == [comb(n, k) ** 2 for k in range(n + 1)]

    return run


def build_checks(cfg: RunConfig) -> list[Check]:
    checks: list[Check] = []
    if cfg.identity:
        names = [cfg.identity]
    else:
        names = list(catalan.IDENTITIES)
    types = [catalan._norm(t) for t in cfg.types] if cfg.types else None
    for name in names:
        def run(name=name):
            kind = catalan.IDENTITIES[name][0]
            rank_cap = cfg.max_rank if kind == "n" else min(cfg.max_rank, 8)
            rep = catalan.verify_identity(name, types=types if kind != "n" else None, max_rank=rank_cap)
            return rep.ok

        checks.append(Check("identities", name, run))
    if cfg.identity:
        return checks

    for s in select_types(RunConfig("tables", families=cfg.families)):
        expect = _closed_form(s)

        def run(s=s, expect=expect):
            try:
                return catalan.bicat_q(s).at_one() == expect
            except MissingTable:
                poly = bisortable_polynomial(s, cfg)
                return poly is not None and poly.at_one() == expect

        checks.append(Check("tables", str(s), run))

    base = ["A2", "A3", "A4", "A5", "B2", "B3", "B4", "D4", "D5", "G2", "F4"]
    if cfg.extended:
        base += ["A6", "A7", "B5", "B6", "D6", "E6"]
    pipeline_types = cfg.types or base
    for t in pipeline_types:
        (s,) = catalan._norm(t)
        checks.append(Check("pipelines", str(s), _pipeline_check(s, cfg)))

    for t in ["A2", "A3", "A4", "A5", "A6", "B2", "B3", "B4", "B5", "B6", "D4", "D5", "D6", "F4", "G2", "H3", "I2(7)"]:
        (s,) = catalan._norm(t)
        checks.append(Check("structure", str(s), _structure_check(s)))

    for n in range(1, cfg.arc_cap + 1):
        checks.append(Check("arcs", f"alternating n={n}", _arc_check(n)))

    if cfg.only:
        checks = [c for c in checks if c.group in cfg.only]
    return checks


def cmd_verify(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    if cfg.identity and cfg.identity not in catalan.IDENTITIES:
        print(f"unknown identity {cfg.identity!r}", file=out)
        return 2
    rep = Report()
    for chk in build_checks(cfg):
        t0 = time.perf_counter()
        try:
            ok, note = chk.run(), ""
        except BicatError as exc:
            ok, note = False, f"{type(exc).__name__}: {exc}"
        dt = time.perf_counter() - t0
        rep.results.append((chk.group, chk.name, ok, dt, note))
        print(f"{'PASS' if ok else 'FAIL'} [{chk.group}] {chk.name} ({dt:.2f}s) {note}".rstrip(), file=out)
    total = len(rep.results)
    print(f"{total - rep.failures}/{total} checks passed", file=out)
    return 1 if rep.failures else 0


# ---------------------------------------------------------------- inspect


def _parse_perm(text: str) -> tuple[int, ...]:
    t = text.strip()
    try:
        vals = tuple(int(x) for x in (t.split(",") if "," in t else t))
    except ValueError as exc:
        raise ParseError(f"bad permutation {text!r}") from exc
    if sorted(vals) != list(range(1, len(vals) + 1)):
        raise ParseError(f"{text!r} is not a permutation of 1..{len(vals)}")
    return vals


def _parse_set(text: str) -> set[int]:
    try:
        return {int(x) for x in text.replace(" ", "").split(",") if x}
    except ValueError as exc:
        raise ParseError(f"bad set {text!r}") from exc


def cmd_inspect(args, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    if args.what == "perm":
        p = _parse_perm(args.value)
        d = arcs.delta(p)
        print(f"permutation {''.join(map(str, p)) if len(p) < 10 else p}", file=out)
        print("arc diagram:", file=out)
        for a in d.arcs:
            print(f"  {a.bottom} {a.top} L:{{{','.join(map(str, sorted(a.left)))}}}  {arcs.classify_arc(a)}", file=out)
        alternating = all(arcs.classify_arc(a) != "neither" for a in d.arcs)
        print(f"alternating arcs: {sum(arcs.classify_arc(a) != 'neither' for a in d.arcs)}/{len(d)}", file=out)
        if alternating:
            S, T = arcs.pi_map(d)
            print(f"pi image: S={sorted(S)} T={sorted(T)}", file=out)
        if len(p) >= 2:
            g = cox.build_group(f"A{len(p) - 1}")
            L = cox.weak_order_lattice(g, cfg.weak_order_cap, cfg.cache_dir)
            c = coxeter_choice(g, cfg.coxeter)
            data = cambrian.compute_cambrian_data(L, c)
            w = cox.element_from_permutation(L, p)
            verdict = "bisortable" if data.bisortable[w] else "not bisortable"
            print(f"{verdict} ({cfg.coxeter})", file=out)
            print(f"c-sortable: {data.sortable_c[w]}  c^-1-sortable: {data.sortable_cinv[w]}", file=out)
        return 0
    if args.what == "eta":
        if args.n is None:
            raise ParseError("inspect eta needs --n")
        d = arcs.eta(_parse_set(args.S), _parse_set(args.T), args.n)
        print(arcs.serialize(d) if d.arcs else "(empty diagram)", file=out)
        return 0
    raise ParseError(f"unknown inspect target {args.what!r}")


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bicat", description="biCatalan enumeration and verification")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", help="comma-separated families, e.g. A,B,E")
    common.add_argument("--rank", type=int)
    common.add_argument("--m", type=int, help="dihedral order for family I")
    common.add_argument("--coxeter", default="bipartite", help="bipartite | linear | word:<perm>")
    common.add_argument("--cache-dir", default=os.environ.get("BICAT_CACHE_DIR"))
    common.add_argument("--format", default="plain", choices=["plain", "json", "markdown"])
    common.add_argument("--extended", action="store_true")
    common.add_argument("--weak-order-cap", type=int, default=cox.WEAK_ORDER_CAP)
    common.add_argument("--arc-cap", type=int, default=arcs.ARC_CAP)
    common.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tables", parents=[common], help="biCatalan and biNarayana tables")
    t.add_argument("--with-bisortable", action="store_true", help="also run the weak-order pipeline")

    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("--only", help="comma-separated groups: identities,tables,pipelines,structure,arcs")
    v.add_argument("--identity")
    v.add_argument("--max-rank", type=int, default=10)
    v.add_argument("--types", help="comma-separated types, e.g. A4,B3,D4")

    i = sub.add_parser("inspect", parents=[common], help="details for one object")
    i.add_argument("what", choices=["perm", "eta"])
    i.add_argument("value", nargs="?", default="")
    i.add_argument("--S", default="")
    i.add_argument("--T", default="")
    i.add_argument("--n", type=int)
    return ap


def config_from_args(args) -> RunConfig:
    if args.weak_order_cap <= 0 or args.arc_cap <= 0:
        raise ParseError("caps must be positive")
    cap = args.weak_order_cap
    if args.extended and cap == cox.WEAK_ORDER_CAP:
        print("warning: --extended runs take several minutes", file=sys.stderr)
    families = args.family.upper().split(",") if args.family else None
    cfg = RunConfig(
        command=args.command,
        families=families,
        rank=args.rank,
        m=args.m,
        coxeter=args.coxeter,
        weak_order_cap=cap,
        arc_cap=args.arc_cap,
        cache_dir=args.cache_dir,
        fmt=args.format,
        extended=args.extended,
        verbose=args.verbose,
    )
    if args.command == "tables":
        cfg.with_bisortable = args.with_bisortable
    if args.command == "verify":
        cfg.only = args.only.split(",") if args.only else None
        cfg.identity = args.identity
        cfg.max_rank = args.max_rank
        cfg.types = args.types.split(",") if args.types else None
    select_types(cfg)  # reject unknown selectors before doing any work
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "tables":
            return cmd_tables(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        return cmd_inspect(args, cfg)
    except BicatError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
