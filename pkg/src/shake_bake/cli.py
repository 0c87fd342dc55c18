"""Command-line front end: generation, the reduction-count benchmark, and 3DM tools."""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

from . import naive, tdm
from .congraph import UnsupportedGraph, build_graph
from .grammar import (
    GrammarSyntaxError, UnknownWordError, bag_from_words, format_category, load_bag_file,
    load_lexicon, load_lexicon_file, parse_category,
)
from .sbgen import generate_cp
from .whitelock import FARTHEST, FORWARD, NEAREST, REVERSE, SearchStats, SearchTimeout, generate

log = logging.getLogger("shake_bake")

DEFAULT_TARGET = "s"
BENCH_COLUMNS = ("id", "length", "algo", "reductions", "shifts", "links_deleted", "millis", "first_solution")


class UsageError(Exception):
    pass


def default_lexicon():
    text = resources.files("shake_bake").joinpath("data/figures.lex").read_text(encoding="utf-8")
    return load_lexicon(text)


def data_path(name: str) -> Path:
    return Path(str(resources.files("shake_bake").joinpath("data", name)))


def _lexicon(path):
    return load_lexicon_file(path) if path else default_lexicon()


def run_algo(algo: str, bag, target, *, stats=None, scan=NEAREST, shift_order=REVERSE,
             timeout=None, cap=naive.DEFAULT_CAP):
    """Stream ``(phrase, stats)`` from the named algorithm; naive has no stats."""
    if algo == "naive":
        return ((p, None) for p in naive.generate_naive(bag, target, cap=cap))
    kw = dict(scan=scan, shift_order=shift_order, timeout=timeout, stats=stats)
    if algo == "whitelock":
        return generate(bag, target, **kw)
    if algo == "cp":
        return generate_cp(bag, target, **kw)
    raise UsageError(f"unknown algorithm {algo!r}")


def _first(stream):
    try:
        for phrase, stats in stream:
            return phrase, stats
    finally:
        stream.close()
    return None, None


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args, out=sys.stdout, err=sys.stderr) -> int:
    lex = _lexicon(args.lexicon)
    if args.bag:
        bag = load_bag_file(args.bag, lex)
    elif args.words is not None:
        bag = bag_from_words(args.words.split(), lex)
    else:
        raise UsageError("one of --words or --bag is required")
    if args.target:
        bag.target = parse_category(args.target, bag.store)
    elif bag.target is None:
        bag.target = parse_category(DEFAULT_TARGET, bag.store)

    if args.dump_graph:
        _dump_graph(bag, err)

    stats = SearchStats()
    stream = run_algo(args.algo, bag, bag.target, stats=stats, scan=args.scan,
                      shift_order=args.shift_order, cap=args.cap)
    found = 0
    seen = set()
    final = stats
    try:
        for phrase, snap in stream:
            if phrase in seen:
                continue
            seen.add(phrase)
            found += 1
            print(phrase, file=out)
            if snap is not None:
                final = snap
            if not args.all:
                break
    finally:
        stream.close()
    if args.stats:
        if args.all or not found:
            final = stats
        print(final.summary(), file=err)
    return 0 if found else 1


def _dump_graph(bag, err) -> None:
    try:
        g = build_graph(bag, bag.target)
    except UnsupportedGraph as exc:
        print(f"% no constraint graph: {exc}", file=err)
        return
    if g is None:
        print("% no constraint graph: root and slot counts differ", file=err)
        return
    m = g.mark()
    ok = g.propagate()
    for line in g.dump():
        print(line, file=err)
    if not ok:
        print("% propagation found a contradiction", file=err)
    g.undo(m)


# ---------------------------------------------------------------------------
# bench


def read_suite(path) -> list[tuple]:
    rows = []
    for ln in Path(path).read_text(encoding="utf-8").splitlines():
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        parts = ln.split("\t")
        if len(parts) != 3:
            raise UsageError(f"bad suite line {ln!r}: expected id<TAB>target<TAB>words")
        rows.append(tuple(p.strip() for p in parts))
    return rows


def bench_row(row, lex, algo: str, *, timeout=60.0, scan=NEAREST, shift_order=REVERSE) -> dict:
    rid, target, words = row
    bag = bag_from_words(words.split(), lex, target)
    stats = SearchStats()
    stream = run_algo(algo, bag, bag.target, stats=stats, scan=scan, shift_order=shift_order, timeout=timeout)
    phrase = "-"
    try:
        found, snap = _first(stream)
        if found is not None:
            phrase, stats = found, snap
    except SearchTimeout:
        phrase = "timeout"
    return {
        "id": rid, "length": len(words.split()), "algo": algo,
        "reductions": stats.reductions, "shifts": stats.shifts,
        "links_deleted": stats.links_deleted, "millis": int(round(stats.wall_millis)),
        "first_solution": phrase,
    }


def cmd_bench(args, out=sys.stdout, err=sys.stderr) -> int:
    lex = _lexicon(args.lexicon)
    rows = read_suite(args.suite)
    print("\t".join(BENCH_COLUMNS), file=out)
    for row in rows:
        results = [bench_row(row, lex, algo, timeout=args.timeout, scan=args.scan, shift_order=args.shift_order)
                   for algo in ("whitelock", "cp")]
        for r in results:
            print("\t".join(str(r[c]) for c in BENCH_COLUMNS), file=out)
        w, c = results
        ok = "timeout" not in (w["first_solution"], c["first_solution"]) and c["reductions"] > 0
        ratio = f"{w['reductions'] / c['reductions']:.2f}" if ok else "-"
        print("\t".join([row[0], str(w["length"]), "ratio", ratio, "-", "-", "-", "-"]), file=out)
    return 0


# ---------------------------------------------------------------------------
# tdm


def cmd_tdm(args, out=sys.stdout, err=sys.stderr) -> int:
    if args.tdm_cmd == "gen":
        inst = tdm.random_instance(args.n, args.m, args.seed)
        text = tdm.format_instance(inst)
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            out.write(text)
        return 0
    inst = tdm.parse_instance(Path(args.instance).read_text(encoding="utf-8"))
    if args.tdm_cmd == "encode":
        lex, rules, bag, target = tdm.encode(inst)
        lines = [f"% encoding of a {inst.n}-element three-dimensional matching instance"]
        lines += [f"word {w} : {format_category(cats[0])}." for w, cats in lex.entries.items()]
        lines += [f"rule {r}." for r in rules]
        lex_text = "\n".join(lines) + "\n"
        bag_lines = [f"word {w}." for w in bag.words] + [f"target {format_category(target)}."]
        if args.prefix:
            prefix = Path(args.prefix)
            lex_path = prefix.with_suffix(".lex")
            lex_path.write_text(lex_text, encoding="utf-8")
            prefix.with_suffix(".bag").write_text(
                "\n".join([f"use {lex_path.name}."] + bag_lines) + "\n", encoding="utf-8")
        else:
            out.write(lex_text)
            out.write("% bag: " + " ".join(bag.words) + f" / target {format_category(target)}\n")
        return 0
    # check
    brute = tdm.solve_brute(inst)
    engine = tdm.solve_engine(inst, timeout=args.timeout)
    yn = {True: "yes", False: "no"}
    agree = brute == engine
    print(f"brute={yn[brute]}\tengine={yn[engine]}\t{'agree' if agree else 'DISAGREE'}", file=out)
    return 0 if agree else 1


# ---------------------------------------------------------------------------


def _search_flags(p):
    p.add_argument("--scan", choices=(NEAREST, FARTHEST), default=NEAREST,
                   help="which stack element is paired with the top first")
    p.add_argument("--shift-order", choices=(FORWARD, REVERSE), default=REVERSE,
                   help="shift bag items in listed order or last-listed first")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shake-bake", description="Generation from bags of categorial signs.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="order a bag of words")
    g.add_argument("--lexicon", help="grammar file (default: the bundled figures.lex)")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--words", help="space-separated words looked up in the lexicon")
    src.add_argument("--bag", help="bag file")
    g.add_argument("--target", help=f"target category (default: bag file's, else {DEFAULT_TARGET})")
    g.add_argument("--algo", choices=("naive", "whitelock", "cp"), default="cp")
    g.add_argument("--all", action="store_true", help="print every ordering, not just the first")
    g.add_argument("--stats", action="store_true", help="print search counters to stderr")
    g.add_argument("--dump-graph", action="store_true", help="print the constraint graph to stderr")
    g.add_argument("--cap", type=int, default=naive.DEFAULT_CAP, help="largest bag the naive algorithm accepts")
    _search_flags(g)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="compare reduction counts over a suite")
    b.add_argument("suite", nargs="?", default=None, help="suite file (default: the bundled fig8.suite)")
    b.add_argument("--lexicon")
    b.add_argument("--timeout", type=float, default=60.0, help="seconds per row and algorithm")
    _search_flags(b)
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("tdm", help="three-dimensional matching instances")
    tsub = t.add_subparsers(dest="tdm_cmd", required=True)
    tg = tsub.add_parser("gen")
    tg.add_argument("n", type=int)
    tg.add_argument("m", type=int)
    tg.add_argument("seed", type=int)
    tg.add_argument("-o", "--output")
    te = tsub.add_parser("encode")
    te.add_argument("instance")
    te.add_argument("--prefix", help="write PREFIX.lex and PREFIX.bag instead of printing")
    tc = tsub.add_parser("check")
    tc.add_argument("instance")
    tc.add_argument("--timeout", type=float, default=None)
    t.set_defaults(func=cmd_tdm)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=err)
    if args.cmd == "bench" and args.suite is None:
        args.suite = data_path("fig8.suite")
    try:
        return args.func(args, out, err)
    except (OSError, GrammarSyntaxError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    except UnknownWordError as exc:
        print(f"error: unknown word {exc.args[0]!r}", file=err)
        return 2


if __name__ == "__main__":
    sys.exit(main())
