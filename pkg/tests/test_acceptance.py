"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` to see just the report.
"""

import itertools
import random
import time

import pytest

from shake_bake import naive, tdm
from shake_bake.cli import bench_row, data_path, read_suite
from shake_bake.congraph import build_graph
from shake_bake.grammar import format_category
from shake_bake.naive import generate_naive, ordered_derivations
from shake_bake.sbgen import generate_cp
from shake_bake.terms import BindStore, resolve, unify, variant
from shake_bake.whitelock import generate
from conftest import FIXTURE_WORDS, anon, random_phrase_words
from oracles import apply, mgu, random_term

NODE_TABLE = [
    (0, "np", "", 1), (1, "np", "the", 0), (2, "n(_)", "the", 1),
    (3, "n([])", "fierce", 0), (4, "n([1|_])", "fierce", 1),
    (5, "n([1])", "little", 0), (6, "n([1,1|_])", "little", 1),
    (7, "n([1,1])", "brown", 0), (8, "n([1,1,1|_])", "brown", 1),
    (9, "n(_)", "cat", 0),
]


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def bench(lex):
    rows = read_suite(data_path("fig8.suite"))
    return [(bench_row(r, lex, "whitelock"), bench_row(r, lex, "cp")) for r in rows]


def test_criterion_1_node_table(make_bag, report):
    g = build_graph(make_bag("the fierce little brown cat"))
    table = [(n.node_id, anon(format_category(n.category)), n.word, n.level) for n in g.nodes]
    report(1, table == NODE_TABLE, f"{len(table)} nodes, table {'matches' if table == NODE_TABLE else table}")


def test_criterion_2_propagation_trace(make_bag, report):
    g = build_graph(make_bag("the fierce little brown cat"))
    t0 = time.perf_counter()
    ok = g.propagate()
    ms = (time.perf_counter() - t0) * 1000
    final = {(1, 0), (3, 2), (5, 4), (7, 6), (9, 8)}
    step = next((s for s in g.trace if s.link == (9, 8)), None)
    precluded = set(step.precluded) if step else None
    good = ok and g.committed == final and g.links == final and precluded == {(9, 6), (9, 4), (9, 2)} and ms < 10
    report(2, good, f"committed={sorted(g.committed)} after 9->8 deleted={sorted(precluded or ())} {ms:.2f}ms")


def test_criterion_3_adjective_chains(bench, report):
    wl = [w["reductions"] for w, _ in bench[:4]]
    cp = [c["reductions"] for _, c in bench[:4]]
    report(3, wl == [1, 3, 7, 15] and cp == [1, 2, 3, 4], f"whitelock={wl} cp={cp}")


def test_criterion_4_dominance(bench, report):
    wl = [w["reductions"] for w, _ in bench]
    cp = [c["reductions"] for _, c in bench]
    solved = all(w["first_solution"] not in ("-", "timeout") and c["first_solution"] == w["first_solution"]
                 for w, c in bench)
    ratios = [w / c for w, c in zip(wl[6:11], cp[6:11])]
    grows = all(a < b for a, b in zip(ratios[1:], ratios[2:]))
    row11 = max(bench[10][0]["millis"], bench[10][1]["millis"])
    good = (solved and len(bench) == 12 and all(c <= w for c, w in zip(cp, wl))
            and all(r >= 1.4 for r in ratios) and grows and row11 < 5000)
    report(4, good, "ratios rows 7-11 = " + " ".join(f"{r:.2f}" for r in ratios) + f"; row 11 {row11}ms")


def _yields(bag):
    a = set(generate_naive(bag))
    b = {p for p, _ in generate(bag)}
    c = {p for p, _ in generate_cp(bag)}
    return a, b, c


def _fixture_bags(make_bag, repeats=False):
    pick = itertools.combinations_with_replacement if repeats else itertools.combinations
    for k in range(1, 6):
        for words in pick(FIXTURE_WORDS, k):
            for target in ("np", "s"):
                yield make_bag(words, target)


def test_criterion_5_oracle_parity(make_bag, report):
    bad, checked, solved = [], 0, 0
    bags = list(_fixture_bags(make_bag))
    rng = random.Random(2024)
    for _ in range(200):
        if rng.random() < 0.5:
            words, target = random_phrase_words(rng, 6)
        else:
            words, target = rng.choices(FIXTURE_WORDS, k=rng.randint(1, 6)), rng.choice(["np", "s"])
        bags.append(make_bag(words, target))
    for bag in bags:
        a, b, c = _yields(bag)
        checked += 1
        solved += bool(a)
        if not a == b == c:
            bad.append(bag.words)
    report(5, not bad, f"{checked} bags ({solved} solvable), {len(bad)} discrepancies {bad[:3]}")


def test_criterion_6_tdm(report):
    rng = random.Random(3)
    t0 = time.perf_counter()
    bad, yes = [], 0
    for n, count in ((3, 100), (4, 50)):
        for _ in range(count):
            inst = tdm.random_instance(n, rng.randint(n, n * n + n), rng.randrange(10 ** 9))
            expect = tdm.solve_brute(inst)
            yes += expect
            if tdm.solve_engine(inst) != expect:
                bad.append(tdm.format_instance(inst))
    secs = time.perf_counter() - t0
    report(6, not bad and secs < 60, f"150 instances ({yes} solvable), {len(bad)} discrepancies, {secs:.1f}s")


def test_criterion_7_index_safety(mary_bag, report):
    a, b, c = _yields(mary_bag())
    good = a == b == c == {"mary likes frances"}
    report(7, good, f"naive={sorted(a)} whitelock={sorted(b)} cp={sorted(c)}")


def test_criterion_8_unifier(report):
    rng = random.Random(8)
    failures = 0
    for _ in range(10_000):
        s = BindStore(counter=iter(range(100, 10 ** 6)))
        t1, t2 = random_term(rng, 3), random_term(rng, 3)
        m = s.mark()
        expected = mgu(t1, t2)
        ok = unify(t1, t2, s)
        agree = ok == (expected is not None)
        if ok and agree:
            r1 = resolve(t1, s)
            agree = r1 == resolve(t2, s) and variant(r1, apply(t1, expected))
        if not ok:
            agree = agree and not s.trail
        s.undo_to(m)
        if not agree or s.trail or s.bindings:
            failures += 1
    report(8, failures == 0, f"10000 round-trips, {failures} failures")


def test_criterion_9_propagation_soundness(make_bag, report):
    violations, solvable = [], 0
    # words may repeat here: "the cat likes the fox" is a fixture bag too
    for bag in _fixture_bags(make_bag, repeats=True):
        g = build_graph(bag)
        if g is None:
            continue
        used = set()
        for perm in naive.permutations(bag):
            for links in ordered_derivations(bag, perm):
                used |= links
        if not used:
            continue
        solvable += 1
        ok = g.propagate()
        if not ok or not used <= g.links:
            violations.append((bag.words, sorted(used - g.links)))
    report(9, not violations, f"{solvable} solvable bags, {len(violations)} violations {violations[:2]}")
