"""Three-dimensional matching instances and their encoding as bag generation.

Each admissible triple (a_i, b_j, c_k) becomes a production x -> a_i b_j c_k,
binarised through a fresh symbol per triple, and x -> x x glues the chosen
triples together. The bag holds every element once and the target is x, so
a derivation exists iff the triples can cover every element exactly once.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .grammar import Bag, BagItem, Basic, Lexicon, Rule
from .terms import BindStore

BRUTE_CAP = 8


@dataclass(frozen=True)
class TdmInstance:
    n: int
    triples: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        for t in self.triples:
            if len(t) != 3 or not all(1 <= v <= self.n for v in t):
                raise ValueError(f"triple {t} out of range 1..{self.n}")
        if len(set(self.triples)) != len(self.triples):
            raise ValueError("duplicate triples")


def parse_instance(text: str) -> TdmInstance:
    """Instance file: ``n`` on the first line, then one ``i j k`` per line."""
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty instance file")
    n = int(lines[0])
    triples = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ValueError(f"bad triple line {ln!r}")
        triples.append(tuple(int(p) for p in parts))
    return TdmInstance(n, tuple(triples))


def format_instance(inst: TdmInstance) -> str:
    return "\n".join([str(inst.n)] + [f"{i} {j} {k}" for i, j, k in inst.triples]) + "\n"


def random_instance(n: int, m: int, seed: int) -> TdmInstance:
    if n < 1 or not 0 <= m <= n ** 3:
        raise ValueError(f"need 0 <= m <= n^3 = {n ** 3} and n >= 1, got n={n}, m={m}")
    rng = random.Random(seed)
    every = list(itertools.product(range(1, n + 1), repeat=3))
    return TdmInstance(n, tuple(sorted(rng.sample(every, m))))


def encode(inst: TdmInstance, store: BindStore | None = None):
    """Return ``(lexicon, rules, bag, target)`` for the instance."""
    store = store if store is not None else BindStore()
    lex = Lexicon(store=store)
    words = [f"{d}{i}" for d in "abc" for i in range(1, inst.n + 1)]
    for w in words:
        lex.add(w, Basic(w))
    x = Basic("x")
    for t, (i, j, k) in enumerate(inst.triples, 1):
        pair = Basic(f"p{t}")
        lex.rules.append(Rule(x, Basic(f"a{i}"), pair))
        lex.rules.append(Rule(pair, Basic(f"b{j}"), Basic(f"c{k}")))
    lex.rules.append(Rule(x, x, x))
    bag = Bag([BagItem(w, (Basic(w),)) for w in words], store, x, list(lex.rules))
    return lex, lex.rules, bag, x


def solve_brute(inst: TdmInstance, cap: int = BRUTE_CAP) -> bool:
    """Exact answer by depth-first choice of disjoint triples.

    Always extends the matching by covering the lowest uncovered a-element.
    """
    if inst.n > cap:
        raise ValueError(f"brute force is capped at n={cap}")
    by_a: dict[int, list] = {}
    for i, j, k in inst.triples:
        by_a.setdefault(i, []).append((j, k))

    def search(i: int, used_b: frozenset, used_c: frozenset) -> bool:
        if i > inst.n:
            return True
        for j, k in by_a.get(i, ()):
            if j not in used_b and k not in used_c:
                if search(i + 1, used_b | {j}, used_c | {k}):
                    return True
        return False

    return search(1, frozenset(), frozenset())


def solve_engine(inst: TdmInstance, *, timeout: float | None = None) -> bool:
    """Answer the instance by running shift-reduce generation on its encoding."""
    from .whitelock import first_solution
    _, _, bag, target = encode(inst)
    phrase, _ = first_solution(bag, target, timeout=timeout)
    return phrase is not None
