"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import random

from shake_bake.grammar import Basic, Functor, Polarity, number_nodes
from shake_bake.terms import Atom, Compound, Cons, EmptyList, Var


# -- unification: functional Robinson algorithm over explicit substitutions --

def _walk(t, sub):
    while isinstance(t, Var) and t.id in sub:
        t = sub[t.id]
    return t


def _occurs(v, t, sub):
    t = _walk(t, sub)
    if isinstance(t, Var):
        return t.id == v.id
    if isinstance(t, Compound):
        return any(_occurs(v, a, sub) for a in t.args)
    if isinstance(t, Cons):
        return _occurs(v, t.head, sub) or _occurs(v, t.tail, sub)
    return False


def mgu(t1, t2, sub=None):
    """Most general unifier as a dict, or None. Never mutates its input."""
    sub = dict(sub or {})
    a, b = _walk(t1, sub), _walk(t2, sub)
    if isinstance(a, Var) and isinstance(b, Var) and a.id == b.id:
        return sub
    if isinstance(a, Var):
        return None if _occurs(a, b, sub) else {**sub, a.id: b}
    if isinstance(b, Var):
        return None if _occurs(b, a, sub) else {**sub, b.id: a}
    if isinstance(a, Atom) and isinstance(b, Atom):
        return sub if (type(a.name), a.name) == (type(b.name), b.name) else None
    if isinstance(a, EmptyList) and isinstance(b, EmptyList):
        return sub
    if isinstance(a, Cons) and isinstance(b, Cons):
        sub = mgu(a.head, b.head, sub)
        return None if sub is None else mgu(a.tail, b.tail, sub)
    if isinstance(a, Compound) and isinstance(b, Compound):
        if a.functor != b.functor or len(a.args) != len(b.args):
            return None
        for x, y in zip(a.args, b.args):
            sub = mgu(x, y, sub)
            if sub is None:
                return None
        return sub
    return None


def apply(t, sub):
    t = _walk(t, sub)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(apply(a, sub) for a in t.args))
    if isinstance(t, Cons):
        return Cons(apply(t.head, sub), apply(t.tail, sub))
    return t


def random_term(rng: random.Random, depth: int, var_ids=(1, 2, 3)):
    """Terms of depth <= ``depth`` over a tiny signature."""
    choices = ["var", "atom", "int", "nil"]
    if depth > 0:
        choices += ["f", "g", "cons", "cons"]
    kind = rng.choice(choices)
    if kind == "var":
        return Var(rng.choice(var_ids))
    if kind == "atom":
        return Atom(rng.choice("ab"))
    if kind == "int":
        return Atom(rng.choice((0, 1)))
    if kind == "nil":
        return EmptyList()
    if kind == "f":
        return Compound("f", (random_term(rng, depth - 1, var_ids),))
    if kind == "g":
        return Compound("g", (random_term(rng, depth - 1, var_ids), random_term(rng, depth - 1, var_ids)))
    return Cons(random_term(rng, depth - 1, var_ids), random_term(rng, depth - 1, var_ids))


# -- categories without a binding store ------------------------------------------

def cat_mgu(c1, c2, sub):
    if isinstance(c1, Basic):
        if not isinstance(c2, Basic) or c1.name != c2.name or len(c1.features) != len(c2.features):
            return None
        for a, b in zip(c1.features, c2.features):
            sub = mgu(a, b, sub)
            if sub is None:
                return None
        return sub
    if not isinstance(c2, Functor) or c1.dir != c2.dir:
        return None
    sub = cat_mgu(c1.arg, c2.arg, sub)
    return None if sub is None else cat_mgu(c1.result, c2.result, sub)


# -- constraint graph oracles ----------------------------------------------------

def graph_nodes(bag, target):
    """(node_id -> (category, item, level, polarity)) for a single-reading bag."""
    nodes, _ = number_nodes(bag)
    table = {0: (target, -1, 1, Polarity.SLOT)}
    for n in nodes:
        table[n.node_id] = (n.category, n.item, n.level, n.polarity)
    return table


def candidate_links(bag, target, rigid=frozenset()):
    """Every (root, slot) pair passing the level, item and unifiability tests."""
    table = graph_nodes(bag, target)
    out = set()
    for r, (rc, ri, rl, rp) in table.items():
        if rp is not Polarity.ROOT:
            continue
        for s, (sc, si, sl, sp) in table.items():
            if sp is Polarity.SLOT and abs(rl - sl) == 1 and ri != si:
                if _joint({}, rc, sc, rigid) is not None:
                    out.add((r, s))
    return out


def _joint(sub, c1, c2, rigid):
    sub = cat_mgu(c1, c2, sub)
    if sub is None:
        return None
    # rigid variables stand for distinct constants
    for vid in rigid:
        val = apply(Var(vid), sub)
        if not isinstance(val, Var) or (val.id != vid and val.id in rigid):
            return None
    return sub


def perfect_matchings(bag, target, links, rigid=frozenset()):
    """All assignments of one slot per root (and vice versa) drawn from
    ``links`` whose categories unify jointly."""
    table = graph_nodes(bag, target)
    roots = sorted(r for r, v in table.items() if v[3] is Polarity.ROOT)
    slots = {s for s, v in table.items() if v[3] is Polarity.SLOT}
    if len(roots) != len(slots):
        return []
    out = []

    def go(i, used, sub, chosen):
        if i == len(roots):
            out.append(frozenset(chosen))
            return
        r = roots[i]
        for s in sorted(slots - used):
            if (r, s) not in links:
                continue
            sub2 = _joint(sub, table[r][0], table[s][0], rigid)
            if sub2 is not None:
                go(i + 1, used | {s}, sub2, chosen + [(r, s)])

    go(0, frozenset(), {}, [])
    return out


def reference_propagate(graph, rng: random.Random):
    """Singleton/exclusivity/unifiability filtering, one forced link at a time
    in random order. Works on copies; returns (ok, committed, links)."""
    from shake_bake.grammar import unifiable, unify_category

    store = graph.store.child(dict(graph.store.bindings))
    links = set(graph.links)
    committed = set(graph.committed)
    cat = {n.node_id: n.category for n in graph.nodes}
    ids = [n.node_id for n in graph.nodes]
    while True:
        inc = {i: {l for l in links if i in l} for i in ids}
        if any(not v for v in inc.values()):
            return False, committed, links
        forced = sorted({next(iter(v)) for v in inc.values() if len(v) == 1} - committed)
        if not forced:
            return True, committed, links
        link = rng.choice(forced)
        r, s = link
        if any(l in committed for l in links if l != link and (l[0] == r or l[1] == s)):
            return False, committed, links
        if not unify_category(cat[r], cat[s], store):
            return False, committed, links
        committed.add(link)
        links = {l for l in links if l == link or (l[0] != r and l[1] != s)}
        links = {l for l in links if l in committed or unifiable(cat[l[0]], cat[l[1]], store)}

