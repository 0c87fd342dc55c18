"""Generate-and-test: parse every permutation of the bag with a CKY parser.

Slow by construction; it is the reference the other generators are checked
against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .grammar import (
    Bag, Category, Dir, Functor, category_vars, format_category, number_nodes, rename_category, unify_category,
)
from .terms import BindStore, Var, unify

DEFAULT_CAP = 8


class BagTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Item:
    category: Category
    bindings: dict
    root: int | None
    slots: tuple
    links: frozenset  # (root, slot) pairs used so far


def _merge(base: BindStore, left: Item, right: Item) -> BindStore | None:
    s = base.child(left.bindings)
    for vid, t in right.bindings.items():
        if not unify(Var(vid), t, s):
            return None
    return s


def _apply(f: Item, a: Item, s: BindStore) -> Item | None:
    cat = f.category
    if not unify_category(cat.arg, a.category, s):
        return None
    links = f.links | a.links
    if a.root is not None and f.slots and not a.slots:
        links = links | {(a.root, f.slots[0])}
    return Item(cat.result, dict(s.bindings), f.root, f.slots[1:], links)


def _combine(left: Item, right: Item, rules, base: BindStore) -> list[Item]:
    out = []
    lc, rc = left.category, right.category
    if isinstance(lc, Functor) and lc.dir is Dir.RIGHT:
        s = _merge(base, left, right)
        if s is not None and (it := _apply(left, right, s)):
            out.append(it)
    if isinstance(rc, Functor) and rc.dir is Dir.LEFT:
        s = _merge(base, left, right)
        if s is not None and (it := _apply(right, left, s)):
            out.append(it)
    for rule in rules:
        for first, second in ((left, right), (right, left)):
            s = _merge(base, left, right)
            if s is None:
                break
            m: dict = {}
            parent = rename_category(rule.parent, s, m)
            if (unify_category(rename_category(rule.left, s, m), first.category, s)
                    and unify_category(rename_category(rule.right, s, m), second.category, s)):
                out.append(Item(parent, dict(s.bindings), None, (), left.links | right.links))
    return out


def _chart(bag: Bag, order, rules) -> list[Item]:
    base = bag.store
    _, layout = number_nodes(bag)
    n = len(order)
    chart: dict[tuple, list[Item]] = {}
    start = dict(base.bindings)
    for pos, i in enumerate(order):
        chart[pos, pos + 1] = [
            Item(cat, start, *layout[i][r], frozenset())
            for r, cat in enumerate(bag.items[i].readings)
        ]
    for width in range(2, n + 1):
        for lo in range(n - width + 1):
            hi = lo + width
            cell = []
            for mid in range(lo + 1, hi):
                for left in chart[lo, mid]:
                    for right in chart[mid, hi]:
                        cell.extend(_combine(left, right, rules, base))
            chart[lo, hi] = cell
    return chart.get((0, n), [])


def _accepting(bag: Bag, order, target: Category, rules) -> Iterator[Item]:
    for it in _chart(bag, order, rules):
        s = bag.store.child(it.bindings)
        if unify_category(it.category, target, s):
            links = it.links | {(it.root, 0)} if it.root is not None else it.links
            yield Item(it.category, dict(s.bindings), it.root, it.slots, links)


def ordered_parse(bag: Bag, order, target: Category | None = None, rules=None) -> bool:
    """Does the bag, read in the given item order, parse to ``target``?"""
    if not order:
        return False
    target = target if target is not None else bag.target
    rules = bag.rules if rules is None else rules
    return next(_accepting(bag, order, target, rules), None) is not None


def ordered_derivations(bag: Bag, order, target: Category | None = None, rules=None) -> list[frozenset]:
    """Link sets (root node, slot node) of every derivation of the ordered bag.

    Node ids follow ``grammar.number_nodes``; slot 0 is the target.
    """
    if not order:
        return []
    target = target if target is not None else bag.target
    rules = bag.rules if rules is None else rules
    return [it.links for it in _accepting(bag, order, target, rules)]


def _signatures(bag: Bag, target) -> list[str]:
    """Printed form of each item, with variables private to it canonicalised,
    so interchangeable items are recognised as such."""
    owners: dict[int, set] = {}
    for i, item in enumerate(bag.items):
        for cat in item.readings:
            for v in category_vars(cat):
                owners.setdefault(v.id, set()).add(i)
    if target is not None:
        for v in category_vars(target):
            owners.setdefault(v.id, set()).update((-1, -2))
    sigs = []
    for item in bag.items:
        parts = []
        for cat in item.readings:
            mapping: dict = {}
            for v in category_vars(cat):
                if v.id not in mapping:
                    mapping[v.id] = v if len(owners[v.id]) > 1 else Var(-1 - len(mapping))
            parts.append(format_category(rename_category(cat, BindStore(), mapping)))
        sigs.append(item.word + ":" + "|".join(parts))
    return sigs


def permutations(bag: Bag, target=None) -> Iterator[tuple]:
    """Distinct item orderings in lexicographic order of item indices."""
    sigs = _signatures(bag, target if target is not None else bag.target)
    seen = set()
    for perm in itertools.permutations(range(len(bag.items))):
        key = tuple(sigs[i] for i in perm)
        if key in seen:
            continue
        seen.add(key)
        yield perm


def generate_naive(bag: Bag, target: Category | None = None, rules=None, *,
                   cap: int = DEFAULT_CAP) -> Iterator[str]:
    """Yield each distinct word ordering of the bag that parses to ``target``."""
    if len(bag.items) > cap:
        raise BagTooLarge(f"bag has {len(bag.items)} items; generate-and-test is capped at {cap}")
    target = target if target is not None else bag.target
    yielded = set()
    for perm in permutations(bag, target):
        phrase = " ".join(bag.items[i].word for i in perm)
        if phrase in yielded:
            continue
        if ordered_parse(bag, perm, target, rules):
            yielded.add(phrase)
            yield phrase
