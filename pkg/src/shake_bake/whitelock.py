"""Shift-reduce generation from a bag of signs.

A reduce step combines the top of the stack with an element taken from
anywhere below it, which is what lets an ordinary shift-reduce parser treat
its input as an unordered bag. The search is a plain depth-first backtracker.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Iterator, Optional

from .grammar import (
    Bag, Basic, Category, Dir, Functor, Rule, number_nodes, rename_category, unify_category,
)
from .terms import BindStore

NEAREST = "nearest"
FARTHEST = "farthest"
FORWARD = "forward"
REVERSE = "reverse"


class SearchTimeout(Exception):
    pass


@dataclass(frozen=True)
class Sign:
    category: Category
    phrase: tuple
    root: Optional[int] = None
    slots: tuple = ()


@dataclass
class SearchStats:
    reductions: int = 0
    shifts: int = 0
    reduce_attempts: int = 0
    links_deleted: int = 0
    propagation_calls: int = 0
    wall_millis: float = 0.0
    fallback: bool = False

    def snapshot(self) -> "SearchStats":
        return replace(self)

    def summary(self) -> str:
        return (f"reductions={self.reductions} shifts={self.shifts} "
                f"links_deleted={self.links_deleted} millis={int(round(self.wall_millis))}")


def combine(f: Sign, a: Sign, rules, s: BindStore) -> Iterator[Sign]:
    """Ways of combining ``f`` with ``a``, with ``f`` tried as the functor.

    Each result is yielded with its bindings in force; they are undone before
    the next alternative is tried and when the generator finishes.
    """
    cat = f.category
    if isinstance(cat, Functor):
        start = len(s.trail)
        if unify_category(cat.arg, a.category, s):
            phrase = f.phrase + a.phrase if cat.dir is Dir.RIGHT else a.phrase + f.phrase
            yield Sign(cat.result, phrase, f.root, f.slots[1:])
            s._unwind(start)
    yield from apply_rules(f, a, rules, s)


def apply_rules(first: Sign, second: Sign, rules, s: BindStore) -> Iterator[Sign]:
    """Binary productions with ``first`` matched against the left child."""
    for rule in rules:
        if not (_may_match(rule.left, first.category) and _may_match(rule.right, second.category)):
            continue
        parent, left, right = _fresh_rule(rule, s)
        start = len(s.trail)
        if unify_category(left, first.category, s) and unify_category(right, second.category, s):
            yield Sign(parent, first.phrase + second.phrase)
        s._unwind(start)


def _may_match(pattern: Basic, cat: Category) -> bool:
    return isinstance(cat, Basic) and cat.name == pattern.name and len(cat.features) == len(pattern.features)


def _fresh_rule(rule: Rule, s: BindStore):
    m: dict = {}
    return (rename_category(rule.parent, s, m), rename_category(rule.left, s, m),
            rename_category(rule.right, s, m))


class ShiftReduce:
    """One generation run: owns the bag's store bindings and the statistics.

    The search tries, at every state: termination, then shift, then reduce.
    ``scan`` fixes which stack element is paired with the top first:
    ``"nearest"`` walks the tail from just below the top downwards,
    ``"farthest"`` from the bottom of the stack upwards. ``shift_order``
    says whether items are shifted in listed order or last-listed first.
    """

    def __init__(self, bag: Bag, target: Category | None = None, rules=None, *,
                 scan: str = NEAREST, shift_order: str = REVERSE, timeout: float | None = None,
                 stats: SearchStats | None = None):
        if scan not in (NEAREST, FARTHEST):
            raise ValueError(f"unknown scan order {scan!r}")
        if shift_order not in (FORWARD, REVERSE):
            raise ValueError(f"unknown shift order {shift_order!r}")
        self.bag = bag
        self.store = bag.store
        self.target = target if target is not None else bag.target
        if self.target is None:
            raise ValueError("no target category")
        self.rules = list(bag.rules if rules is None else rules)
        self.scan = scan
        self.order = list(range(len(bag.items)))
        if shift_order == REVERSE:
            self.order.reverse()
        self.stats = stats if stats is not None else SearchStats()
        self.timeout = timeout
        _, self.layout = number_nodes(bag)
        self._t0 = 0.0
        self._ticks = 0

    # hooks overridden by the constraint-propagating generator
    def _guard(self, functor: Sign, arg: Sign) -> bool:
        return True

    def _release(self) -> None:
        pass

    def _accept_guard(self, sign: Sign) -> bool:
        return True

    def run(self) -> Iterator[tuple]:
        """Yield ``(phrase, stats snapshot)`` for every solution found."""
        if not self.bag.items:
            return
        self._t0 = time.perf_counter()
        m = self.store.mark()
        try:
            yield from self._search((), 0)
        finally:
            self.store.undo_to(m)
            self.stats.wall_millis = (time.perf_counter() - self._t0) * 1000

    def _tick(self) -> None:
        self._ticks += 1
        if self.timeout is not None and self._ticks % 256 == 0:
            if time.perf_counter() - self._t0 > self.timeout:
                raise SearchTimeout(f"search exceeded {self.timeout}s")

    def _snapshot(self) -> SearchStats:
        self.stats.wall_millis = (time.perf_counter() - self._t0) * 1000
        return self.stats.snapshot()

    def _search(self, stack: tuple, pos: int):
        self._tick()
        items = self.bag.items
        s = self.store
        if pos == len(items) and len(stack) == 1:
            start = len(s.trail)
            if self._accept_guard(stack[0]):
                if unify_category(stack[0].category, self.target, s):
                    yield " ".join(stack[0].phrase), self._snapshot()
                    s._unwind(start)
                self._release()
        if pos < len(items):
            i = self.order[pos]
            item = items[i]
            for r, cat in enumerate(item.readings):
                root, slots = self.layout[i][r]
                self.stats.shifts += 1
                yield from self._search(stack + (Sign(cat, (item.word,), root, slots),), pos + 1)
        if len(stack) >= 2:
            top = stack[-1]
            below = range(len(stack) - 1)
            if self.scan == NEAREST:
                below = reversed(below)
            for idx in below:
                second = stack[idx]
                rest = stack[:idx] + stack[idx + 1:-1]
                for mom in self._reductions(second, top):
                    self.stats.reductions += 1
                    yield from self._search(rest + (mom,), pos)

    def _reductions(self, second: Sign, top: Sign) -> Iterator[Sign]:
        for f, a in ((second, top), (top, second)):
            cat = f.category
            if not isinstance(cat, Functor):
                continue
            self.stats.reduce_attempts += 1
            if not self._guard(f, a):
                continue
            yield from combine(f, a, (), self.store)
            self._release()
        if self.rules:
            for first, other in ((second, top), (top, second)):
                self.stats.reduce_attempts += 1
                yield from apply_rules(first, other, self.rules, self.store)


def generate(bag: Bag, target: Category | None = None, rules=None, **kw) -> Iterator[tuple]:
    """Stream ``(phrase, SearchStats)`` pairs for every derivation found.

    Pass ``stats=`` to watch the live counters, including after exhaustion.
    """
    return ShiftReduce(bag, target, rules, **kw).run()


def first_solution(bag: Bag, target: Category | None = None, rules=None, **kw):
    """``(phrase or None, stats)`` for the first solution of a search."""
    run = ShiftReduce(bag, target, rules, **kw)
    gen = run.run()
    try:
        for phrase, stats in gen:
            return phrase, stats
    finally:
        gen.close()
    return None, run.stats
