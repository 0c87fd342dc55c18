"""Shift-reduce bag generation with constraint propagation after every reduction."""

from __future__ import annotations

import logging
import time
from typing import Iterator

from .congraph import ConGraph, UnsupportedGraph, build_graph
from .grammar import Bag, Category
from .whitelock import NEAREST, REVERSE, SearchStats, ShiftReduce, Sign

log = logging.getLogger(__name__)


class PropagatingShiftReduce(ShiftReduce):
    """Shift-reduce search whose reductions must survive the constraint graph.

    A reduction of functor ``f`` with argument ``a`` is only executed if
    committing the link from ``a``'s root to ``f``'s active slot leaves the
    graph consistent. Graph changes are undone with the enclosing choice
    point.
    """

    def __init__(self, bag: Bag, graph: ConGraph, target: Category | None = None,
                 stats: SearchStats | None = None, **kw):
        super().__init__(bag, target, rules=(), stats=stats, **kw)
        self.graph = graph
        # counters carried over from earlier runs sharing these stats
        self._base = (self.stats.links_deleted - graph.links_deleted,
                      self.stats.propagation_calls - graph.propagation_calls)
        self._open: list = []

    def _try_link(self, root, slot) -> bool:
        m = self.graph.mark()
        if root is not None and slot is not None and self.graph.commit_link(root, slot):
            self._open.append(m)
            return True
        self.graph.undo(m)
        return False

    def _guard(self, functor: Sign, arg: Sign) -> bool:
        if not functor.slots or arg.slots:
            # an argument with open slots is not a basic category
            return False
        return self._try_link(arg.root, functor.slots[0])

    def _accept_guard(self, sign: Sign) -> bool:
        return self._try_link(sign.root, 0)

    def _release(self) -> None:
        self.graph.undo(self._open.pop())

    def _sync(self) -> None:
        self.stats.links_deleted = self._base[0] + self.graph.links_deleted
        self.stats.propagation_calls = self._base[1] + self.graph.propagation_calls

    def _snapshot(self) -> SearchStats:
        self._sync()
        return super()._snapshot()

    def run(self):
        try:
            yield from super().run()
        finally:
            self._sync()


def generate_cp(bag: Bag, target: Category | None = None, *, scan: str = NEAREST, shift_order: str = REVERSE,
                timeout: float | None = None, stats: SearchStats | None = None,
                graphs: list | None = None) -> Iterator[tuple]:
    """Stream ``(phrase, SearchStats)`` for every derivation found.

    Bags the graph cannot model (higher-order arguments, productions,
    non-basic targets) go to the plain shift-reduce search with
    ``stats.fallback`` set. Lexically ambiguous bags are searched one reading
    combination at a time. ``stats``, if given, accumulates the counts;
    ``graphs`` collects each constraint graph built.
    """
    target = target if target is not None else bag.target
    stats = stats if stats is not None else SearchStats()
    if not bag.items:
        return
    t0 = time.perf_counter()
    readings = list(bag.readings())
    try:
        if bag.rules:
            raise UnsupportedGraph("binary productions are outside pure application")
        build_graph(readings[0], target)
    except UnsupportedGraph as exc:
        log.warning("constraint graph unavailable (%s); using plain shift-reduce", exc)
        run = ShiftReduce(bag, target, scan=scan, shift_order=shift_order, timeout=timeout, stats=stats)
        stats.fallback = True
        yield from run.run()
        return

    for sub in readings:
        try:
            graph = build_graph(sub, target)
        except UnsupportedGraph as exc:
            log.warning("skipping reading: %s", exc)
            continue
        if graph is None:
            continue
        if graphs is not None:
            graphs.append(graph)
        m = graph.mark()
        try:
            ok = graph.propagate()
            stats.links_deleted += graph.links_deleted
            stats.propagation_calls += graph.propagation_calls
            if not ok:
                continue
            run = PropagatingShiftReduce(sub, graph, target, stats, scan=scan,
                                          shift_order=shift_order, timeout=timeout)
            for phrase, snap in run.run():
                snap.wall_millis = (time.perf_counter() - t0) * 1000
                yield phrase, snap
        finally:
            graph.undo(m)
    stats.wall_millis = (time.perf_counter() - t0) * 1000


def first_solution_cp(bag: Bag, target: Category | None = None, **kw):
    """``(phrase or None, stats)`` for the first solution of a propagating search."""
    stats = SearchStats()
    gen = generate_cp(bag, target, stats=stats, **kw)
    try:
        for phrase, snap in gen:
            return phrase, snap
    finally:
        gen.close()
    return None, stats
