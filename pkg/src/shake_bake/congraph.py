"""Constraint graph over basic signs, with Waltz-style filtering.

Nodes are the basic categories of the bag's signs. A root is the level-0
result of an item; a slot is an argument position. Links join a root to a
slot it might fill in a complete derivation. Every node must end up in
exactly one link, so a node with a single surviving link forces it, and a
forced link excludes every other link touching its endpoints.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .grammar import (
    Bag, Basic, BasicSignNode, Category, Polarity, format_category, is_first_order, number_nodes,
    unifiable, unify_category,
)
from .terms import Mark, StaleMarkError

Link = tuple  # (root_id, slot_id)


class UnsupportedGraph(ValueError):
    """The bag contains categories the graph cannot model (higher-order
    arguments, lexical ambiguity, or a non-basic target)."""


@dataclass(frozen=True)
class GraphMark:
    pos: int
    serial: int
    store_mark: Mark


@dataclass
class Step:
    """One forced commitment and the links it rules out."""
    link: Link
    precluded: frozenset
    round: int


@dataclass
class ConGraph:
    nodes: list[BasicSignNode]
    store: object
    links: set = field(default_factory=set)
    committed: set = field(default_factory=set)
    links_deleted: int = 0
    propagation_calls: int = 0
    trace: list = field(default_factory=list)
    _incident: dict = field(default_factory=dict)
    _trail: list = field(default_factory=list)
    _marks: list = field(default_factory=list)
    _serials: itertools.count = field(default_factory=itertools.count)

    def node(self, nid: int) -> BasicSignNode:
        return self.nodes[nid]

    def incident(self, nid: int) -> set:
        return self._incident[nid]

    # -- reversible primitives ---------------------------------------------

    def _add(self, link: Link) -> None:
        self.links.add(link)
        self._incident[link[0]].add(link)
        self._incident[link[1]].add(link)

    def _delete(self, link: Link) -> None:
        self.links.discard(link)
        self._incident[link[0]].discard(link)
        self._incident[link[1]].discard(link)
        self._trail.append(("del", link))
        self.links_deleted += 1

    def _commit(self, link: Link) -> None:
        self.committed.add(link)
        self._trail.append(("commit", link))

    def mark(self) -> GraphMark:
        m = GraphMark(len(self._trail), next(self._serials), self.store.mark())
        self._marks.append(m)
        return m

    def undo(self, m: GraphMark) -> None:
        marks = self._marks
        while marks and marks[-1].serial > m.serial:
            marks.pop()
        if not marks or marks[-1] != m:
            raise StaleMarkError(f"graph mark {m} is not live")
        while len(self._trail) > m.pos:
            kind, link = self._trail.pop()
            if kind == "del":
                self._add(link)
            else:
                self.committed.discard(link)
        self.store.undo_to(m.store_mark)

    # -- propagation ---------------------------------------------------------

    def _commit_and_exclude(self, link: Link) -> bool:
        r, sl = link
        if not unify_category(self.nodes[r].category, self.nodes[sl].category, self.store):
            return False
        self._commit(link)
        return True

    def _exclusions(self, link: Link) -> set:
        r, sl = link
        return (self._incident[r] | self._incident[sl]) - {link}

    def _reprobe(self) -> None:
        for link in sorted(self.links - self.committed):
            r, sl = link
            if not unifiable(self.nodes[r].category, self.nodes[sl].category, self.store):
                self._delete(link)

    def propagate(self) -> bool:
        """Run the filtering rules to a fixpoint; False on contradiction.

        Rounds are synchronous: every link forced by the link set at the start
        of a round is committed together, then everything they exclude goes.
        """
        self.propagation_calls += 1
        rnd = 0
        while True:
            forced = set()
            for nid in range(len(self.nodes)):
                inc = self._incident[nid]
                if not inc:
                    return False
                if len(inc) == 1:
                    (link,) = inc
                    if link not in self.committed:
                        forced.add(link)
            if not forced:
                return True
            rnd += 1
            doomed = set()
            for link in sorted(forced):
                excl = self._exclusions(link)
                if excl & self.committed or excl & forced:
                    return False
                if not self._commit_and_exclude(link):
                    return False
                self.trace.append(Step(link, frozenset(excl), rnd))
                doomed |= excl
            for link in sorted(doomed):
                if link in self.links:
                    self._delete(link)
            self._reprobe()

    def commit_link(self, root: int, slot: int) -> bool:
        """Commit one root/slot pairing chosen by the search, then propagate."""
        link = (root, slot)
        if link in self.committed:
            return True
        if link not in self.links:
            return False
        excl = self._exclusions(link)
        if excl & self.committed:
            return False
        if not self._commit_and_exclude(link):
            return False
        self.trace.append(Step(link, frozenset(excl), 0))
        for other in sorted(excl):
            self._delete(other)
        self._reprobe()
        return self.propagate()

    # -- diagnostics ---------------------------------------------------------

    def dump(self) -> list[str]:
        """Node table (categories as built) and surviving links, tab-separated."""
        lines = []
        for n in self.nodes:
            word = n.word if n.item >= 0 else "<dummy>"
            lines.append(f"node\t{n.node_id}\t{format_category(n.category)}\t{word}\t{n.level}")
        for r, sl in sorted(self.links):
            state = "committed" if (r, sl) in self.committed else "candidate"
            lines.append(f"link\t{r}\t{sl}\t{state}")
        return lines


def check_supported(bag: Bag, target: Category) -> None:
    if not isinstance(target, Basic):
        raise UnsupportedGraph("target category is not basic")
    for item in bag.items:
        if len(item.readings) != 1:
            raise UnsupportedGraph(f"{item.word!r} is lexically ambiguous")
        if not is_first_order(item.readings[0]):
            raise UnsupportedGraph(f"{item.word!r} has a higher-order category")


def build_graph(bag: Bag, target: Category | None = None) -> ConGraph | None:
    """Build the candidate-link graph for a bag, or None when the arity
    count already rules the bag out.

    Raises UnsupportedGraph for bags outside pure first-order application.
    """
    target = target if target is not None else bag.target
    check_supported(bag, target)
    items, _ = number_nodes(bag)
    dummy = BasicSignNode(0, target, -1, "", 1, Polarity.SLOT)
    nodes = [dummy] + items
    g = ConGraph(nodes, bag.store)
    g._incident = {n.node_id: set() for n in nodes}
    roots = [n for n in nodes if n.polarity is Polarity.ROOT]
    slots = [n for n in nodes if n.polarity is Polarity.SLOT]
    if len(roots) != len(slots):
        return None
    for r in roots:
        for sl in slots:
            if abs(r.level - sl.level) != 1 or r.item == sl.item:
                continue
            if unifiable(r.category, sl.category, bag.store):
                g._add((r.node_id, sl.node_id))
    return g
