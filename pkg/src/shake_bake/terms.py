"""First-order terms, a trailed binding store, and unification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True, slots=True)
class Var:
    id: int

    def __str__(self) -> str:
        return f"_G{self.id}"


@dataclass(frozen=True, slots=True)
class Atom:
    name: Union[str, int]

    def __str__(self) -> str:
        return str(self.name)


@dataclass(frozen=True, slots=True)
class Compound:
    functor: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.functor}({','.join(map(str, self.args))})"


@dataclass(frozen=True, slots=True)
class EmptyList:
    def __str__(self) -> str:
        return "[]"


@dataclass(frozen=True, slots=True)
class Cons:
    head: "Term"
    tail: "Term"

    def __str__(self) -> str:
        items = []
        t: Term = self
        while isinstance(t, Cons):
            items.append(str(t.head))
            t = t.tail
        body = ",".join(items)
        if isinstance(t, EmptyList):
            return f"[{body}]"
        return f"[{body}|{t}]"


Term = Union[Var, Atom, Compound, EmptyList, Cons]

NIL = EmptyList()


def make_list(items, tail: Term = NIL) -> Term:
    for item in reversed(list(items)):
        tail = Cons(item, tail)
    return tail


class StaleMarkError(RuntimeError):
    """Raised when undoing to a mark that has already been undone past."""


@dataclass(frozen=True, slots=True)
class Mark:
    pos: int
    serial: int


class BindStore:
    """Variable bindings with a trail so that they can be undone.

    Variables listed in ``rigid`` behave like constants: they may absorb a
    free variable but never bind to anything themselves. Bag files use them
    for index variables, so two distinct indices can never be identified.
    """

    def __init__(self, occurs_check: bool = True, *, counter=None, rigid=None, bindings=None):
        self.occurs_check = occurs_check
        self.bindings: dict[int, Term] = dict(bindings) if bindings else {}
        self.trail: list[int] = []
        self.rigid: set[int] = rigid if rigid is not None else set()
        self._counter = counter if counter is not None else itertools.count(1)
        self._marks: list[Mark] = []
        self._serials = itertools.count()

    def fresh(self) -> Var:
        return Var(next(self._counter))

    def child(self, bindings=None) -> "BindStore":
        """A new store sharing this one's variable supply and rigid set."""
        return BindStore(self.occurs_check, counter=self._counter, rigid=self.rigid, bindings=bindings)

    def mark(self) -> Mark:
        m = Mark(len(self.trail), next(self._serials))
        self._marks.append(m)
        return m

    def undo_to(self, m: Mark) -> None:
        marks = self._marks
        while marks and marks[-1].serial > m.serial:
            marks.pop()
        if not marks or marks[-1] != m:
            raise StaleMarkError(f"mark {m} is not live")
        self._unwind(m.pos)

    def _unwind(self, pos: int) -> None:
        trail, bindings = self.trail, self.bindings
        while len(trail) > pos:
            del bindings[trail.pop()]

    def deref(self, t: Term) -> Term:
        bindings = self.bindings
        while isinstance(t, Var) and t.id in bindings:
            t = bindings[t.id]
        return t

    def bind(self, v: Var, t: Term) -> None:
        self.bindings[v.id] = t
        self.trail.append(v.id)


def _occurs(v: Var, t: Term, s: BindStore) -> bool:
    todo = [t]
    while todo:
        t = s.deref(todo.pop())
        if isinstance(t, Var):
            if t.id == v.id:
                return True
        elif isinstance(t, Compound):
            todo.extend(t.args)
        elif isinstance(t, Cons):
            todo.append(t.head)
            todo.append(t.tail)
    return False


def unify(t1: Term, t2: Term, s: BindStore) -> bool:
    """Unify two terms under ``s``. On failure ``s`` is left as it was."""
    start = len(s.trail)
    if _unify(t1, t2, s):
        return True
    s._unwind(start)
    return False


def _unify(t1: Term, t2: Term, s: BindStore) -> bool:
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = s.deref(a)
        b = s.deref(b)
        if a == b:
            continue
        if isinstance(a, Var) and a.id in s.rigid:
            a, b = b, a
        if isinstance(a, Var):
            if a.id in s.rigid:
                return False  # two distinct rigid variables
            if s.occurs_check and _occurs(a, b, s):
                return False
            s.bind(a, b)
        elif isinstance(b, Var):
            if b.id in s.rigid:
                return False
            if s.occurs_check and _occurs(b, a, s):
                return False
            s.bind(b, a)
        elif isinstance(a, Compound):
            if not isinstance(b, Compound) or a.functor != b.functor or len(a.args) != len(b.args):
                return False
            stack.extend(zip(a.args, b.args))
        elif isinstance(a, Cons):
            if not isinstance(b, Cons):
                return False
            stack.append((a.tail, b.tail))
            stack.append((a.head, b.head))
        else:
            # atoms and [] compare by value; 1 and "1" differ by type
            if type(a) is not type(b) or a != b or (isinstance(a, Atom) and type(a.name) is not type(b.name)):
                return False
    return True


def resolve(t: Term, s: BindStore) -> Term:
    t = s.deref(t)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(resolve(a, s) for a in t.args))
    if isinstance(t, Cons):
        return Cons(resolve(t.head, s), resolve(t.tail, s))
    return t


def variables(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Compound):
        for a in t.args:
            yield from variables(a)
    elif isinstance(t, Cons):
        yield from variables(t.head)
        yield from variables(t.tail)


def rename_apart(t: Term, s: BindStore, mapping: dict | None = None) -> Term:
    """Copy ``t`` with every variable replaced, consistently, by a fresh one.

    Pass the same ``mapping`` to several calls to keep sharing across them.
    """
    if mapping is None:
        mapping = {}
    if isinstance(t, Var):
        if t.id not in mapping:
            mapping[t.id] = s.fresh()
        return mapping[t.id]
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(rename_apart(a, s, mapping) for a in t.args))
    if isinstance(t, Cons):
        return Cons(rename_apart(t.head, s, mapping), rename_apart(t.tail, s, mapping))
    return t


def variant(t1: Term, t2: Term) -> bool:
    """True if the two terms are equal up to a consistent renaming of variables."""
    fwd: dict[int, int] = {}
    back: dict[int, int] = {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        if isinstance(a, Var) and isinstance(b, Var):
            if fwd.setdefault(a.id, b.id) != b.id or back.setdefault(b.id, a.id) != a.id:
                return False
        elif isinstance(a, Compound) and isinstance(b, Compound):
            if a.functor != b.functor or len(a.args) != len(b.args):
                return False
            stack.extend(zip(a.args, b.args))
        elif isinstance(a, Cons) and isinstance(b, Cons):
            stack.append((a.head, b.head))
            stack.append((a.tail, b.tail))
        elif type(a) is not type(b) or a != b:
            return False
        elif isinstance(a, Atom) and type(a.name) is not type(b.name):
            return False
    return True
