"""Categorial types, lexicon and bag files, and nesting-level decomposition."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Union

from .terms import (
    NIL, Atom, BindStore, Compound, Cons, Term, Var, make_list, rename_apart, resolve, unify,
)


class Dir(str, Enum):
    RIGHT = "/"
    LEFT = "\\"


class Polarity(str, Enum):
    ROOT = "root"
    SLOT = "slot"


@dataclass(frozen=True)
class Basic:
    name: str
    features: tuple = ()

    def __str__(self) -> str:
        return format_category(self)


@dataclass(frozen=True)
class Functor:
    result: "Category"
    arg: "Category"
    dir: Dir

    def __str__(self) -> str:
        return format_category(self)


Category = Union[Basic, Functor]


class GrammarSyntaxError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{msg} at line {line}, column {col}")
        self.pos = pos


class UnknownWordError(KeyError):
    pass


# ---------------------------------------------------------------------------
# concrete syntax

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<atom>[a-z][A-Za-z0-9_']*)
  | (?P<arrow>->)
  | (?P<punct>[()\[\],|/\\:])
""", re.VERBOSE)


def _tokenize(text: str, offset: int = 0):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise GrammarSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), pos + offset))
        pos = m.end()
    toks.append(("end", "", len(text) + offset))
    return toks


class _Parser:
    """Recursive-descent parser over one statement.

    ``varmap`` maps variable names to Var objects and is shared by every
    parse in the same scope; a lone ``_`` is always fresh.
    """

    def __init__(self, text: str, store: BindStore, varmap: dict, source: str | None = None, offset: int = 0):
        self.toks = _tokenize(text, offset)
        self.i = 0
        self.store = store
        self.varmap = varmap
        self.source = source if source is not None else text

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg: str):
        raise GrammarSyntaxError(msg, self.source, self.peek()[2])

    def expect(self, value: str):
        kind, text, _ = self.peek()
        if text != value or kind in ("atom", "var", "int"):
            self.error(f"expected {value!r}, found {text or 'end of input'!r}")
        return self.next()

    def at(self, value: str) -> bool:
        kind, text, _ = self.peek()
        return text == value and kind not in ("atom", "var", "int")

    def at_end(self) -> bool:
        return self.peek()[0] == "end"

    def ident(self) -> str:
        kind, text, _ = self.peek()
        if kind not in ("atom", "int"):
            self.error(f"expected a name, found {text or 'end of input'!r}")
        self.next()
        return text

    # terms
    def term(self) -> Term:
        kind, text, _ = self.next()
        if kind == "int":
            return Atom(int(text))
        if kind == "var":
            if text == "_":
                return self.store.fresh()
            if text not in self.varmap:
                self.varmap[text] = self.store.fresh()
            return self.varmap[text]
        if kind == "atom":
            if self.at("("):
                return Compound(text, self.args("(", ")"))
            return Atom(text)
        if text == "[":
            if self.at("]"):
                self.next()
                return NIL
            items = [self.term()]
            while self.at(","):
                self.next()
                items.append(self.term())
            tail = NIL
            if self.at("|"):
                self.next()
                tail = self.term()
            self.expect("]")
            return make_list(items, tail)
        self.i -= 1
        self.error(f"expected a term, found {text or 'end of input'!r}")

    def args(self, open_: str, close: str) -> tuple:
        self.expect(open_)
        out = [self.term()]
        while self.at(","):
            self.next()
            out.append(self.term())
        self.expect(close)
        return tuple(out)

    # categories
    def category(self) -> Category:
        cat = self.primary()
        while self.at("/") or self.at("\\"):
            d = Dir(self.next()[1])
            cat = Functor(cat, self.primary(), d)
        return cat

    def primary(self) -> Category:
        if self.at("("):
            self.next()
            cat = self.category()
            self.expect(")")
            return cat
        return self.basic()

    def basic(self) -> Basic:
        kind, text, _ = self.peek()
        if kind != "atom":
            self.error(f"expected a category, found {text or 'end of input'!r}")
        self.next()
        feats = self.args("(", ")") if self.at("(") else ()
        return Basic(text, feats)


def parse_term(text: str, store: BindStore, varmap: dict | None = None) -> Term:
    p = _Parser(text, store, {} if varmap is None else varmap)
    t = p.term()
    if not p.at_end():
        p.error("trailing input")
    return t


def parse_category(text: str, store: BindStore | None = None, varmap: dict | None = None) -> Category:
    p = _Parser(text, store if store is not None else BindStore(), {} if varmap is None else varmap)
    cat = p.category()
    if not p.at_end():
        p.error("trailing input")
    return cat


def format_term(t: Term, names: dict[int, str] | None = None) -> str:
    """Print a term in the grammar-file syntax, naming variables ``_G<n>``
    unless ``names`` supplies a name."""
    if isinstance(t, Var):
        if names and t.id in names:
            return names[t.id]
        return f"_G{t.id}"
    if isinstance(t, Compound):
        return f"{t.functor}({','.join(format_term(a, names) for a in t.args)})"
    if isinstance(t, Cons):
        items = []
        while isinstance(t, Cons):
            items.append(format_term(t.head, names))
            t = t.tail
        if t == NIL:
            return f"[{','.join(items)}]"
        return f"[{','.join(items)}|{format_term(t, names)}]"
    return str(t)


def format_category(c: Category, s: BindStore | None = None) -> str:
    if s is not None:
        c = resolve_category(c, s)
    if isinstance(c, Basic):
        if not c.features:
            return c.name
        return f"{c.name}({','.join(format_term(f) for f in c.features)})"
    arg = format_category(c.arg)
    if isinstance(c.arg, Functor):
        arg = f"({arg})"
    return f"{format_category(c.result)}{c.dir.value}{arg}"


# ---------------------------------------------------------------------------
# category operations


def unify_category(c1: Category, c2: Category, s: BindStore) -> bool:
    start = len(s.trail)
    if _unify_cat(c1, c2, s):
        return True
    s._unwind(start)
    return False


def _unify_cat(c1: Category, c2: Category, s: BindStore) -> bool:
    if isinstance(c1, Basic):
        if not isinstance(c2, Basic) or c1.name != c2.name or len(c1.features) != len(c2.features):
            return False
        return all(unify(a, b, s) for a, b in zip(c1.features, c2.features))
    if not isinstance(c2, Functor) or c1.dir != c2.dir:
        return False
    return _unify_cat(c1.arg, c2.arg, s) and _unify_cat(c1.result, c2.result, s)


def unifiable(c1: Category, c2: Category, s: BindStore) -> bool:
    """Probe unification and leave no bindings behind."""
    start = len(s.trail)
    ok = _unify_cat(c1, c2, s)
    s._unwind(start)
    return ok


def resolve_category(c: Category, s: BindStore) -> Category:
    if isinstance(c, Basic):
        return Basic(c.name, tuple(resolve(f, s) for f in c.features))
    return Functor(resolve_category(c.result, s), resolve_category(c.arg, s), c.dir)


def rename_category(c: Category, s: BindStore, mapping: dict | None = None) -> Category:
    if mapping is None:
        mapping = {}
    if isinstance(c, Basic):
        return Basic(c.name, tuple(rename_apart(f, s, mapping) for f in c.features))
    return Functor(rename_category(c.result, s, mapping), rename_category(c.arg, s, mapping), c.dir)


def category_vars(c: Category):
    from .terms import variables
    if isinstance(c, Basic):
        for f in c.features:
            yield from variables(f)
    else:
        yield from category_vars(c.result)
        yield from category_vars(c.arg)


def is_first_order(c: Category) -> bool:
    """True when every argument on the category's spine is basic."""
    while isinstance(c, Functor):
        if not isinstance(c.arg, Basic):
            return False
        c = c.result
    return True


def decompose(c: Category, level: int = 0, polarity: Polarity = Polarity.ROOT):
    """Break a category into its basic categories with nesting levels.

    The result is the spine's final basic category at ``level``, followed by
    the decompositions of its arguments, outermost (consumed first) first.
    """
    args = []
    while isinstance(c, Functor):
        args.append(c.arg)
        c = c.result
    out = [(c, level, polarity)]
    for a in args:
        out.extend(decompose(a, level + 1, Polarity.SLOT))
    return out


# ---------------------------------------------------------------------------
# lexicons and bags


@dataclass(frozen=True)
class Rule:
    """Unordered binary production ``parent <- left, right``."""
    parent: Basic
    left: Basic
    right: Basic

    def __str__(self) -> str:
        return f"{format_category(self.parent)} -> {format_category(self.left)} {format_category(self.right)}"


@dataclass
class Lexicon:
    entries: dict[str, list] = field(default_factory=dict)
    rules: list[Rule] = field(default_factory=list)
    store: BindStore = field(default_factory=BindStore)

    def add(self, word: str, cat: Category) -> None:
        self.entries.setdefault(word, []).append(cat)

    def lookup(self, word: str) -> list:
        try:
            return self.entries[word]
        except KeyError:
            raise UnknownWordError(word) from None


@dataclass(frozen=True)
class BagItem:
    word: str
    readings: tuple  # alternative categories (lexical ambiguity)


@dataclass(frozen=True)
class BasicSignNode:
    node_id: int
    category: Basic
    item: int  # bag position; -1 for the dummy target node
    word: str
    level: int
    polarity: Polarity


@dataclass
class Bag:
    items: list[BagItem]
    store: BindStore
    target: Category | None = None
    rules: list[Rule] = field(default_factory=list)

    @property
    def words(self) -> list[str]:
        return [it.word for it in self.items]

    def __len__(self) -> int:
        return len(self.items)

    def readings(self):
        """Yield one single-reading bag per combination of lexical readings."""
        import itertools
        for combo in itertools.product(*(it.readings for it in self.items)):
            yield Bag([BagItem(it.word, (c,)) for it, c in zip(self.items, combo)],
                      self.store, self.target, self.rules)


def number_nodes(bag: Bag):
    """Assign node ids to the basic signs of every reading of every item.

    Returns ``(nodes, layout)`` where ``layout[i][r]`` is ``(root_id,
    slot_ids)`` for reading ``r`` of item ``i``; slot ids list the spine's
    argument slots in consumption order. Node 0 is reserved for the dummy
    target slot, so unambiguous bags number exactly as in the usual
    item-by-item table.
    """
    nodes: list[BasicSignNode] = []
    layout = []
    next_id = 1
    for i, item in enumerate(bag.items):
        per_item = []
        for cat in item.readings:
            parts = decompose(cat)
            ids = list(range(next_id, next_id + len(parts)))
            next_id += len(parts)
            for nid, (basic, level, pol) in zip(ids, parts):
                nodes.append(BasicSignNode(nid, basic, i, item.word, level, pol))
            spine = [nid for nid, (_, level, _) in zip(ids, parts) if level == 1]
            per_item.append((ids[0], tuple(spine)))
        layout.append(per_item)
    return nodes, layout


def _statements(text: str):
    """Split file text into ``(statement, offset)`` pairs.

    Statements end with a full stop followed by whitespace or end of text;
    ``%`` starts a comment running to end of line.
    """
    clean = re.sub(r"%[^\n]*", lambda m: " " * len(m.group()), text)
    pos = 0
    for m in re.finditer(r"\.(?=\s|$)", clean):
        stmt = clean[pos:m.start()]
        if stmt.strip():
            lead = len(stmt) - len(stmt.lstrip())
            yield stmt.strip(), pos + lead
        pos = m.end()
    if clean[pos:].strip():
        raise GrammarSyntaxError("statement not terminated by '.'", text, pos + len(clean[pos:]) - len(clean[pos:].lstrip()))


def _keyword(stmt: str, offset: int, text: str):
    m = re.match(r"([a-z]+)\s+", stmt)
    if not m:
        raise GrammarSyntaxError("expected a keyword", text, offset)
    return m.group(1), stmt[m.end():], offset + m.end()


def _word_and_category(body: str, offset: int, text: str, store: BindStore, varmap: dict):
    p = _Parser(body, store, varmap, source=text, offset=offset)
    word = p.ident()
    p.expect(":")
    cat = p.category()
    if not p.at_end():
        p.error("trailing input")
    return word, cat


def load_lexicon(text: str, store: BindStore | None = None) -> Lexicon:
    """Parse a grammar file of ``word w : cat.`` and ``rule p -> c1 c2.`` lines."""
    lex = Lexicon(store=store if store is not None else BindStore())
    for stmt, off in _statements(text):
        kw, body, boff = _keyword(stmt, off, text)
        if kw == "word":
            word, cat = _word_and_category(body, boff, text, lex.store, {})
            lex.add(word, cat)
        elif kw == "rule":
            p = _Parser(body, lex.store, {}, source=text, offset=boff)
            parent = p.basic()
            p.expect("->")
            left = p.basic()
            right = p.basic()
            if not p.at_end():
                p.error("trailing input")
            lex.rules.append(Rule(parent, left, right))
        else:
            raise GrammarSyntaxError(f"unknown statement {kw!r}", text, off)
    return lex


def load_lexicon_file(path) -> Lexicon:
    return load_lexicon(Path(path).read_text(encoding="utf-8"))


def pull(lex: Lexicon, word: str, store: BindStore) -> BagItem:
    """A bag item for ``word`` with all of its lexical readings, renamed apart."""
    return BagItem(word, tuple(rename_category(c, store) for c in lex.lookup(word)))


def bag_from_words(words, lex: Lexicon, target: Category | str | None = None,
                   store: BindStore | None = None) -> Bag:
    store = store if store is not None else BindStore()
    items = [pull(lex, w, store) for w in words]
    if isinstance(target, str):
        target = parse_category(target, store)
    return Bag(items, store, target, list(lex.rules))


def load_bag(text: str, lexicon: Lexicon | None = None, *, base_dir=None,
             default_target: str | None = None, store: BindStore | None = None) -> Bag:
    """Parse a bag file.

    Named variables are scoped to the whole file and become rigid index
    variables in the bag's store: items naming the same variable share it,
    and distinct names can never be unified with each other.
    """
    store = store if store is not None else BindStore()
    varmap: dict[str, Var] = {}
    items: list[BagItem] = []
    target = None
    lexes = [lexicon] if lexicon is not None else []
    for stmt, off in _statements(text):
        kw, body, boff = _keyword(stmt, off, text)
        if kw == "use":
            path = Path(body.strip())
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            lexes.append(load_lexicon_file(path))
        elif kw == "item":
            word, cat = _word_and_category(body, boff, text, store, varmap)
            items.append(BagItem(word, (cat,)))
        elif kw == "word":
            word = body.strip()
            for lex in reversed(lexes):
                if word in lex.entries:
                    items.append(pull(lex, word, store))
                    break
            else:
                raise UnknownWordError(word)
        elif kw == "target":
            target = parse_category(body, store, varmap)
        else:
            raise GrammarSyntaxError(f"unknown statement {kw!r}", text, off)
    store.rigid.update(v.id for v in varmap.values())
    if target is None and default_target is not None:
        target = parse_category(default_target, store)
    rules = [r for lex in lexes for r in lex.rules]
    return Bag(items, store, target, rules)


def load_bag_file(path, lexicon: Lexicon | None = None, **kw) -> Bag:
    path = Path(path)
    return load_bag(path.read_text(encoding="utf-8"), lexicon, base_dir=path.parent, **kw)
