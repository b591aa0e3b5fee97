"""Ground terms, terms in context, term universes and interpretation."""
from __future__ import annotations

import itertools
import logging
import os
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

log = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 4
DEFAULT_MAX_COUNT = 20_000


@dataclass(frozen=True)
class Var:
    name: str

    depth = 0

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    """A generator element ``name`` used as a constant of ``sort``."""

    sort: str
    name: Any

    depth = 0

    def __str__(self):
        return str(self.name)


@dataclass(frozen=True)
class App:
    """``op[point](args...)``; ``args`` may contain :class:`Var` or :class:`Const`."""

    op: str
    point: Any
    args: tuple = ()
    depth: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "depth", 1 + max((a.depth for a in self.args), default=0))
        object.__setattr__(self, "_hash", hash((self.op, self.point, self.args)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        inner = ", ".join(map(str, self.args))
        return f"{self.op}[{self.point}]({inner})"


def variables(t) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        return set().union(*(variables(a) for a in t.args)) if t.args else set()
    return set()


def subterms(t) -> Iterable:
    """Post-order traversal, children before parents."""
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)
    yield t


# --------------------------------------------------------------------------
# printing and parsing


def format_term(t, sig=None) -> str:
    """Render in file syntax; ``[point]`` is dropped for one-point parameters."""
    if isinstance(t, App):
        head = t.op
        if sig is None or len(sig.op(t.op).parameter.carrier) != 1:
            head += f"[{t.point}]"
        if not t.args and sig is not None:
            return head
        return head + "(" + ", ".join(format_term(a, sig) for a in t.args) + ")"
    return str(t.name)


class TermSyntaxError(ValueError):
    def __init__(self, message, text="", pos=0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col


_TOKEN = re.compile(r"\s*(?:([^\s()\[\],]+)|(.))")


class _Parser:
    def __init__(self, text, sig, context, constants, infer):
        self.text = text
        self.sig = sig
        self.context = dict(context or {})
        self.constants = constants or {}
        self.infer = infer
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m.end() == pos or (m.group(1) is None and m.group(2) is None):
                break
            start = m.start(1) if m.group(1) is not None else m.start(2)
            self.tokens.append((m.group(1) or m.group(2), start, m.group(1) is not None))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, len(self.text), False)

    def take(self, expected=None):
        tok = self.peek()
        if tok[0] is None:
            raise TermSyntaxError("unexpected end of term", self.text, tok[1])
        if expected is not None and tok[0] != expected:
            raise TermSyntaxError(f"expected {expected!r}, found {tok[0]!r}", self.text, tok[1])
        self.i += 1
        return tok

    def error(self, msg, pos):
        return TermSyntaxError(msg, self.text, pos)

    def term(self, sort):
        name, pos, is_name = self.take()
        if not is_name:
            raise self.error(f"unexpected {name!r}", pos)
        nxt = self.peek()[0]
        if nxt in ("[", "(") or (self.sig is not None and self.sig.has_op(name) and name not in self.context):
            return self.application(name, pos, sort)
        if name in self.context:
            vs = self.context[name]
            if sort is not None and vs is not None and vs != sort:
                raise self.error(f"variable {name!r} has sort {vs}, expected {sort}", pos)
            if vs is None:
                self.context[name] = sort
            return Var(name)
        if sort is not None and name in self.constants.get(sort, ()):
            return Const(sort, self.constants[sort][name] if isinstance(self.constants[sort], dict) else name)
        if self.infer:
            self.context[name] = sort
            return Var(name)
        raise self.error(f"unknown name {name!r}" + (f" at sort {sort}" if sort else ""), pos)

    def application(self, name, pos, sort):
        if self.sig is None or not self.sig.has_op(name):
            raise self.error(f"unknown operation {name!r}", pos)
        op = self.sig.op(name)
        if sort is not None and op.output != sort:
            raise self.error(f"operation {name!r} has sort {op.output}, expected {sort}", pos)
        points = op.parameter.carrier
        if self.peek()[0] == "[":
            self.take("[")
            ptok, ppos, _ = self.take()
            self.take("]")
            match = [p for p in points if str(p) == ptok]
            if not match:
                raise self.error(f"{ptok!r} is not a point of the parameter of {name!r}", ppos)
            point = match[0]
        elif len(points) == 1:
            point = points[0]
        else:
            raise self.error(f"operation {name!r} needs an explicit [point]", pos)
        args = []
        if self.peek()[0] == "(":
            self.take("(")
            if self.peek()[0] == ")":
                self.take(")")
            else:
                while True:
                    if len(args) >= len(op.inputs):
                        raise self.error(f"too many arguments to {name!r}", self.peek()[1])
                    args.append(self.term(op.inputs[len(args)]))
                    if self.peek()[0] == ",":
                        self.take(",")
                        continue
                    self.take(")")
                    break
        if len(args) != len(op.inputs):
            raise self.error(f"{name!r} expects {len(op.inputs)} arguments, got {len(args)}", pos)
        return App(name, point, tuple(args))


def parse_term(text: str, sig=None, context: Mapping | None = None, sort: str | None = None,
               constants: Mapping | None = None, infer: bool = False):
    """Parse ``op[point](t1, ..., tn)`` syntax.

    Bare names resolve to nullary operations, then context variables, then
    constants of the expected sort. With ``infer=True`` unknown bare names
    become variables; ``parse_term_with_context`` returns their sorts.
    """
    return parse_term_with_context(text, sig, context, sort, constants, infer)[0]


def parse_term_with_context(text, sig=None, context=None, sort=None, constants=None, infer=False):
    p = _Parser(text, sig, context, constants, infer)
    t = p.term(sort)
    tok, pos, _ = p.peek()
    if tok is not None:
        raise p.error(f"trailing input {tok!r}", pos)
    return t, p.context


# --------------------------------------------------------------------------
# ordering and universes


class TermOrder:
    """Canonical total order: depth, then generators by sort/carrier order,
    then applications by symbol order and lexicographically on children."""

    def __init__(self, csig: Sequence, generators: Mapping[str, Sequence]):
        self.sym_index = {(c.op, c.point): i for i, c in enumerate(csig)}
        self.sort_index = {s: i for i, s in enumerate(generators)}
        self.elem_index = {(s, x): i for s, xs in generators.items() for i, x in enumerate(xs)}
        self._cache: dict = {}

    def key(self, t):
        k = self._cache.get(t)
        if k is not None:
            return k
        if isinstance(t, Const):
            k = (0, 0, self.sort_index.get(t.sort, -1), self.elem_index.get((t.sort, t.name), -1), str(t.name))
        elif isinstance(t, Var):
            k = (0, -1, t.name)
        else:
            k = (t.depth, 1, self.sym_index[(t.op, t.point)], tuple(self.key(a) for a in t.args))
        self._cache[t] = k
        return k


def canonical_compare(t, u, order: TermOrder) -> int:
    kt, ku = order.key(t), order.key(u)
    return (kt > ku) - (kt < ku)


@dataclass(frozen=True)
class TermUniverse:
    sorts: Mapping[str, tuple]
    finite: bool
    depth_reached: int
    csig: tuple = ()
    generators: Mapping[str, tuple] = field(default_factory=dict)
    warning: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "_members", {s: frozenset(ts) for s, ts in self.sorts.items()})
        object.__setattr__(self, "order", TermOrder(self.csig, self.generators))
        object.__setattr__(self, "_out", {c.op: c.output for c in self.csig})

    def __contains__(self, item):
        sort, t = item
        return t in self._members.get(sort, ())

    def size(self) -> int:
        return sum(len(ts) for ts in self.sorts.values())

    def sort_of(self, t, sig) -> str:
        return t.sort if isinstance(t, Const) else sig.op(t.op).output

    def apply(self, op: str, point, args: tuple):
        """Term formation restricted to the universe; ``None`` when outside."""
        if any(a is None for a in args) or op not in self._out:
            return None
        t = App(op, point, args)
        return t if t in self._members[self._out[op]] else None


def max_count_default() -> int:
    env = os.environ.get("ENRALG_MAX_TERMS")
    return int(env) if env else DEFAULT_MAX_COUNT


def _stage(csig, by_depth, d):
    """All symbol applications whose deepest argument has depth exactly ``d - 1``."""
    for c in csig:
        if not c.inputs:
            if d == 1:
                yield c.output, App(c.op, c.point, ())
            continue
        pools = []
        for s in c.inputs:
            pools.append([t for layer in by_depth[s][:d] for t in layer])
        for args in itertools.product(*pools):
            if max(a.depth for a in args) == d - 1:
                yield c.output, App(c.op, c.point, args)


def generate_terms(csig: Sequence, generators: Mapping[str, Sequence], max_depth: int = DEFAULT_MAX_DEPTH,
                   max_count: int | None = None, sorts: Sequence[str] | None = None) -> TermUniverse:
    """Ground terms over ``csig`` with constants from ``generators``, by depth."""
    if max_count is None:
        max_count = max_count_default()
    if max_depth < 0 or max_count <= 0:
        raise ValueError("policy bounds must be positive")
    sorts = list(sorts) if sorts is not None else list(generators)
    for c in csig:
        for s in (*c.inputs, c.output):
            if s not in sorts:
                sorts.append(s)
    gens = {s: tuple(generators.get(s, ())) for s in sorts}
    by_depth = {s: [[Const(s, x) for x in gens[s]]] for s in sorts}
    count = sum(len(v[0]) for v in by_depth.values())
    finite = False
    warning = None
    depth = 0
    while True:
        d = depth + 1
        if d > max_depth:
            finite = next(_stage(csig, by_depth, d), None) is None
            break
        new = {s: [] for s in sorts}
        added = 0
        over = False
        for s, t in _stage(csig, by_depth, d):
            new[s].append(t)
            added += 1
            if count + added > max_count:
                over = True
                break
        if over:
            warning = f"term cap {max_count} reached during depth {d}; universe truncated at depth {depth}"
            log.warning(warning)
            break
        if added == 0:
            finite = True
            break
        for s in sorts:
            by_depth[s].append(new[s])
        count += added
        depth = d
    universe = {s: tuple(t for layer in by_depth[s] for t in layer) for s in sorts}
    return TermUniverse(universe, finite, depth, tuple(csig), gens, warning)


# --------------------------------------------------------------------------
# interpretation


class InterpretationError(ValueError):
    pass


def interpret(t, algebra, env: Mapping, consts: Mapping | None = None):
    """Value of ``t`` in ``algebra``: variables by ``env``, constants by ``consts``.

    ``algebra`` needs an ``apply(op, point, args)`` method.
    """
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise InterpretationError(f"variable {t.name!r} not bound") from None
    if isinstance(t, Const):
        if consts is None:
            raise InterpretationError(f"no value for constant {t.name!r}")
        return consts[t.sort][t.name]
    return algebra.apply(t.op, t.point, tuple(interpret(a, algebra, env, consts) for a in t.args))
