"""Sorted congruences, congruence closure, kernels and quotient algebras."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .algebra import Algebra, Homomorphism, Verdict, is_homomorphism
from .structure import VObject, final_lift
from .term import App, Var, TermUniverse, subterms


class NotACongruence(ValueError):
    def __init__(self, verdict: Verdict):
        super().__init__(f"not a congruence: {verdict.message}")
        self.verdict = verdict


@dataclass(frozen=True)
class SortedCongruence:
    """Per-sort partitions; each class lists members in carrier order and
    classes are ordered by their representative (the first member)."""

    classes: Mapping[str, tuple]

    def __post_init__(self):
        rep = {}
        for s, cls in self.classes.items():
            for c in cls:
                for x in c:
                    rep[(s, x)] = c[0]
        object.__setattr__(self, "_rep", rep)

    @classmethod
    def from_labels(cls, carriers: Mapping[str, Sequence], label) -> "SortedCongruence":
        """Group each carrier by ``label(sort, x)``, keeping carrier order."""
        out = {}
        for s, elems in carriers.items():
            groups: dict = {}
            for x in elems:
                groups.setdefault(label(s, x), []).append(x)
            out[s] = tuple(sorted((tuple(g) for g in groups.values()),
                                  key=lambda g, order={x: i for i, x in enumerate(elems)}: order[g[0]]))
        return cls(out)

    @classmethod
    def identity(cls, carriers: Mapping[str, Sequence]) -> "SortedCongruence":
        return cls({s: tuple((x,) for x in elems) for s, elems in carriers.items()})

    def rep(self, sort: str, x):
        return self._rep[(sort, x)]

    def related(self, sort: str, x, y) -> bool:
        return self._rep[(sort, x)] == self._rep[(sort, y)]

    def reps(self, sort: str) -> tuple:
        return tuple(c[0] for c in self.classes[sort])

    def class_of(self, sort: str, x) -> tuple:
        r = self._rep[(sort, x)]
        for c in self.classes[sort]:
            if c[0] == r:
                return c
        raise KeyError(x)  # pragma: no cover

    def num_classes(self) -> dict:
        return {s: len(c) for s, c in self.classes.items()}

    def refines(self, other: "SortedCongruence") -> bool:
        """Every class of ``self`` lies inside a class of ``other``."""
        return all(len({other.rep(s, x) for x in c}) == 1
                   for s, cls in self.classes.items() for c in cls)

    def restrict(self, carriers: Mapping[str, Sequence]) -> "SortedCongruence":
        return SortedCongruence.from_labels(carriers, lambda s, x: self.rep(s, x))


# --------------------------------------------------------------------------
# congruence closure


class _UnionFind:
    def __init__(self, nodes: Iterable):
        self.parent = {n: n for n in nodes}
        self.size = dict.fromkeys(self.parent, 1)

    def find(self, x):
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root


def close(nodes: Iterable, apps: Sequence[tuple], seeds: Iterable[tuple]) -> dict:
    """Least congruence containing ``seeds`` over a set of applications.

    ``apps`` holds ``(symbol, arg_nodes, result_node)`` triples. Returns the
    union-find root of every node. Signature-table congruence closure.
    """
    uf = _UnionFind(nodes)
    find = uf.find
    uses: dict = {n: [] for n in uf.parent}
    table: dict = {}
    pending = list(seeds)
    for i, (sym, args, res) in enumerate(apps):
        for a in set(args):
            uses[a].append(i)
        key = (sym, tuple(find(a) for a in args))
        j = table.get(key)
        if j is None:
            table[key] = i
        else:
            pending.append((res, apps[j][2]))
    while pending:
        a, b = pending.pop()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if uf.size[ra] < uf.size[rb]:
            ra, rb = rb, ra
        uf.parent[rb] = ra
        uf.size[ra] += uf.size[rb]
        moved = uses.pop(rb)
        for i in moved:
            sym, args, res = apps[i]
            key = (sym, tuple(find(x) for x in args))
            j = table.get(key)
            if j is None:
                table[key] = i
            elif j != i and find(apps[j][2]) != find(res):
                pending.append((res, apps[j][2]))
        uses[ra].extend(moved)
    return {n: find(n) for n in uf.parent}


def algebra_graph(a) -> tuple:
    """Nodes ``(sort, x)`` and applications for an algebra or a term universe."""
    if isinstance(a, TermUniverse):
        carriers = dict(a.sorts)
        apps = []
        for s, terms in carriers.items():
            for t in terms:
                if isinstance(t, App):
                    c = _symbol_inputs(a, t)
                    apps.append(((t.op, t.point), tuple(zip(c, t.args)), (s, t)))
        return carriers, apps
    sig = a.signature
    carriers = {s: a.elements(s) for s in sig.sorts}
    apps = []
    for o in sig.ops:
        for p in o.parameter.carrier:
            for args, v in a.tables[(o.name, p)].items():
                apps.append(((o.name, p), tuple(zip(o.inputs, args)), (o.output, v)))
    return carriers, apps


def _symbol_inputs(u: TermUniverse, t: App) -> tuple:
    for c in u.csig:
        if c.op == t.op:
            return c.inputs
    raise KeyError(t.op)  # pragma: no cover


def equation_instances(a, eq) -> Iterable[tuple]:
    """``(lhs value, rhs value)`` for every environment where both sides are defined.

    Environments are built variable by variable and abandoned as soon as a
    subterm is undefined, which keeps truncated term universes cheap.
    """
    names = [v for v, _ in eq.context]
    pos = {v: i for i, v in enumerate(names)}
    carriers = a.sorts if isinstance(a, TermUniverse) else {s: a.elements(s) for s in a.signature.sorts}
    subs = []
    for side in (eq.lhs, eq.rhs):
        for t in subterms(side):
            if isinstance(t, App) and t not in subs:
                subs.append(t)
    levels = [[] for _ in range(len(names) + 1)]
    for t in subs:
        vs = [pos[v.name] for v in subterms(t) if isinstance(v, Var)]
        levels[max(vs) + 1 if vs else 0].append(t)
    env: dict = {}
    vals: dict = {}

    def value(t):
        return env[t.name] if isinstance(t, Var) else vals[t]

    def rec(k):
        for t in levels[k]:
            v = a.apply(t.op, t.point, tuple(value(x) for x in t.args))
            if v is None:
                return
            vals[t] = v
        if k == len(names):
            yield value(eq.lhs), value(eq.rhs)
            return
        for x in carriers[eq.context[k][1]]:
            env[names[k]] = x
            yield from rec(k + 1)

    yield from rec(0)


def _from_roots(carriers, roots) -> SortedCongruence:
    return SortedCongruence.from_labels(carriers, lambda s, x: roots[(s, x)])


def generated_congruence(a, eqs: Sequence = (), extra_pairs: Iterable[tuple] = ()) -> SortedCongruence:
    """Least congruence on ``a`` (algebra or term universe) containing all
    instances of ``eqs`` plus ``extra_pairs`` (``(sort, x, y)`` triples)."""
    carriers, apps = algebra_graph(a)
    nodes = [(s, x) for s, xs in carriers.items() for x in xs]
    seeds = [((e.sort, l), (e.sort, r)) for e in eqs for l, r in equation_instances(a, e) if l != r]
    seeds.extend(((s, x), (s, y)) for s, x, y in extra_pairs)
    return _from_roots(carriers, close(nodes, apps, seeds))


def kernel_congruence(h: Homomorphism) -> SortedCongruence:
    v = is_homomorphism(h)
    if not v:
        raise ValueError(f"not a homomorphism: {v.message}")
    carriers = {s: h.dom.elements(s) for s in h.dom.signature.sorts}
    return SortedCongruence.from_labels(carriers, lambda s, x: h.maps[s][x])


def _as_congruence(a: Algebra, partition) -> tuple:
    if isinstance(partition, SortedCongruence):
        partition = partition.classes
    label = {}
    for s in a.signature.sorts:
        elems = set(a.elements(s))
        for i, c in enumerate(partition.get(s, ())):
            for x in c:
                if x not in elems:
                    return None, Verdict(False, (s, x), f"{x!r} is not an element of sort {s}")
                if (s, x) in label:
                    return None, Verdict(False, (s, x), f"{x!r} occurs in two classes of sort {s}")
                label[(s, x)] = i
        for x in a.elements(s):
            if (s, x) not in label:
                return None, Verdict(False, (s, x), f"{x!r} of sort {s} is in no class")
    return label, None


def is_congruence(a: Algebra, partition) -> Verdict:
    """Partition check plus compatibility with every classical operation.

    The witness is ``(op, point, args1, value1, args2, value2)``.
    """
    label, bad = _as_congruence(a, partition)
    if bad is not None:
        return bad
    sig = a.signature
    for o in sig.ops:
        for p in o.parameter.carrier:
            seen: dict = {}
            for args, v in a.tables[(o.name, p)].items():
                key = tuple(label[(s, x)] for s, x in zip(o.inputs, args))
                prev = seen.get(key)
                if prev is None:
                    seen[key] = (args, v)
                elif label[(o.output, prev[1])] != label[(o.output, v)]:
                    return Verdict(False, (o.name, p, prev[0], prev[1], args, v),
                                   f"{o.name}[{p}]{prev[0]!r} = {prev[1]!r} and {o.name}[{p}]{args!r} = {v!r} "
                                   "are in different classes")
    return Verdict(True)


def quotient(a: Algebra, c) -> tuple[Algebra, Homomorphism]:
    """Quotient algebra with final carrier structures, and the class map."""
    v = is_congruence(a, c)
    if not v:
        raise NotACongruence(v)
    if not isinstance(c, SortedCongruence):
        order = {s: {x: i for i, x in enumerate(a.elements(s))} for s in a.signature.sorts}
        c = SortedCongruence({s: tuple(sorted((tuple(sorted(cl, key=order[s].get)) for cl in c[s]),
                                              key=lambda cl, o=order[s]: o[cl[0]]))
                              for s in a.signature.sorts})
    sig = a.signature
    carriers = {}
    qmaps = {}
    for s in sig.sorts:
        reps = c.reps(s)
        q = {x: c.rep(s, x) for x in a.elements(s)}
        qmaps[s] = q
        obj = a.carriers[s]
        carriers[s] = VObject.trusted(obj.kind, reps, final_lift(reps, [(obj, q)], obj.kind))
    tables = {}
    for o in sig.ops:
        for p in o.parameter.carrier:
            t = {}
            for args, val in a.tables[(o.name, p)].items():
                key = tuple(qmaps[s][x] for s, x in zip(o.inputs, args))
                t.setdefault(key, qmaps[o.output][val])
            tables[(o.name, p)] = t
    qa = Algebra(sig, carriers, tables)
    return qa, Homomorphism(a, qa, qmaps)
