"""Topological categories over Set restricted to finite carriers.

Five instances are realized: ``Set``, ``Rel`` (a binary relation), ``Preord``
(a preorder), ``Simp`` (an abstract simplicial complex) and ``PMet`` (an
extended pseudo-metric with exact rational distances).

Structures on a carrier (elements of the fibre over that carrier) are plain
immutable Python values:

* ``Set``: ``frozenset()``
* ``Rel``/``Preord``: ``frozenset`` of ordered pairs
* ``Simp``: ``frozenset`` of facets (maximal simplices), each a ``frozenset``;
  every carrier point lies in some facet
* ``PMet``: a :class:`Metric`

Carrier elements may be any hashable value; the carrier tuple fixes their
canonical order.
"""
from __future__ import annotations

import enum
import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

INF = math.inf

DEFAULT_FIBRE_CAP = 5


class Kind(enum.Enum):
    SET = "Set"
    REL = "Rel"
    PREORD = "Preord"
    SIMP = "Simp"
    PMET = "PMet"

    @property
    def cartesian_closed(self) -> bool:
        return self is not Kind.PMET

    @property
    def enumerable(self) -> bool:
        return self is not Kind.PMET

    def __str__(self) -> str:
        return self.value


class StructureError(ValueError):
    """Malformed structure data or a mismatch between kinds or carriers."""


class Unsupported(Exception):
    """The requested operation is not available for this instance."""


def make_carrier(elements: Iterable[Hashable]) -> tuple:
    """Deduplicate, keeping first occurrence order."""
    return tuple(dict.fromkeys(elements))


# --------------------------------------------------------------------------
# pseudo-metrics


def as_distance(value: Any) -> Any:
    """Coerce to an exact nonnegative distance (``Fraction`` or ``INF``)."""
    if isinstance(value, str):
        v = value.strip().lower()
        if v in ("inf", "infinity", "∞"):
            return INF
        try:
            value = Fraction(v)
        except ValueError as exc:
            raise StructureError(f"bad distance {value!r}") from exc
    elif value == INF:
        return INF
    elif isinstance(value, float):
        raise StructureError("float distances are not exact; pass a string or Fraction")
    else:
        value = Fraction(value)
    if value < 0:
        raise StructureError(f"negative distance {value}")
    return value


class Metric:
    """Symmetric distance table; missing off-diagonal entries are infinite."""

    __slots__ = ("_d", "_hash")

    def __init__(self, entries: Mapping[tuple, Any] = ()):
        d = {}
        for (x, y), v in dict(entries).items():
            if x == y:
                if as_distance(v) != 0:
                    raise StructureError(f"nonzero self-distance at {x!r}")
                continue
            v = as_distance(v)
            if v == INF:
                continue
            other = d.get((y, x))
            if other is not None and other != v:
                raise StructureError(f"asymmetric distance between {x!r} and {y!r}")
            d[(x, y)] = v
            d[(y, x)] = v
        self._d = d
        self._hash = None

    def __call__(self, x, y):
        if x == y:
            return Fraction(0)
        return self._d.get((x, y), INF)

    def finite_entries(self) -> dict:
        return dict(self._d)

    def __eq__(self, other):
        return isinstance(other, Metric) and self._d == other._d

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __repr__(self):
        seen = set()
        parts = []
        for (x, y), v in self._d.items():
            if (y, x) in seen:
                continue
            seen.add((x, y))
            parts.append(f"d({x!r},{y!r})={v}")
        return "Metric(" + ", ".join(parts) + ")"


def _floyd_warshall(carrier: Sequence, cost: dict) -> Metric:
    """Shortest-path closure of a symmetric step-cost table (exact)."""
    n = len(carrier)
    d = [[INF] * n for _ in range(n)]
    idx = {x: i for i, x in enumerate(carrier)}
    for (x, y), v in cost.items():
        i, j = idx[x], idx[y]
        if v < d[i][j]:
            d[i][j] = v
    for i in range(n):
        d[i][i] = Fraction(0)
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik == INF:
                continue
            di = d[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    return Metric({(carrier[i], carrier[j]): d[i][j]
                   for i in range(n) for j in range(n) if i != j})


# --------------------------------------------------------------------------
# simplicial complexes


def maximal_sets(sets: Iterable[frozenset]) -> frozenset:
    """The inclusion-maximal members of a family of nonempty sets."""
    ordered = sorted({s for s in sets if s}, key=len, reverse=True)
    kept: list = []
    for s in ordered:
        if not any(s <= k for k in kept):
            kept.append(s)
    return frozenset(kept)


def is_simplex(facets: Iterable[frozenset], s: frozenset) -> bool:
    return any(s <= f for f in facets)


def simplices(facets: Iterable[frozenset]) -> frozenset:
    """Expand facets to the full downward-closed family (exponential)."""
    out = set()
    for f in facets:
        items = sorted(f, key=repr)
        for r in range(1, len(items) + 1):
            out.update(frozenset(c) for c in itertools.combinations(items, r))
    return frozenset(out)


# --------------------------------------------------------------------------
# validation


def _preord_violation(carrier, pairs):
    for x in carrier:
        if (x, x) not in pairs:
            return ("reflexivity", x)
    succ: dict = {}
    for x, y in pairs:
        succ.setdefault(x, set()).add(y)
    for x, y in pairs:
        for z in succ.get(y, ()):
            if (x, z) not in pairs:
                return ("transitivity", (x, y, z))
    return None


def check_structure(kind: Kind, carrier: Sequence, structure) -> None:
    """Raise :class:`StructureError` unless ``structure`` lies in the fibre."""
    elems = set(carrier)
    if len(elems) != len(carrier):
        raise StructureError("carrier elements must be unique")
    if kind is Kind.SET:
        if structure != frozenset():
            raise StructureError("Set structure must be empty")
    elif kind in (Kind.REL, Kind.PREORD):
        if not isinstance(structure, frozenset):
            raise StructureError(f"{kind} structure must be a frozenset of pairs")
        for p in structure:
            if not (isinstance(p, tuple) and len(p) == 2 and p[0] in elems and p[1] in elems):
                raise StructureError(f"pair {p!r} not over the carrier")
        if kind is Kind.PREORD:
            bad = _preord_violation(carrier, structure)
            if bad:
                raise StructureError(f"not a preorder: {bad[0]} fails at {bad[1]!r}")
    elif kind is Kind.SIMP:
        if not isinstance(structure, frozenset):
            raise StructureError("Simp structure must be a frozenset of facets")
        covered = set()
        for f in structure:
            if not isinstance(f, frozenset) or not f:
                raise StructureError(f"facet {f!r} must be a nonempty frozenset")
            if not f <= elems:
                raise StructureError(f"facet {set(f)!r} not over the carrier")
            covered |= f
        if covered != elems:
            raise StructureError(f"points {sorted(map(repr, elems - covered))} lie in no simplex")
        if maximal_sets(structure) != structure:
            raise StructureError("facet list is not an antichain")
    elif kind is Kind.PMET:
        if not isinstance(structure, Metric):
            raise StructureError("PMet structure must be a Metric")
        for (x, y) in structure.finite_entries():
            if x not in elems or y not in elems:
                raise StructureError(f"distance entry ({x!r}, {y!r}) not over the carrier")
        for x in carrier:
            for y in carrier:
                dxy = structure(x, y)
                for z in carrier:
                    if structure(x, z) > dxy + structure(y, z):
                        raise StructureError(f"triangle inequality fails at {x!r}, {y!r}, {z!r}")
    else:  # pragma: no cover
        raise StructureError(f"unknown kind {kind!r}")


# --------------------------------------------------------------------------
# objects and maps


@dataclass(frozen=True)
class VObject:
    kind: Kind
    carrier: tuple
    structure: Any

    def __post_init__(self):
        object.__setattr__(self, "carrier", tuple(self.carrier))
        check_structure(self.kind, self.carrier, self.structure)

    @classmethod
    def trusted(cls, kind: Kind, carrier: Sequence, structure) -> "VObject":
        """Build without validation; for results of lifts, which are valid by construction."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "kind", kind)
        object.__setattr__(obj, "carrier", tuple(carrier))
        object.__setattr__(obj, "structure", structure)
        return obj

    def __len__(self):
        return len(self.carrier)


@dataclass(frozen=True)
class StructuredMap:
    dom: VObject
    cod: VObject
    table: Mapping

    def __post_init__(self):
        if self.dom.kind is not self.cod.kind:
            raise StructureError(f"kind mismatch: {self.dom.kind} -> {self.cod.kind}")
        cod = set(self.cod.carrier)
        for x in self.dom.carrier:
            if x not in self.table:
                raise StructureError(f"map undefined at {x!r}")
            if self.table[x] not in cod:
                raise StructureError(f"value {self.table[x]!r} outside codomain")

    def __call__(self, x):
        return self.table[x]

    def compose(self, after: "StructuredMap") -> "StructuredMap":
        """``after ∘ self``."""
        return StructuredMap(self.dom, after.cod, {x: after.table[self.table[x]] for x in self.dom.carrier})


def _witness(kind: Kind, dom_carrier, table, dom_s, cod_s):
    if kind is Kind.SET:
        return None
    if kind in (Kind.REL, Kind.PREORD):
        for x, y in dom_s:
            if (table[x], table[y]) not in cod_s:
                return (x, y)
        return None
    if kind is Kind.SIMP:
        for f in dom_s:
            if not is_simplex(cod_s, frozenset(table[x] for x in f)):
                return f
        return None
    if kind is Kind.PMET:
        for x in dom_carrier:
            for y in dom_carrier:
                if cod_s(table[x], table[y]) > dom_s(x, y):
                    return (x, y)
        return None
    raise StructureError(f"unknown kind {kind!r}")  # pragma: no cover


def admissibility_witness(f: StructuredMap):
    """``None`` if ``f`` is admissible, else a violating pair or simplex."""
    return _witness(f.dom.kind, f.dom.carrier, f.table, f.dom.structure, f.cod.structure)


def is_admissible(f: StructuredMap) -> bool:
    return admissibility_witness(f) is None


def table_admissible(kind: Kind, dom_carrier, table, dom_s, cod_s) -> bool:
    """Admissibility without constructing a :class:`StructuredMap`."""
    return _witness(kind, dom_carrier, table, dom_s, cod_s) is None


# --------------------------------------------------------------------------
# fibre lattice


def discrete(kind: Kind, carrier: Sequence):
    carrier = tuple(carrier)
    if kind is Kind.SET:
        return frozenset()
    if kind is Kind.REL:
        return frozenset()
    if kind is Kind.PREORD:
        return frozenset((x, x) for x in carrier)
    if kind is Kind.SIMP:
        return frozenset(frozenset([x]) for x in carrier)
    if kind is Kind.PMET:
        return Metric()
    raise StructureError(f"unknown kind {kind!r}")


def indiscrete(kind: Kind, carrier: Sequence):
    carrier = tuple(carrier)
    if kind is Kind.SET:
        return frozenset()
    if kind in (Kind.REL, Kind.PREORD):
        return frozenset(itertools.product(carrier, repeat=2))
    if kind is Kind.SIMP:
        return frozenset([frozenset(carrier)]) if carrier else frozenset()
    if kind is Kind.PMET:
        return Metric({(x, y): 0 for x in carrier for y in carrier if x != y})
    raise StructureError(f"unknown kind {kind!r}")


def _closure_preord(carrier, pairs) -> frozenset:
    """Reflexive-transitive closure by repeated DFS from each point."""
    succ: dict = {x: set() for x in carrier}
    for x, y in pairs:
        succ[x].add(y)
    out = set()
    for x in carrier:
        seen = {x}
        stack = [x]
        while stack:
            for z in succ[stack.pop()]:
                if z not in seen:
                    seen.add(z)
                    stack.append(z)
        out.update((x, z) for z in seen)
    return frozenset(out)


def preorder_closure(carrier: Sequence, pairs: Iterable[tuple]) -> frozenset:
    return _closure_preord(tuple(carrier), pairs)


def _require_same(kind, carrier, structures):
    for s in structures:
        check_structure(kind, carrier, s)


def fib_leq(kind: Kind, carrier: Sequence, a, b) -> bool:
    """True iff the identity on ``carrier`` is admissible from ``a`` to ``b``."""
    if kind is Kind.SET:
        return True
    if kind in (Kind.REL, Kind.PREORD):
        return a <= b
    if kind is Kind.SIMP:
        return all(is_simplex(b, f) for f in a)
    if kind is Kind.PMET:
        carrier = tuple(carrier)
        return all(b(x, y) <= a(x, y) for x in carrier for y in carrier)
    raise StructureError(f"unknown kind {kind!r}")


def fib_sup(kind: Kind, carrier: Sequence, structures: Sequence):
    carrier = tuple(carrier)
    structures = list(structures)
    if not structures:
        return discrete(kind, carrier)
    if kind is Kind.SET:
        return frozenset()
    if kind is Kind.REL:
        return frozenset().union(*structures)
    if kind is Kind.PREORD:
        if len(structures) == 1:
            return structures[0]
        return _closure_preord(carrier, frozenset().union(*structures))
    if kind is Kind.SIMP:
        return maximal_sets(itertools.chain.from_iterable(structures))
    if kind is Kind.PMET:
        cost = {}
        for m in structures:
            for k, v in m.finite_entries().items():
                if v < cost.get(k, INF):
                    cost[k] = v
        return _floyd_warshall(carrier, cost)
    raise StructureError(f"unknown kind {kind!r}")


def _meet_facets(families) -> frozenset:
    families = list(families)
    cur = families[0]
    for fam in families[1:]:
        cur = maximal_sets(g & f for g in cur for f in fam)
    return cur


def fib_inf(kind: Kind, carrier: Sequence, structures: Sequence):
    carrier = tuple(carrier)
    structures = list(structures)
    if not structures:
        return indiscrete(kind, carrier)
    if kind is Kind.SET:
        return frozenset()
    if kind in (Kind.REL, Kind.PREORD):
        return frozenset.intersection(*structures)
    if kind is Kind.SIMP:
        return _meet_facets(structures)
    if kind is Kind.PMET:
        # pointwise max of pseudo-metrics is again a pseudo-metric
        return Metric({(x, y): max(m(x, y) for m in structures)
                       for x in carrier for y in carrier if x != y})
    raise StructureError(f"unknown kind {kind!r}")


def diff_structures(kind: Kind, carrier: Sequence, a, b):
    """First difference between two structures in canonical order, or ``None``.

    Returns ``(item, in_a, in_b)`` where ``item`` is a pair, a simplex or a
    pair with its two distances for ``PMet``.
    """
    carrier = tuple(carrier)
    if a == b:
        return None
    if kind in (Kind.REL, Kind.PREORD):
        for p in itertools.product(carrier, repeat=2):
            if (p in a) != (p in b):
                return (p, p in a, p in b)
    if kind is Kind.SIMP:
        order = {x: i for i, x in enumerate(carrier)}
        cands = sorted(a ^ b, key=lambda s: (len(s), sorted(order[x] for x in s)))
        for s in cands:
            ia, ib = is_simplex(a, s), is_simplex(b, s)
            if ia != ib:
                return (s, ia, ib)
        return (cands[0], cands[0] in a, cands[0] in b)
    if kind is Kind.PMET:
        for x, y in itertools.product(carrier, repeat=2):
            if a(x, y) != b(x, y):
                return ((x, y), a(x, y), b(x, y))
    return ("structure", a, b)


# --------------------------------------------------------------------------
# lifts


def _kind_of(objs, kind):
    kinds = {o.kind for o in objs}
    if kind is not None:
        kinds.add(kind)
    if len(kinds) > 1:
        raise StructureError(f"kind mismatch: {sorted(map(str, kinds))}")
    if not kinds:
        raise StructureError("kind required for an empty family")
    return kinds.pop()


def final_lift(target: Sequence, sink: Sequence, kind: Kind | None = None):
    """Least structure on ``target`` making every ``(source, table)`` admissible."""
    target = tuple(target)
    kind = _kind_of([src for src, _ in sink], kind)
    tset = set(target)
    for src, table in sink:
        for x in src.carrier:
            if x not in table:
                raise StructureError(f"sink map undefined at {x!r}")
            if table[x] not in tset:
                raise StructureError(f"sink value {table[x]!r} outside target")
    if kind is Kind.SET:
        return frozenset()
    if kind is Kind.REL:
        return frozenset((t[x], t[y]) for src, t in sink for x, y in src.structure)
    if kind is Kind.PREORD:
        return _closure_preord(target, ((t[x], t[y]) for src, t in sink for x, y in src.structure))
    if kind is Kind.SIMP:
        images = (frozenset(t[x] for x in f) for src, t in sink for f in src.structure)
        return maximal_sets(itertools.chain(images, (frozenset([x]) for x in target)))
    if kind is Kind.PMET:
        cost: dict = {}
        for src, t in sink:
            m = src.structure
            for (a, b), v in m.finite_entries().items():
                k = (t[a], t[b])
                if k[0] != k[1] and v < cost.get(k, INF):
                    cost[k] = v
        return _floyd_warshall(target, cost)
    raise StructureError(f"unknown kind {kind!r}")


def initial_lift(source_carrier: Sequence, source: Sequence, kind: Kind | None = None):
    """Greatest structure on ``source_carrier`` making every ``(table, cod)`` admissible."""
    carrier = tuple(source_carrier)
    kind = _kind_of([cod for _, cod in source], kind)
    for table, cod in source:
        cset = set(cod.carrier)
        for x in carrier:
            if x not in table:
                raise StructureError(f"source map undefined at {x!r}")
            if table[x] not in cset:
                raise StructureError(f"source value {table[x]!r} outside codomain")
    if kind is Kind.SET:
        return frozenset()
    if kind in (Kind.REL, Kind.PREORD):
        return frozenset((x, y) for x in carrier for y in carrier
                         if all((t[x], t[y]) in cod.structure for t, cod in source))
    if kind is Kind.SIMP:
        if not carrier:
            return frozenset()
        cur = frozenset([frozenset(carrier)])
        for t, cod in source:
            pre = [frozenset(x for x in carrier if t[x] in f) for f in cod.structure]
            cur = maximal_sets(g & p for g in cur for p in pre)
        return cur
    if kind is Kind.PMET:
        return Metric({(x, y): max((cod.structure(t[x], t[y]) for t, cod in source), default=0)
                       for x in carrier for y in carrier if x != y})
    raise StructureError(f"unknown kind {kind!r}")


def product(factors: Sequence[VObject], kind: Kind | None = None) -> VObject:
    """Cartesian product with the initial structure along the projections.

    Elements are tuples of factor elements; the empty product is the terminal
    one-point object on ``()``.
    """
    factors = list(factors)
    kind = _kind_of(factors, kind)
    carrier = tuple(itertools.product(*(f.carrier for f in factors)))
    if kind is Kind.SET:
        s = frozenset()
    elif kind in (Kind.REL, Kind.PREORD):
        s = frozenset((tuple(p[0] for p in combo), tuple(p[1] for p in combo))
                      for combo in itertools.product(*(f.structure for f in factors)))
    elif kind is Kind.SIMP:
        s = frozenset(frozenset(itertools.product(*combo))
                      for combo in itertools.product(*(f.structure for f in factors)))
    elif kind is Kind.PMET:
        s = Metric({(x, y): max((f.structure(a, b) for f, a, b in zip(factors, x, y)), default=0)
                    for x in carrier for y in carrier if x != y})
    else:  # pragma: no cover
        raise StructureError(f"unknown kind {kind!r}")
    return VObject.trusted(kind, carrier, s)


def restrict(obj: VObject, subset: Iterable) -> VObject:
    """Subobject on ``subset`` with the initial structure along the inclusion."""
    keep = set(subset)
    carrier = tuple(x for x in obj.carrier if x in keep)
    kind = obj.kind
    if kind is Kind.SET:
        s = frozenset()
    elif kind in (Kind.REL, Kind.PREORD):
        s = frozenset(p for p in obj.structure if p[0] in keep and p[1] in keep)
    elif kind is Kind.SIMP:
        s = maximal_sets(f & keep for f in obj.structure)
    else:
        s = Metric({k: v for k, v in obj.structure.finite_entries().items()
                    if k[0] in keep and k[1] in keep})
    return VObject.trusted(kind, carrier, s)


def image_object(obj: VObject, table: Mapping, target: Sequence) -> VObject:
    """``target`` carrying the final structure along a single map."""
    return VObject.trusted(obj.kind, target, final_lift(target, [(obj, table)], obj.kind))


# --------------------------------------------------------------------------
# enumeration


def fibre_cap(kind: Kind) -> int:
    env = os.environ.get("ENRALG_MAX_FIBRE")
    if env:
        return int(env)
    return DEFAULT_FIBRE_CAP


class FibreTooLarge(Unsupported):
    pass


def _closure_enumeration(bottom, atoms, join):
    seen = {bottom}
    frontier = [bottom]
    while frontier:
        nxt = []
        for s in frontier:
            for a in atoms:
                t = join(s, a)
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return seen


def enumerate_fibre(kind: Kind, carrier: Sequence, cap: int | None = None) -> Iterator:
    """Every structure on ``carrier`` exactly once, in a deterministic order."""
    carrier = tuple(carrier)
    if kind is Kind.PMET:
        raise Unsupported("PMet fibres are infinite")
    n = len(carrier)
    if kind is Kind.SET:
        yield frozenset()
        return
    limit = fibre_cap(kind) if cap is None else cap
    if n > limit:
        raise FibreTooLarge(f"{kind} fibre over {n} points exceeds the cap of {limit}")
    pairs = list(itertools.product(carrier, repeat=2))
    if kind is Kind.REL:
        for mask in range(1 << len(pairs)):
            yield frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)
        return
    idx = {x: i for i, x in enumerate(carrier)}
    if kind is Kind.PREORD:
        atoms = [p for p in pairs if p[0] != p[1]]
        found = _closure_enumeration(
            discrete(kind, carrier), atoms, lambda s, a: _closure_preord(carrier, s | {a}))
        key = lambda s: (len(s), sorted((idx[x], idx[y]) for x, y in s))
        yield from sorted(found, key=key)
        return
    if kind is Kind.SIMP:
        atoms = [frozenset(c) for r in range(2, n + 1) for c in itertools.combinations(carrier, r)]
        found = _closure_enumeration(
            discrete(kind, carrier), atoms, lambda s, a: maximal_sets(s | {a}))
        key = lambda s: (len(simplices(s)), sorted(sorted(idx[x] for x in f) for f in s))
        yield from sorted(found, key=key)
        return
    raise StructureError(f"unknown kind {kind!r}")  # pragma: no cover
