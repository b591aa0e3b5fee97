"""Σ-algebras: validation, homomorphisms, satisfaction, indiscrete algebras."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Mapping

from .signature import EnrichedSignature, Report, SyntacticEquation
from .structure import (Kind, StructuredMap, VObject, admissibility_witness, indiscrete,
                        product, restrict)
from .term import interpret


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: Any = None
    message: str = ""

    def __bool__(self):
        return self.ok


class ShapeError(ValueError):
    pass


class Algebra:
    """Carrier objects per sort plus one table per classical symbol ``(op, point)``.

    Tables map argument tuples to results. A table may be partial, which only
    happens for algebras built on truncated term universes.
    """

    def __init__(self, signature: EnrichedSignature, carriers: Mapping[str, VObject],
                 tables: Mapping[tuple, Mapping[tuple, Any]]):
        self.signature = signature
        self.carriers = dict(carriers)
        self.tables = {k: dict(v) for k, v in tables.items()}
        for s in signature.sorts:
            if s not in self.carriers:
                raise ShapeError(f"no carrier for sort {s!r}")
            if self.carriers[s].kind is not signature.kind:
                raise ShapeError(f"carrier of {s!r} has kind {self.carriers[s].kind}, expected {signature.kind}")
        for o in signature.ops:
            for p in o.parameter.carrier:
                self.tables.setdefault((o.name, p), {})

    @property
    def kind(self) -> Kind:
        return self.signature.kind

    def elements(self, sort: str) -> tuple:
        return self.carriers[sort].carrier

    def apply(self, op: str, point, args: tuple):
        return self.tables[(op, point)].get(tuple(args))

    def arg_tuples(self, op: str):
        return itertools.product(*(self.elements(s) for s in self.signature.op(op).inputs))

    def missing_entries(self) -> list:
        out = []
        for o in self.signature.ops:
            for p in o.parameter.carrier:
                t = self.tables[(o.name, p)]
                out.extend((o.name, p, args) for args in self.arg_tuples(o.name) if args not in t)
        return out

    @property
    def total(self) -> bool:
        return not self.missing_entries()

    def joint_map(self, op: str) -> StructuredMap:
        """The map ``P × A_S1 × ... × A_Sn → A_S`` on the tuples where the table is defined."""
        o = self.signature.op(op)
        dom = product([o.parameter] + [self.carriers[s] for s in o.inputs], self.kind)
        table = {}
        for x in dom.carrier:
            v = self.tables[(op, x[0])].get(x[1:])
            if v is not None:
                table[x] = v
        if len(table) != len(dom.carrier):
            dom = restrict(dom, table)
        return StructuredMap(dom, self.carriers[o.output], table)

    def underlying(self) -> tuple:
        """Classical data: per-sort element tuples and the tables."""
        return ({s: self.elements(s) for s in self.signature.sorts},
                {k: dict(v) for k, v in self.tables.items()})

    def __eq__(self, other):
        return (isinstance(other, Algebra) and self.signature == other.signature
                and self.carriers == other.carriers and self.tables == other.tables)

    def __repr__(self):
        sizes = ", ".join(f"{s}:{len(self.carriers[s])}" for s in self.signature.sorts)
        return f"Algebra({self.kind}, {sizes})"


def validate_algebra(a: Algebra, allow_partial: bool = False) -> Report:
    """Totality, well-sortedness and admissibility of every joint operation map."""
    report = Report()
    sig = a.signature
    for o in sig.ops:
        out = set(a.elements(o.output))
        for p in o.parameter.carrier:
            path = f"ops.{o.name}[{p}]"
            table = a.tables[(o.name, p)]
            for args, v in table.items():
                if len(args) != o.arity or any(x not in a.elements(s) for x, s in zip(args, o.inputs)):
                    report.error(path, f"argument tuple {args!r} not over the input carriers")
                elif v not in out:
                    report.error(path, f"value {v!r} at {args!r} outside carrier of {o.output}")
            if not allow_partial:
                missing = [args for args in a.arg_tuples(o.name) if args not in table]
                if missing:
                    report.error(path, f"table undefined at {len(missing)} argument tuples, e.g. {missing[0]!r}")
        if not report.ok:
            continue
        w = admissibility_witness(a.joint_map(o.name))
        if w is not None:
            report.error(f"ops.{o.name}", f"joint map not admissible; witness {_show(w)}")
    return report


def _show(w):
    if isinstance(w, frozenset):
        return "{" + ", ".join(sorted(map(repr, w))) + "}"
    return repr(w)


# --------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True, eq=False)
class Homomorphism:
    dom: Algebra
    cod: Algebra
    maps: Mapping[str, Mapping]

    def __call__(self, sort, x):
        return self.maps[sort][x]

    def sort_map(self, sort: str) -> StructuredMap:
        return StructuredMap(self.dom.carriers[sort], self.cod.carriers[sort], self.maps[sort])

    def compose(self, after: "Homomorphism") -> "Homomorphism":
        return Homomorphism(self.dom, after.cod, {
            s: {x: after.maps[s][y] for x, y in m.items()} for s, m in self.maps.items()})


def identity(a: Algebra) -> Homomorphism:
    return Homomorphism(a, a, {s: {x: x for x in a.elements(s)} for s in a.signature.sorts})


def is_homomorphism(h: Homomorphism) -> Verdict:
    """Operation law on every defined table entry plus admissibility of each sort map."""
    sig = h.dom.signature
    if sig != h.cod.signature:
        raise ShapeError("homomorphism between algebras of different signatures")
    for s in sig.sorts:
        m = h.maps.get(s, {})
        for x in h.dom.elements(s):
            if x not in m or m[x] not in h.cod.elements(s):
                return Verdict(False, (s, x), f"sort map {s} undefined or out of range at {x!r}")
    for o in sig.ops:
        for p in o.parameter.carrier:
            for args, v in h.dom.tables[(o.name, p)].items():
                image_args = tuple(h.maps[s][x] for s, x in zip(o.inputs, args))
                lhs = h.maps[o.output][v]
                rhs = h.cod.apply(o.name, p, image_args)
                if lhs != rhs:
                    return Verdict(False, (o.name, p, args),
                                   f"h({o.name}[{p}]{args!r}) = {lhs!r} but {o.name}[{p}]{image_args!r} = {rhs!r}")
    for s in sig.sorts:
        w = admissibility_witness(h.sort_map(s))
        if w is not None:
            return Verdict(False, (s, w), f"sort map {s} not admissible at {_show(w)}")
    return Verdict(True)


# --------------------------------------------------------------------------
# satisfaction


def environments(a: Algebra, context) -> itertools.product:
    names = [v for v, _ in context]
    for values in itertools.product(*(a.elements(s) for _, s in context)):
        yield dict(zip(names, values))


def satisfies(a: Algebra, eq: SyntacticEquation) -> Verdict:
    """Both sides agree under every environment; a falsifying one is the witness.

    Environments where either side is undefined (partial algebras) are skipped.
    """
    for env in environments(a, eq.context):
        lhs = interpret(eq.lhs, a, env)
        rhs = interpret(eq.rhs, a, env)
        if lhs is None or rhs is None:
            continue
        if lhs != rhs:
            return Verdict(False, env, f"{eq.lhs} = {lhs!r} but {eq.rhs} = {rhs!r}")
    return Verdict(True)


def satisfies_all(a: Algebra, eqs) -> Verdict:
    for i, e in enumerate(eqs):
        v = satisfies(a, e)
        if not v:
            return Verdict(False, (i, v.witness), f"equation {i}: {v.message}")
    return Verdict(True)


def indiscrete_algebra(sig: EnrichedSignature, carriers: Mapping[str, tuple], tables: Mapping) -> Algebra:
    """The classical data equipped with indiscrete carrier structures."""
    objs = {s: VObject(sig.kind, tuple(carriers[s]), indiscrete(sig.kind, carriers[s])) for s in sig.sorts}
    return Algebra(sig, objs, tables)


def forget(a: Algebra) -> Algebra:
    """``indiscrete_algebra`` of the underlying classical algebra."""
    carriers, tables = a.underlying()
    return indiscrete_algebra(a.signature, carriers, tables)


def algebra_from_functions(sig: EnrichedSignature, carriers: Mapping[str, VObject], funcs: Mapping) -> Algebra:
    """Tabulate ``funcs[op](point, *args)`` over all argument tuples."""
    tables = {}
    for o in sig.ops:
        f = funcs[o.name]
        for p in o.parameter.carrier:
            tables[(o.name, p)] = {args: f(p, *args)
                                   for args in itertools.product(*(carriers[s].carrier for s in o.inputs))}
    return Algebra(sig, carriers, tables)
