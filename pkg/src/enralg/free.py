"""Free algebras over finite generator objects in the cartesian closed case.

The carrier structure of the free Σ-algebra is the supremum of an increasing
chain of final structures on the term set: stage 0 is induced by the
inclusion of generators, and stage n+1 adds the final structure induced by
every term-formation map out of ``P × stage_n(S1) × ... × stage_n(Sm)``.
The free T-algebra is the quotient of that by the congruence generated by the
equations, carrying the final structure along the class map.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .algebra import Algebra, Homomorphism, is_homomorphism, satisfies_all, validate_algebra
from .congruence import SortedCongruence, generated_congruence, quotient
from .signature import EnrichedSignature, Theory, underlying_classical
from .structure import (StructuredMap, Unsupported, VObject, admissibility_witness, discrete, fib_sup,
                        final_lift, product, restrict)
from .term import DEFAULT_MAX_DEPTH, App, Const, TermUniverse, generate_terms


@dataclass(frozen=True)
class Policy:
    max_depth: int = DEFAULT_MAX_DEPTH
    max_count: int | None = None
    max_stages: int = 10_000


class ExtensionError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True, eq=False)
class FreeAlgebra:
    algebra: Algebra
    unit: Mapping[str, StructuredMap]
    universe: TermUniverse
    exact: bool
    omega_stages: int
    generators: Mapping[str, VObject]
    theory: Theory
    congruence: SortedCongruence
    chain: tuple = field(default=(), repr=False)


def _require_cc(kind):
    if not kind.cartesian_closed:
        raise Unsupported(f"unsupported: instance {kind} is not cartesian closed")


def _generator_objects(sig: EnrichedSignature, generators: Mapping[str, VObject]) -> dict:
    out = {}
    for s in sig.sorts:
        g = generators.get(s)
        if g is None:
            g = VObject(sig.kind, (), discrete(sig.kind, ()))
        if g.kind is not sig.kind:
            raise ValueError(f"generators of {s!r} have kind {g.kind}, expected {sig.kind}")
        out[s] = g
    unknown = set(generators) - set(sig.sorts)
    if unknown:
        raise ValueError(f"generators for undeclared sorts {sorted(unknown)}")
    return out


def build_universe(sig: EnrichedSignature, generators: Mapping[str, VObject], policy: Policy) -> TermUniverse:
    return generate_terms(underlying_classical(sig),
                          {s: generators[s].carrier for s in sig.sorts},
                          policy.max_depth, policy.max_count, sorts=sig.sorts)


def inclusion(universe: TermUniverse, sort: str, gens: VObject) -> dict:
    return {x: Const(sort, x) for x in gens.carrier}


def _formation_map(sig, universe, op, stage):
    """Term formation out of ``P × stage(S1) × ... × stage(Sm)``, restricted to
    tuples whose result lies in the universe."""
    o = sig.op(op)
    factors = [o.parameter] + [VObject.trusted(sig.kind, universe.sorts[s], stage[s]) for s in o.inputs]
    dom = product(factors, sig.kind)
    members = universe.sorts[o.output]
    table = {}
    for x in dom.carrier:
        t = universe.apply(op, x[0], x[1:])
        if t is not None:
            table[x] = t
    if len(table) != len(dom.carrier):
        dom = restrict(dom, table)
    return dom, table, members


def omega_step(sig: EnrichedSignature, universe: TermUniverse, stage: Mapping) -> dict:
    """``stage ∨ (final structure induced by all term-formation maps)`` per sort."""
    nxt = {}
    for s in sig.sorts:
        sink = []
        for o in sig.ops_into(s):
            dom, table, _ = _formation_map(sig, universe, o.name, stage)
            sink.append((dom, table))
        induced = final_lift(universe.sorts[s], sink, sig.kind)
        nxt[s] = fib_sup(sig.kind, universe.sorts[s], [stage[s], induced])
    return nxt


def omega_chain(sig: EnrichedSignature, generators: Mapping[str, VObject], universe: TermUniverse,
                max_stages: int = 10_000) -> tuple[list, bool]:
    """Stages of the chain up to a fixpoint (or ``max_stages``) and whether it was reached."""
    _require_cc(sig.kind)
    gens = _generator_objects(sig, generators)
    stage = {s: final_lift(universe.sorts[s], [(gens[s], inclusion(universe, s, gens[s]))], sig.kind)
             for s in sig.sorts}
    chain = [stage]
    for _ in range(max_stages):
        nxt = omega_step(sig, universe, stage)
        if nxt == stage:
            return chain, True
        chain.append(nxt)
        stage = nxt
    return chain, False


def term_tables(sig: EnrichedSignature, universe: TermUniverse) -> dict:
    tables = {(o.name, p): {} for o in sig.ops for p in o.parameter.carrier}
    for terms in universe.sorts.values():
        for t in terms:
            if isinstance(t, App):
                tables[(t.op, t.point)][t.args] = t
    return tables


def _units(sig, gens, carriers, value) -> dict:
    return {s: StructuredMap(gens[s], carriers[s], {x: value(s, x) for x in gens[s].carrier})
            for s in sig.sorts}


def free_sigma(sig: EnrichedSignature, generators: Mapping[str, VObject], policy: Policy = Policy()) -> FreeAlgebra:
    """Term algebra carrying the supremum of the Ω chain."""
    _require_cc(sig.kind)
    gens = _generator_objects(sig, generators)
    universe = build_universe(sig, gens, policy)
    chain, fixpoint = omega_chain(sig, gens, universe, policy.max_stages)
    top = chain[-1]
    carriers = {s: VObject.trusted(sig.kind, universe.sorts[s], top[s]) for s in sig.sorts}
    algebra = Algebra(sig, carriers, term_tables(sig, universe))
    unit = _units(sig, gens, carriers, lambda s, x: Const(s, x))
    return FreeAlgebra(algebra, unit, universe, universe.finite and fixpoint, len(chain) - 1, gens,
                       Theory(sig, ()), SortedCongruence.identity(universe.sorts), tuple(chain))


def free_theory(t: Theory, generators: Mapping[str, VObject], policy: Policy = Policy()) -> FreeAlgebra:
    """Quotient of the free Σ-algebra by the congruence generated by the equations."""
    fs = free_sigma(t.signature, generators, policy)
    c = generated_congruence(fs.universe, t.equations)
    qa, q = quotient(fs.algebra, c)
    unit = {s: fs.unit[s].compose(q.sort_map(s)) for s in t.signature.sorts}
    return FreeAlgebra(qa, unit, fs.universe, fs.exact, fs.omega_stages, fs.generators, t, c, fs.chain)


def unit(f: FreeAlgebra) -> dict:
    return dict(f.unit)


def classical_free(t: Theory, generators: Mapping[str, tuple], policy: Policy = Policy()) -> tuple:
    """Classes and tables of the term algebra modulo the generated congruence, with no structure."""
    sig = t.signature
    universe = generate_terms(underlying_classical(sig), {s: tuple(generators.get(s, ())) for s in sig.sorts},
                              policy.max_depth, policy.max_count, sorts=sig.sorts)
    c = generated_congruence(universe, t.equations)
    tables = {}
    for (op, p), entries in term_tables(sig, universe).items():
        o = sig.op(op)
        tables[(op, p)] = {}
        for args, v in entries.items():
            key = tuple(c.rep(s, x) for s, x in zip(o.inputs, args))
            tables[(op, p)].setdefault(key, c.rep(o.output, v))
    return c, tables, universe


def evaluate_universe(universe: TermUniverse, target: Algebra, assignment: Mapping) -> dict:
    """Value in ``target`` of every universe term, constants by ``assignment``."""
    values = {}
    terms = sorted(((s, t) for s, ts in universe.sorts.items() for t in ts), key=lambda st: st[1].depth)
    for s, t in terms:
        if isinstance(t, Const):
            values[t] = assignment[s][t.name]
        else:
            values[t] = target.apply(t.op, t.point, tuple(values[a] for a in t.args))
    return values


def extend(f: FreeAlgebra, target: Algebra, assignment: Mapping[str, Mapping]) -> Homomorphism:
    """The unique homomorphism out of ``f`` that restricts to ``assignment`` along the unit."""
    sig = f.theory.signature
    if target.signature != sig:
        raise ExtensionError("target has a different signature")
    for s in sig.sorts:
        m = StructuredMap(f.generators[s], target.carriers[s], assignment.get(s, {}))
        w = admissibility_witness(m)
        if w is not None:
            raise ExtensionError(f"assignment at sort {s} is not admissible", (s, w))
    rep = validate_algebra(target)
    if not rep.ok:
        raise ExtensionError(f"target is not a valid algebra: {rep.errors[0]}")
    sat = satisfies_all(target, f.theory.equations)
    if not sat:
        raise ExtensionError(f"target violates the theory: {sat.message}", sat.witness)
    values = evaluate_universe(f.universe, target, assignment)
    maps = {}
    for s in sig.sorts:
        maps[s] = {}
        for cls in f.congruence.classes[s]:
            v = values[cls[0]]
            for t in cls[1:]:
                if values[t] != v:
                    raise ExtensionError(f"ill-defined on the class of {cls[0]}: {t} ↦ {values[t]!r} vs {v!r}",
                                         (cls[0], t))
            maps[s][cls[0]] = v
    h = Homomorphism(f.algebra, target, maps)
    v = is_homomorphism(h)
    if not v:
        raise ExtensionError(f"extension is not a homomorphism: {v.message}", v.witness)
    return h
