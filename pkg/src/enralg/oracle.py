"""Brute-force free structures: the infimum of all compatible fibre elements.

Everything here is deliberately naive and shares no code with the Ω-chain or
the union-find closure beyond the structure-category primitives.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping

from .signature import EnrichedSignature, Theory, underlying_classical
from .structure import (Kind, StructuredMap, Unsupported, VObject, admissibility_witness,
                        diff_structures, discrete, enumerate_fibre, fib_inf, product, restrict, table_admissible)
from .term import App, Const, TermUniverse, Var, generate_terms


class OracleRefused(Unsupported):
    pass


@dataclass(frozen=True)
class CompatReport:
    verdict: bool
    condition: str = ""  # "unit" or the operation name
    witness: Any = None

    def __bool__(self):
        return self.verdict


def _check_universe(universe: TermUniverse, allow_truncated: bool):
    if not universe.finite and not allow_truncated:
        raise OracleRefused("compatibility is only checked on a complete (finite) term universe")


def _gens(sig, generators):
    return {s: generators.get(s) or VObject(sig.kind, (), discrete(sig.kind, ())) for s in sig.sorts}


# --------------------------------------------------------------------------
# naive classical congruence


def substitute(t, env):
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, App):
        return App(t.op, t.point, tuple(substitute(a, env) for a in t.args))
    return t


def naive_congruence(universe: TermUniverse, equations=(), seeds=()) -> dict:
    """Class label per ``(sort, term)``: brute-force equation instances, then
    merge results of equally-labelled applications until nothing changes."""
    label = {(s, t): (s, t) for s, ts in universe.sorts.items() for t in ts}

    def merge(a, b):
        la, lb = label[a], label[b]
        if la == lb:
            return False
        for k, v in label.items():
            if v == lb:
                label[k] = la
        return True

    for e in equations:
        names = [v for v, _ in e.context]
        for values in itertools.product(*(universe.sorts[s] for _, s in e.context)):
            env = dict(zip(names, values))
            l, r = substitute(e.lhs, env), substitute(e.rhs, env)
            if (e.sort, l) in label and (e.sort, r) in label:
                merge((e.sort, l), (e.sort, r))
    for a, b in seeds:
        merge(a, b)
    out_sort = {c.op: c.output for c in universe.csig}
    in_sorts = {c.op: c.inputs for c in universe.csig}
    apps = [(out_sort[t.op], t) for s, ts in universe.sorts.items() for t in ts if isinstance(t, App)]
    changed = True
    while changed:
        changed = False
        for (s1, t1), (s2, t2) in itertools.combinations(apps, 2):
            if (t1.op, t1.point) != (t2.op, t2.point):
                continue
            if all(label[(s, x)] == label[(s, y)] for s, x, y in zip(in_sorts[t1.op], t1.args, t2.args)):
                if merge((s1, t1), (s2, t2)):
                    changed = True
    return label


def classes_from_labels(universe: TermUniverse, label: Mapping) -> dict:
    """Per sort, classes in universe order, each listing members in universe order."""
    out = {}
    for s, ts in universe.sorts.items():
        groups: dict = {}
        for t in ts:
            groups.setdefault(label[(s, t)], []).append(t)
        out[s] = [tuple(g) for g in groups.values()]
    return out


# --------------------------------------------------------------------------
# compatibility


def _formation(sig, universe, op, carriers, structures, rep):
    """``(p, [t1], ..., [tn]) ↦ [op[p](t1, ..., tn)]`` on the given carriers."""
    o = sig.op(op)
    factors = [o.parameter] + [VObject.trusted(sig.kind, carriers[s], structures[s]) for s in o.inputs]
    dom = product(factors, sig.kind)
    table = {}
    members = set(universe.sorts[o.output])
    for x in dom.carrier:
        t = App(op, x[0], x[1:])
        if t in members:
            table[x] = rep(o.output, t)
    if len(table) != len(dom.carrier):
        dom = restrict(dom, table)
    return dom, table


def _compat(sig, universe, generators, carriers, b, rep):
    gens = _gens(sig, generators)
    for s in sig.sorts:
        cod = VObject.trusted(sig.kind, carriers[s], b[s])
        eta = StructuredMap(gens[s], cod, {x: rep(s, Const(s, x)) for x in gens[s].carrier})
        w = admissibility_witness(eta)
        if w is not None:
            return CompatReport(False, "unit", (s, w))
    for o in sig.ops:
        dom, table = _formation(sig, universe, o.name, carriers, b, rep)
        cod = VObject.trusted(sig.kind, carriers[o.output], b[o.output])
        w = admissibility_witness(StructuredMap(dom, cod, table))
        if w is not None:
            return CompatReport(False, o.name, w)
    return CompatReport(True)


def is_sigma_compatible(b: Mapping, sig: EnrichedSignature, generators: Mapping, universe: TermUniverse,
                        allow_truncated: bool = False) -> CompatReport:
    """Unit admissible into ``b`` and every term-formation map admissible."""
    _check_universe(universe, allow_truncated)
    return _compat(sig, universe, generators, universe.sorts, b, lambda s, t: t)


def is_theory_compatible(b: Mapping, theory: Theory, generators: Mapping, universe: TermUniverse,
                         classes: Mapping | None = None, allow_truncated: bool = False) -> CompatReport:
    """As :func:`is_sigma_compatible`, on the classes of the generated congruence."""
    _check_universe(universe, allow_truncated)
    if classes is None:
        classes = classes_from_labels(universe, naive_congruence(universe, theory.equations))
    rep_of = {(s, t): c[0] for s, cls in classes.items() for c in cls for t in c}
    carriers = {s: tuple(c[0] for c in cls) for s, cls in classes.items()}
    return _compat(theory.signature, universe, generators, carriers, b, lambda s, t: rep_of[(s, t)])


# --------------------------------------------------------------------------
# brute force


@dataclass
class BruteForceResult:
    structures: dict
    carriers: dict
    classes: dict
    compatible_count: int
    universe: TermUniverse = field(repr=False)


def brute_force_free(theory, generators: Mapping, max_depth: int = 8, max_count: int = 200,
                     allow_truncated: bool = False, cap: int | None = None) -> BruteForceResult:
    """Infimum of every compatible structure, enumerating the product of per-sort fibres.

    Candidates failing unit admissibility at a sort are dropped before any
    operation is checked; each operation is checked as soon as all of its
    sorts have been assigned.
    """
    if isinstance(theory, EnrichedSignature):
        theory = Theory(theory, ())
    sig = theory.signature
    kind = sig.kind
    if not kind.enumerable:
        raise OracleRefused(f"unsupported: {kind} fibres cannot be enumerated")
    gens = _gens(sig, generators)
    universe = generate_terms(underlying_classical(sig), {s: gens[s].carrier for s in sig.sorts},
                              max_depth, max_count, sorts=sig.sorts)
    _check_universe(universe, allow_truncated)
    label = naive_congruence(universe, theory.equations) if theory.equations else \
        {(s, t): (s, t) for s, ts in universe.sorts.items() for t in ts}
    classes = classes_from_labels(universe, label)
    rep_of = {(s, t): c[0] for s, cls in classes.items() for c in cls for t in c}
    rep = lambda s, t: rep_of[(s, t)]
    carriers = {s: tuple(c[0] for c in cls) for s, cls in classes.items()}

    candidates = {}
    for s in sig.sorts:
        eta = {x: rep(s, Const(s, x)) for x in gens[s].carrier}
        candidates[s] = [b for b in enumerate_fibre(kind, carriers[s], cap)
                         if table_admissible(kind, gens[s].carrier, eta, gens[s].structure, b)]

    order = list(sig.sorts)
    pos = {s: i for i, s in enumerate(order)}
    checks_at = [[] for _ in order]
    for o in sig.ops:
        checks_at[max(pos[s] for s in (*o.inputs, o.output))].append(o.name)
    dom_cache: dict = {}

    def op_ok(op, assigned):
        o = sig.op(op)
        key = (op, tuple(assigned[s] for s in o.inputs))
        hit = dom_cache.get(key)
        if hit is None:
            hit = dom_cache[key] = _formation(sig, universe, op, carriers, assigned, rep)
        dom, table = hit
        return table_admissible(kind, dom.carrier, table, dom.structure, assigned[o.output])

    meet: dict = {s: None for s in order}
    count = 0
    assigned: dict = {}

    def rec(k):
        nonlocal count
        if k == len(order):
            count += 1
            for s in order:
                meet[s] = assigned[s] if meet[s] is None else fib_inf(kind, carriers[s], [meet[s], assigned[s]])
            return
        s = order[k]
        for b in candidates[s]:
            assigned[s] = b
            if all(op_ok(op, assigned) for op in checks_at[k]):
                rec(k + 1)
        assigned.pop(s, None)

    rec(0)
    structures = {s: meet[s] if meet[s] is not None else fib_inf(kind, carriers[s], []) for s in order}
    return BruteForceResult(structures, carriers, classes, count, universe)


# --------------------------------------------------------------------------
# comparison


@dataclass
class CompareReport:
    status: str  # "equal" | "differ" | "unsupported"
    sorts: dict = field(default_factory=dict)
    message: str = ""

    @property
    def equal(self) -> bool:
        return self.status == "equal"


def compare_structures(kind: Kind, carriers: Mapping, fast: Mapping, brute: Mapping) -> CompareReport:
    per = {}
    status = "equal"
    for s, carrier in carriers.items():
        d = diff_structures(kind, carrier, fast[s], brute[s])
        per[s] = {"equal": d is None}
        if d is not None:
            status = "differ"
            item, in_fast, in_brute = d
            per[s]["first_difference"] = {"item": item, "construction": in_fast, "oracle": in_brute}
    return CompareReport(status, per)


def compare_free(theory: Theory, generators: Mapping, max_depth: int = 8, max_count: int = 200,
                 cap: int | None = None) -> CompareReport:
    """Run the Ω/quotient pipeline and the brute-force infimum, and compare."""
    from .free import Policy, free_theory
    kind = theory.kind
    if not kind.cartesian_closed or not kind.enumerable:
        return CompareReport("unsupported", message=f"unsupported: {kind} fibres cannot be enumerated")
    try:
        brute = brute_force_free(theory, generators, max_depth, max_count, cap=cap)
    except Unsupported as exc:
        return CompareReport("unsupported", message=str(exc))
    fast = free_theory(theory, generators, Policy(max_depth=max_depth, max_count=max_count))
    if not fast.exact:
        return CompareReport("unsupported", message="construction did not reach an exact result")
    fast_carriers = {s: fast.algebra.elements(s) for s in theory.signature.sorts}
    if fast_carriers != brute.carriers:
        bad = next(s for s in fast_carriers if fast_carriers[s] != brute.carriers[s])
        return CompareReport("differ", {bad: {"equal": False, "classes": "differ"}},
                             f"congruence classes differ at sort {bad}")
    fast_structs = {s: fast.algebra.carriers[s].structure for s in fast_carriers}
    rep = compare_structures(kind, fast_carriers, fast_structs, brute.structures)
    rep.message = f"{brute.compatible_count} compatible structures enumerated"
    return rep
