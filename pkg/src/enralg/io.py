"""JSON file schemas: structured objects, theories, generators, algebras,
homomorphisms, and renderings of results."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from .algebra import Algebra, Homomorphism, ShapeError
from .signature import (EnrichedSignature, OperationSymbol, SyntacticEquation, Theory, terminal,
                        validate_theory)
from .structure import (INF, Kind, Metric, StructureError, VObject, maximal_sets, preorder_closure)
from .term import Const, TermSyntaxError, format_term, parse_term


class SchemaError(ValueError):
    """A file does not match its schema; ``path`` is a JSON path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def load_json(path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"malformed JSON in {path}: {exc.msg} at line {exc.lineno}, column {exc.colno}") \
            from None


def kind_from_tag(tag) -> Kind:
    for k in Kind:
        if k.value == tag:
            return k
    raise SchemaError("$.instance", f"unknown instance tag {tag!r}; expected one of "
                      + ", ".join(k.value for k in Kind))


def _expect(cond, path, msg):
    if not cond:
        raise SchemaError(path, msg)


# --------------------------------------------------------------------------
# structured objects


def parse_vobject(data, kind: Kind, path: str = "$") -> VObject:
    _expect(isinstance(data, dict), path, "object expected")
    _expect(isinstance(data.get("carrier"), list), path + ".carrier", "list of element names expected")
    carrier = tuple(dict.fromkeys(str(x) for x in data["carrier"]))
    elems = set(carrier)

    def elem(x, p):
        x = str(x)
        _expect(x in elems, p, f"{x!r} is not a carrier element")
        return x

    try:
        if kind is Kind.SET:
            return VObject(kind, carrier, frozenset())
        if kind in (Kind.REL, Kind.PREORD):
            pairs = []
            for i, pr in enumerate(data.get("relation", [])):
                p = f"{path}.relation[{i}]"
                _expect(isinstance(pr, list) and len(pr) == 2, p, "pair [x, y] expected")
                pairs.append((elem(pr[0], p), elem(pr[1], p)))
            if kind is Kind.PREORD:
                return VObject(kind, carrier, preorder_closure(carrier, pairs))
            return VObject(kind, carrier, frozenset(pairs))
        if kind is Kind.SIMP:
            sets = []
            for i, s in enumerate(data.get("simplices", [])):
                p = f"{path}.simplices[{i}]"
                _expect(isinstance(s, list) and s, p, "nonempty list of elements expected")
                sets.append(frozenset(elem(x, p) for x in s))
            sets.extend(frozenset([x]) for x in carrier)
            return VObject(kind, carrier, maximal_sets(sets))
        if kind is Kind.PMET:
            entries = {}
            for i, e in enumerate(data.get("distances", [])):
                p = f"{path}.distances[{i}]"
                _expect(isinstance(e, dict) and {"x", "y", "distance"} <= set(e), p,
                        "entry {x, y, distance} expected")
                entries[(elem(e["x"], p), elem(e["y"], p))] = str(e["distance"])
            sym = dict(entries)
            for (x, y), v in entries.items():
                sym.setdefault((y, x), v)
            return VObject(kind, carrier, Metric(sym))
    except StructureError as exc:
        raise SchemaError(path, str(exc)) from None
    raise SchemaError(path, f"unsupported kind {kind}")  # pragma: no cover


def format_distance(v) -> str:
    if v == INF:
        return "inf"
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def vobject_to_json(obj: VObject, name: Callable = str) -> dict:
    """Inverse of :func:`parse_vobject`; implied entries are omitted."""
    out: dict = {"carrier": [name(x) for x in obj.carrier]}
    order = {x: i for i, x in enumerate(obj.carrier)}
    kind = obj.kind
    if kind is Kind.REL:
        out["relation"] = [[name(x), name(y)] for x, y in sorted(obj.structure, key=lambda p: (order[p[0]], order[p[1]]))]
    elif kind is Kind.PREORD:
        out["relation"] = [[name(x), name(y)] for x, y in sorted(obj.structure, key=lambda p: (order[p[0]], order[p[1]]))
                           if x != y]
    elif kind is Kind.SIMP:
        facets = [sorted(f, key=order.get) for f in obj.structure if len(f) > 1]
        facets.sort(key=lambda f: (len(f), [order[x] for x in f]))
        out["simplices"] = [[name(x) for x in f] for f in facets]
    elif kind is Kind.PMET:
        out["distances"] = [{"x": name(x), "y": name(y), "distance": format_distance(obj.structure(x, y))}
                            for i, x in enumerate(obj.carrier) for y in obj.carrier[i + 1:]
                            if obj.structure(x, y) != INF]
    return out


# --------------------------------------------------------------------------
# theories


def parse_theory(data) -> Theory:
    _expect(isinstance(data, dict), "$", "object expected")
    _expect("instance" in data, "$.instance", "missing instance tag")
    kind = kind_from_tag(data["instance"])
    sorts = data.get("sorts", [])
    _expect(isinstance(sorts, list) and all(isinstance(s, str) for s in sorts), "$.sorts", "list of names expected")
    objects = {}
    for name, obj in (data.get("objects") or {}).items():
        objects[name] = parse_vobject(obj, kind, f"$.objects.{name}")
    ops = []
    for i, op in enumerate(data.get("ops", [])):
        p = f"$.ops[{i}]"
        _expect(isinstance(op, dict) and "name" in op and "output" in op, p, "operation needs name and output")
        param = op.get("parameter")
        if param is None:
            pobj = terminal(kind)
        else:
            _expect(param in objects, p + ".parameter", f"unknown object {param!r}")
            pobj = objects[param]
        ops.append(OperationSymbol(str(op["name"]), tuple(op.get("inputs", [])), op["output"], pobj))
    sig = EnrichedSignature(kind, tuple(sorts), tuple(ops))
    eqs = [parse_equation(e, sig, f"$.equations[{i}]") for i, e in enumerate(data.get("equations", []))]
    theory = Theory(sig, tuple(eqs))
    report = validate_theory(theory)
    if not report.ok:
        raise SchemaError("$", "invalid theory:\n  " + "\n  ".join(map(str, report.errors)))
    return theory


def parse_equation(data, sig: EnrichedSignature, path: str) -> SyntacticEquation:
    _expect(isinstance(data, dict), path, "object expected")
    for key in ("sort", "lhs", "rhs"):
        _expect(key in data, f"{path}.{key}", "missing")
    ctx = []
    for j, c in enumerate(data.get("context", [])):
        _expect(isinstance(c, list) and len(c) == 2, f"{path}.context[{j}]", "[variable, sort] expected")
        ctx.append((str(c[0]), str(c[1])))
    sides = []
    for key in ("lhs", "rhs"):
        try:
            sides.append(parse_term(data[key], sig, dict(ctx), data["sort"]))
        except TermSyntaxError as exc:
            raise SchemaError(f"{path}.{key}", str(exc)) from None
    return SyntacticEquation(tuple(ctx), data["sort"], sides[0], sides[1])


def parse_theory_file(path) -> Theory:
    return parse_theory(load_json(path))


def theory_to_json(t: Theory) -> dict:
    sig = t.signature
    objects = {}
    ops = []
    for o in sig.ops:
        entry = {"name": o.name, "inputs": list(o.inputs), "output": o.output}
        if o.parameter != terminal(sig.kind):
            objects[f"P_{o.name}"] = vobject_to_json(o.parameter)
            entry["parameter"] = f"P_{o.name}"
        ops.append(entry)
    return {
        "instance": sig.kind.value,
        "sorts": list(sig.sorts),
        "objects": objects,
        "ops": ops,
        "equations": [{"context": [list(c) for c in e.context], "sort": e.sort,
                       "lhs": format_term(e.lhs, sig), "rhs": format_term(e.rhs, sig)} for e in t.equations],
    }


def parse_generators(data, theory: Theory) -> dict:
    if isinstance(data, dict) and "generators" in data:
        data = data["generators"]
        base = "$.generators"
    else:
        base = "$"
    _expect(isinstance(data, dict), base, "mapping from sort to object expected")
    sig = theory.signature
    out = {}
    for s, obj in data.items():
        _expect(s in sig.sorts, f"{base}.{s}", f"undeclared sort {s!r}")
        v = parse_vobject(obj, sig.kind, f"{base}.{s}")
        for x in v.carrier:
            _expect(not (sig.has_op(x) and sig.op(x).arity == 0), f"{base}.{s}",
                    f"generator {x!r} clashes with a constant operation")
        out[s] = v
    return out


def parse_equations(data, theory: Theory) -> tuple:
    if isinstance(data, dict):
        data = data.get("equations", [])
    return tuple(parse_equation(e, theory.signature, f"$.equations[{i}]") for i, e in enumerate(data))


# --------------------------------------------------------------------------
# algebras


def parse_algebra(data, theory: Theory) -> Algebra:
    sig = theory.signature
    _expect(isinstance(data, dict), "$", "object expected")
    carriers = {}
    for s in sig.sorts:
        _expect(s in data.get("carriers", {}), f"$.carriers.{s}", "missing carrier")
        carriers[s] = parse_vobject(data["carriers"][s], sig.kind, f"$.carriers.{s}")
    tables: dict = {}
    ops = data.get("ops", {})
    for o in sig.ops:
        entries = ops.get(o.name, [])
        base = f"$.ops.{o.name}"
        for p in o.parameter.carrier:
            tables[(o.name, p)] = {}
        for i, e in enumerate(entries):
            path = f"{base}[{i}]"
            _expect(isinstance(e, dict) and "value" in e, path, "entry {point, args, value} expected")
            point = e.get("point")
            if point is None:
                _expect(len(o.parameter.carrier) == 1, path + ".point", "point required")
                point = o.parameter.carrier[0]
            point = str(point)
            _expect(point in o.parameter.carrier, path + ".point", f"{point!r} is not a parameter point")
            args = tuple(str(x) for x in e.get("args", []))
            _expect(len(args) == o.arity, path + ".args", f"{o.arity} arguments expected")
            for x, s in zip(args, o.inputs):
                _expect(x in carriers[s].carrier, path + ".args", f"{x!r} is not an element of sort {s}")
            v = str(e["value"])
            _expect(v in carriers[o.output].carrier, path + ".value", f"{v!r} is not an element of sort {o.output}")
            tables[(o.name, point)][args] = v
    try:
        a = Algebra(sig, carriers, tables)
    except ShapeError as exc:
        raise SchemaError("$", str(exc)) from None
    missing = a.missing_entries()
    if missing:
        shown = ", ".join(f"{op}[{p}]({', '.join(args)})" for op, p, args in missing[:20])
        more = f" and {len(missing) - 20} more" if len(missing) > 20 else ""
        raise SchemaError("$.ops", f"partial operation tables; missing {shown}{more}")
    return a


def parse_algebra_file(path, theory: Theory) -> Algebra:
    return parse_algebra(load_json(path), theory)


def algebra_to_json(a: Algebra, name: Callable = str) -> dict:
    sig = a.signature
    ops = {}
    for o in sig.ops:
        rows = []
        for p in o.parameter.carrier:
            for args, v in a.tables[(o.name, p)].items():
                rows.append({"point": name(p) if isinstance(p, str) else str(p),
                             "args": [name(x) for x in args], "value": name(v)})
        ops[o.name] = rows
    return {"carriers": {s: vobject_to_json(a.carriers[s], name) for s in sig.sorts}, "ops": ops}


def parse_homomorphism(data, dom: Algebra, cod: Algebra) -> Homomorphism:
    _expect(isinstance(data, dict) and isinstance(data.get("maps"), dict), "$.maps", "mapping per sort expected")
    maps = {}
    for s in dom.signature.sorts:
        m = data["maps"].get(s, {})
        _expect(isinstance(m, dict), f"$.maps.{s}", "object expected")
        maps[s] = {str(k): str(v) for k, v in m.items()}
    return Homomorphism(dom, cod, maps)


# --------------------------------------------------------------------------
# rendering


def term_namer(sig: EnrichedSignature) -> Callable:
    def name(x):
        if isinstance(x, str):
            return x
        if isinstance(x, Const):
            return str(x.name)
        return format_term(x, sig)
    return name


def render_free(f) -> dict:
    sig = f.algebra.signature
    name = term_namer(sig)
    sorts = {}
    for s in sig.sorts:
        sorts[s] = {
            "classes": [{"rep": name(c[0]), "members": [name(t) for t in c]} for c in f.congruence.classes[s]],
            "structure": vobject_to_json(f.algebra.carriers[s], name),
        }
    return {
        "instance": sig.kind.value,
        "exact": f.exact,
        "finite_universe": f.universe.finite,
        "depth_reached": f.universe.depth_reached,
        "omega_stages": f.omega_stages,
        "sorts": sorts,
        "unit": {s: {str(x): name(v) for x, v in f.unit[s].table.items()} for s in sig.sorts},
        "operations": algebra_to_json(f.algebra, name)["ops"],
    }


def render_congruence(c, name: Callable = str) -> dict:
    return {s: [[name(x) for x in cl] for cl in cls] for s, cls in c.classes.items()}


def dumps(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False, default=_default) + "\n"


def _default(x):
    if isinstance(x, Fraction):
        return format_distance(x)
    if isinstance(x, (frozenset, set)):
        return sorted(map(str, x))
    if isinstance(x, tuple):
        return list(x)
    return str(x)


FIXTURES = Path(__file__).with_name("fixtures")


def fixture_path(name: str) -> Path:
    """Path of a bundled example file."""
    return FIXTURES / name
