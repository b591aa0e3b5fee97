"""Command-line front end.

Exit status: 0 success, 1 semantic failure (invalid, differ, unsatisfied),
2 usage error, parse error or unsupported instance.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import io
from .algebra import is_homomorphism, satisfies, validate_algebra
from .congruence import NotACongruence, generated_congruence, quotient
from .free import Policy, free_theory
from .oracle import compare_free
from .signature import underlying_classical, validate_theory
from .structure import Unsupported
from .term import DEFAULT_MAX_DEPTH, TermSyntaxError, interpret, parse_term_with_context

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(out, fmt, data, text):
    out.write(io.dumps(data) if fmt == "json" else text.rstrip("\n") + "\n")


def _policy(args) -> Policy:
    return Policy(max_depth=args.depth, max_count=args.max_terms)


def cmd_free(args, out):
    theory = io.parse_theory_file(args.theory)
    gens = io.parse_generators(io.load_json(args.generators), theory)
    f = free_theory(theory, gens, _policy(args))
    data = io.render_free(f)
    lines = [f"free {theory.kind} algebra: exact={f.exact} omega_stages={f.omega_stages} "
             f"depth_reached={f.universe.depth_reached}"]
    for s, d in data["sorts"].items():
        lines.append(f"sort {s}: {len(d['classes'])} classes")
        for c in d["classes"]:
            extra = f"  = {', '.join(c['members'][1:])}" if len(c["members"]) > 1 else ""
            lines.append(f"  [{c['rep']}]{extra}")
        struct = {k: v for k, v in d["structure"].items() if k != "carrier"}
        if struct:
            lines.append(f"  structure: {json.dumps(struct)}")
    lines.append("unit: " + "; ".join(f"{s}: " + ", ".join(f"{x}->{v}" for x, v in m.items())
                                      for s, m in data["unit"].items()))
    if not f.exact:
        lines.append("warning: result is truncated; structure and classes are under-approximations")
    _emit(out, args.format, data, "\n".join(lines))
    return OK


def cmd_check_model(args, out):
    theory = io.parse_theory_file(args.theory)
    a = io.parse_algebra_file(args.algebra, theory)
    report = validate_algebra(a)
    eqs = []
    for i, e in enumerate(theory.equations):
        v = satisfies(a, e)
        eqs.append({"equation": i, "satisfied": v.ok,
                    "witness": {k: str(x) for k, x in v.witness.items()} if v.witness else None,
                    "message": v.message})
    ok = report.ok and all(e["satisfied"] for e in eqs)
    data = {"valid": report.ok, "issues": [str(i) for i in report.issues], "equations": eqs, "model": ok}
    lines = [f"algebra: {'valid' if report.ok else 'invalid'}"] + [f"  {i}" for i in report.issues]
    for e in eqs:
        lines.append(f"equation {e['equation']}: " + ("satisfied" if e["satisfied"] else
                                                       f"violated, witness {e['witness']} ({e['message']})"))
    _emit(out, args.format, data, "\n".join(lines))
    return OK if ok else FAIL


def cmd_check_hom(args, out):
    theory = io.parse_theory_file(args.theory)
    dom = io.parse_algebra_file(args.dom, theory)
    cod = io.parse_algebra_file(args.cod, theory)
    h = io.parse_homomorphism(io.load_json(args.map), dom, cod)
    v = is_homomorphism(h)
    data = {"homomorphism": v.ok, "message": v.message, "witness": v.witness}
    _emit(out, args.format, data, "homomorphism" if v.ok else f"not a homomorphism: {v.message}")
    return OK if v.ok else FAIL


def cmd_quotient(args, out):
    theory = io.parse_theory_file(args.theory)
    a = io.parse_algebra_file(args.algebra, theory)
    eqs = io.parse_equations(io.load_json(args.equations), theory) if args.equations else theory.equations
    c = generated_congruence(a, eqs)
    try:
        qa, q = quotient(a, c)
    except NotACongruence as exc:  # pragma: no cover - generated congruences are congruences
        _emit(out, args.format, {"error": str(exc)}, str(exc))
        return FAIL
    data = {"congruence": io.render_congruence(c), "quotient": io.algebra_to_json(qa),
            "map": {s: dict(m) for s, m in q.maps.items()}}
    lines = []
    for s, cls in data["congruence"].items():
        lines.append(f"sort {s}: " + " ".join("{" + ", ".join(cl) + "}" for cl in cls))
    _emit(out, args.format, data, "\n".join(lines))
    return OK


def cmd_eval(args, out):
    theory = io.parse_theory_file(args.theory)
    a = io.parse_algebra_file(args.algebra, theory)
    env = {}
    for item in args.env or []:
        if "=" not in item:
            raise UsageError(f"--env expects v=x, got {item!r}")
        k, v = item.split("=", 1)
        env[k.strip()] = v.strip()
    try:
        t, ctx = parse_term_with_context(args.term, theory.signature, dict.fromkeys(env), args.sort, infer=True)
    except TermSyntaxError as exc:
        raise UsageError(f"term: {exc}") from None
    for v, s in ctx.items():
        if v not in env:
            raise UsageError(f"variable {v!r} is not bound by --env")
        if s is None:
            raise UsageError(f"cannot infer the sort of {v!r}; pass --sort")
        if env[v] not in a.elements(s):
            raise UsageError(f"{env[v]!r} is not an element of sort {s}")
    value = interpret(t, a, env)
    _emit(out, args.format, {"term": args.term, "value": value}, str(value))
    return OK


def cmd_oracle(args, out):
    theory = io.parse_theory_file(args.theory)
    gens = io.parse_generators(io.load_json(args.generators), theory)
    rep = compare_free(theory, gens, max_depth=args.depth, max_count=args.max_terms or 200)
    data = {"status": rep.status, "message": rep.message, "sorts": rep.sorts}
    lines = [rep.status + (f" ({rep.message})" if rep.message else "")]
    for s, d in rep.sorts.items():
        if not d.get("equal", True):
            lines.append(f"  sort {s}: first difference {d.get('first_difference')}")
    _emit(out, args.format, data, "\n".join(lines))
    return {"equal": OK, "differ": FAIL}.get(rep.status, USAGE)


def cmd_info(args, out):
    theory = io.parse_theory_file(args.theory)
    report = validate_theory(theory)
    sig = theory.signature
    data = {"valid": report.ok, "instance": sig.kind.value, "cartesian_closed": sig.kind.cartesian_closed,
            "sorts": len(sig.sorts), "ops": len(sig.ops), "classical_symbols": len(underlying_classical(sig)),
            "equations": len(theory.equations), "issues": [str(i) for i in report.issues]}
    text = (f"{'valid' if report.ok else 'invalid'}: {sig.kind} theory, {len(sig.sorts)} sorts, "
            f"{len(sig.ops)} ops ({data['classical_symbols']} classical symbols), {len(theory.equations)} equations")
    _emit(out, args.format, data, "\n".join([text] + [f"  {i}" for i in report.issues]))
    return OK if report.ok else FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="enralg", description="Free algebras of enriched equational theories.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, *flags):
        sp = sub.add_parser(name)
        for f in flags:
            sp.add_argument(f"--{f}", required=True)
        sp.add_argument("--format", choices=["json", "text"], default="text")
        sp.set_defaults(func=func)
        return sp

    for name, func in (("free", cmd_free), ("oracle", cmd_oracle)):
        sp = add(name, func, "theory", "generators")
        sp.add_argument("--depth", type=int, default=DEFAULT_MAX_DEPTH if name == "free" else 8)
        sp.add_argument("--max-terms", type=int, default=None)
    add("check-model", cmd_check_model, "theory", "algebra")
    add("check-hom", cmd_check_hom, "theory", "dom", "cod", "map")
    sp = add("quotient", cmd_quotient, "theory", "algebra")
    sp.add_argument("--equations")
    sp = add("eval", cmd_eval, "theory", "algebra", "term")
    sp.add_argument("--env", action="append", help="v=x binding; repeatable")
    sp.add_argument("--sort")
    add("info", cmd_info, "theory")
    return p


def run(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args, out)
    except (io.SchemaError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except Unsupported as exc:
        msg = str(exc)
        print(msg if msg.startswith("unsupported") else f"unsupported: {msg}", file=sys.stderr)
        return USAGE


def main():
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
