import pytest

from enralg import io
from enralg.algebra import algebra_from_functions
from enralg.signature import SyntacticEquation, Theory, make_signature
from enralg.structure import Kind, VObject, discrete, indiscrete, preorder_closure
from enralg.term import parse_term

_ACCEPTANCE: dict = {}


def chain(*names, kind=Kind.PREORD):
    """Finite chain ``names[0] ≤ names[1] ≤ ...``."""
    pairs = [(a, b) for i, a in enumerate(names) for b in names[i:]]
    if kind is Kind.PREORD:
        return VObject(kind, names, preorder_closure(names, pairs))
    return VObject(kind, names, frozenset(pairs))


def disc(kind, *names):
    return VObject(kind, names, discrete(kind, names))


def indisc(kind, *names):
    return VObject(kind, names, indiscrete(kind, names))


def eq(sig, context, sort, lhs, rhs):
    ctx = dict(context)
    return SyntacticEquation(tuple(context), sort, parse_term(lhs, sig, ctx, sort), parse_term(rhs, sig, ctx, sort))


def monoid_theory(kind=Kind.SET):
    sig = make_signature(kind, ["A"], [("m", ["A", "A"], "A"), ("e", [], "A")])
    return Theory(sig, (
        eq(sig, [("u", "A"), ("v", "A"), ("w", "A")], "A", "m(m(u, v), w)", "m(u, m(v, w))"),
        eq(sig, [("v", "A")], "A", "m(e, v)", "v"),
        eq(sig, [("v", "A")], "A", "m(v, e)", "v"),
    ))


def stratified_theory(kind=Kind.PREORD, with_equation=True):
    sig = make_signature(kind, ["A", "B"], [("f", ["A"], "B"), ("g", ["A"], "B")])
    eqs = (eq(sig, [("x", "A")], "B", "f(x)", "g(x)"),) if with_equation else ()
    return Theory(sig, eqs)


def rel_unary_theory():
    edge = VObject(Kind.REL, ("p", "q"), frozenset({("p", "q")}))
    return Theory(make_signature(Kind.REL, ["A"], [("f", ["A"], "A", edge)]), ())


def xor_monoid(kind=Kind.SET, structure=None):
    sig = monoid_theory(kind).signature
    carrier = disc(kind, 0, 1) if structure is None else VObject(kind, (0, 1), structure)
    return algebra_from_functions(sig, {"A": carrier}, {"m": lambda p, a, b: a ^ b, "e": lambda p: 0})


def z4_monoid(kind=Kind.SET):
    sig = monoid_theory(kind).signature
    return algebra_from_functions(sig, {"A": disc(kind, 0, 1, 2, 3)},
                                  {"m": lambda p, a, b: (a + b) % 4, "e": lambda p: 0})


def load_fixture_theory(name):
    return io.parse_theory_file(io.fixture_path(name))


@pytest.fixture
def record_acceptance():
    """Store a criterion's verdict for the terminal summary."""
    def record(number, ok, detail=""):
        _ACCEPTANCE.setdefault(number, []).append((ok, detail))
    return record


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.when == "call" and name.startswith("test_criterion_") and report.failed:
        _ACCEPTANCE.setdefault(int(name.split("_")[2]), []).append((False, f"{name} failed"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        entries = _ACCEPTANCE[number]
        ok = all(e[0] for e in entries)
        detail = "; ".join(d for _, d in entries if d)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
