import pytest

from conftest import monoid_theory, stratified_theory, xor_monoid
from enralg.signature import make_signature, underlying_classical
from enralg.structure import Kind
from enralg.term import (App, Const, TermOrder, TermSyntaxError, Var, canonical_compare, format_term,
                         generate_terms, interpret, parse_term)


def test_empty_signature_universe():
    u = generate_terms([], {"A": ("a", "b")})
    assert u.sorts["A"] == (Const("A", "a"), Const("A", "b")) and u.finite


@pytest.mark.parametrize("depth,count", [(0, 1), (1, 3), (2, 11)])
def test_monoid_term_counts(depth, count):
    csig = underlying_classical(monoid_theory().signature)
    u = generate_terms(csig, {"A": ("x",)}, max_depth=depth)
    assert len(u.sorts["A"]) == count
    assert not u.finite


def test_stratified_universe_is_finite():
    sig = stratified_theory().signature
    u = generate_terms(underlying_classical(sig), {"A": ("a",)}, sorts=sig.sorts)
    assert {format_term(t, sig) for t in u.sorts["B"]} == {"f(a)", "g(a)"}
    assert u.finite and u.depth_reached == 1


def test_term_cap_truncates_with_warning():
    csig = underlying_classical(monoid_theory().signature)
    u = generate_terms(csig, {"A": ("x",)}, max_depth=10, max_count=20)
    assert not u.finite and u.warning and u.size() <= 20


def test_parameter_points_become_symbols():
    from enralg.structure import VObject, discrete
    P = VObject(Kind.SET, ("p", "q", "r"), discrete(Kind.SET, "pqr"))
    sig = make_signature(Kind.SET, ["A"], [("c", [], "A", P)])
    assert [str(c) for c in underlying_classical(sig)] == ["c[p]", "c[q]", "c[r]"]


def test_interpret_examples():
    a = xor_monoid()
    sig = a.signature
    ctx = {"v": "A"}
    assert interpret(Var("v"), a, {"v": 1}) == 1
    assert interpret(parse_term("m(v, m(v, v))", sig, ctx), a, {"v": 1}) == 1
    assert interpret(parse_term("e", sig, {}), a, {}) == 0


def test_canonical_order():
    csig = underlying_classical(monoid_theory().signature)
    order = TermOrder(csig, {"A": ("x",)})
    x = Const("A", "x")
    e = App("e", "*", ())
    xx, xe = App("m", "*", (x, x)), App("m", "*", (x, e))
    assert canonical_compare(x, xx, order) < 0
    assert canonical_compare(xx, xe, order) < 0
    assert canonical_compare(xx, xx, order) == 0


def test_universe_respects_canonical_order_within_depth():
    csig = underlying_classical(monoid_theory().signature)
    u = generate_terms(csig, {"A": ("x",)}, max_depth=2)
    keys = [u.order.key(t) for t in u.sorts["A"]]
    assert keys == sorted(keys)


def test_parse_and_format_round_trip():
    sig = monoid_theory().signature
    t = parse_term("m(m(u, e), v)", sig, {"u": "A", "v": "A"})
    assert format_term(t, sig) == "m(m(u, e), v)"


def test_parse_errors_have_positions():
    sig = monoid_theory().signature
    with pytest.raises(TermSyntaxError, match="col"):
        parse_term("m(u, ", sig, {"u": "A"})
    with pytest.raises(TermSyntaxError):
        parse_term("k(u)", sig, {"u": "A"})
    with pytest.raises(TermSyntaxError):
        parse_term("m(u)", sig, {"u": "A"})
