import pytest

from conftest import chain, indisc, monoid_theory, rel_unary_theory, stratified_theory
from enralg.free import Policy, free_sigma, free_theory
from enralg.oracle import (OracleRefused, brute_force_free, compare_free, compare_structures, is_sigma_compatible,
                           is_theory_compatible)
from enralg.signature import EnrichedSignature, Theory, make_signature
from enralg.structure import Kind, Metric, VObject, discrete, indiscrete
from enralg.term import Const


def _stratified():
    t = stratified_theory()
    gens = {"A": chain("a", "b")}
    return t, gens, free_theory(t, gens)


def test_indiscrete_always_compatible():
    t, gens, f = _stratified()
    u = f.universe
    b = {s: indiscrete(Kind.PREORD, u.sorts[s]) for s in u.sorts}
    assert is_sigma_compatible(b, t.signature, gens, u)
    q = {s: indiscrete(Kind.PREORD, f.algebra.elements(s)) for s in u.sorts}
    assert is_theory_compatible(q, t, gens, u)


def test_discrete_fails_at_unit():
    t, gens, f = _stratified()
    u = f.universe
    r = is_sigma_compatible({s: discrete(Kind.PREORD, u.sorts[s]) for s in u.sorts}, t.signature, gens, u)
    assert not r and r.condition == "unit"
    q = {s: discrete(Kind.PREORD, f.algebra.elements(s)) for s in u.sorts}
    r = is_theory_compatible(q, t, gens, u)
    assert not r and r.condition == "unit"


def test_computed_structures_are_compatible():
    t, gens, f = _stratified()
    fs = free_sigma(t.signature, gens)
    assert is_sigma_compatible({s: fs.algebra.carriers[s].structure for s in t.signature.sorts},
                               t.signature, gens, fs.universe)
    assert is_theory_compatible({s: f.algebra.carriers[s].structure for s in t.signature.sorts}, t, gens, f.universe)


def test_oracle_refuses_truncated_universe():
    t = monoid_theory()
    fs = free_sigma(t.signature, {"A": indisc(Kind.SET, "x")}, Policy(max_depth=1))
    with pytest.raises(OracleRefused):
        is_sigma_compatible({"A": frozenset()}, t.signature, {"A": indisc(Kind.SET, "x")}, fs.universe)
    with pytest.raises(OracleRefused):
        brute_force_free(t, {"A": indisc(Kind.SET, "x")}, max_depth=1)


def test_brute_force_empty_signature_is_image():
    g = chain("a", "b", "c")
    r = brute_force_free(EnrichedSignature(Kind.PREORD, ("A",)), {"A": g})
    assert r.structures["A"] == {(Const("A", x), Const("A", y)) for x, y in g.structure}


def test_brute_force_rel_unary_truncated():
    t = rel_unary_theory()
    gens = {"A": indisc(Kind.REL, "*")}
    r = brute_force_free(t, gens, max_depth=1, allow_truncated=True)
    fs = free_sigma(t.signature, gens, Policy(max_depth=1))
    assert r.structures["A"] == fs.algebra.carriers["A"].structure


def test_brute_force_stratified():
    t, gens, f = _stratified()
    r = brute_force_free(t, gens)
    assert r.structures == {s: f.algebra.carriers[s].structure for s in t.signature.sorts}


def test_compare_free_equal_and_corrupted():
    t, gens, f = _stratified()
    assert compare_free(t, gens).status == "equal"
    r = brute_force_free(t, gens)
    fast = {s: f.algebra.carriers[s].structure for s in t.signature.sorts}
    a, b = r.carriers["B"]
    fast["B"] = fast["B"] | {(b, a)}
    rep = compare_structures(Kind.PREORD, r.carriers, fast, r.structures)
    assert rep.status == "differ"
    diff = rep.sorts["B"]["first_difference"]
    assert diff == {"item": (b, a), "construction": True, "oracle": False}


def test_compare_free_pmet_unsupported():
    sig = make_signature(Kind.PMET, ["A"], [])
    rep = compare_free(Theory(sig, ()), {"A": VObject(Kind.PMET, ("x",), Metric())})
    assert rep.status == "unsupported"


def test_compare_free_refuses_large_fibres():
    sig = EnrichedSignature(Kind.REL, ("A",))
    g = VObject(Kind.REL, "abc", frozenset())
    assert compare_free(Theory(sig, ()), {"A": g}, cap=2).status == "unsupported"
