import pytest

from conftest import disc, monoid_theory, stratified_theory, xor_monoid, z4_monoid
from enralg.algebra import Homomorphism, is_homomorphism
from enralg.congruence import (NotACongruence, SortedCongruence, close, generated_congruence, is_congruence,
                               kernel_congruence, quotient)
from enralg.oracle import classes_from_labels, naive_congruence
from enralg.signature import underlying_classical
from enralg.structure import Kind, indiscrete
from enralg.term import format_term, generate_terms


def test_stratified_seed_merge():
    t = stratified_theory()
    u = generate_terms(underlying_classical(t.signature), {"A": ("a",)}, sorts=t.signature.sorts)
    c = generated_congruence(u, t.equations)
    assert [[format_term(x, t.signature) for x in cl] for cl in c.classes["B"]] == [["f(a)", "g(a)"]]


def test_no_equations_gives_identity():
    u = generate_terms(underlying_classical(monoid_theory().signature), {"A": ("x",)}, max_depth=2)
    assert generated_congruence(u) == SortedCongruence.identity(u.sorts)


def test_monoid_classes_match_naive_oracle():
    t = monoid_theory()
    u = generate_terms(underlying_classical(t.signature), {"A": ("x",)}, max_depth=2)
    fast = generated_congruence(u, t.equations)
    slow = classes_from_labels(u, naive_congruence(u, t.equations))
    assert {s: [tuple(c) for c in cls] for s, cls in fast.classes.items()} == slow


def test_kernels():
    z4, x = z4_monoid(), xor_monoid()
    k = kernel_congruence(Homomorphism(z4, x, {"A": {i: i % 2 for i in range(4)}}))
    assert k.classes["A"] == ((0, 2), (1, 3))
    ident = kernel_congruence(Homomorphism(x, x, {"A": {0: 0, 1: 1}}))
    assert ident == SortedCongruence.identity({"A": (0, 1)})


def test_kernel_of_constant_map_is_one_class():
    z4 = z4_monoid()
    one = type(z4)(z4.signature, {"A": disc(Kind.SET, "*")}, {("m", "*"): {("*", "*"): "*"}, ("e", "*"): {(): "*"}})
    assert kernel_congruence(Homomorphism(z4, one, {"A": dict.fromkeys(range(4), "*")})).num_classes() == {"A": 1}


def test_is_congruence_witness():
    z4 = z4_monoid()
    assert is_congruence(z4, {"A": [[0, 1, 2, 3]]})
    assert is_congruence(z4, SortedCongruence.identity({"A": (0, 1, 2, 3)}))
    v = is_congruence(z4, {"A": [[0, 1], [2, 3]]})
    assert not v
    op, p, args1, v1, args2, v2 = v.witness
    assert op == "m" and {v1, v2} & {2, 3} and {v1, v2} & {0, 1}


def test_is_congruence_rejects_bad_partitions():
    z4 = z4_monoid()
    assert not is_congruence(z4, {"A": [[0, 1], [1, 2, 3]]})
    assert not is_congruence(z4, {"A": [[0, 1]]})


def test_quotients():
    x = xor_monoid(Kind.PREORD)
    qa, q = quotient(x, SortedCongruence.identity({"A": (0, 1)}))
    assert qa.tables == x.tables and is_homomorphism(q)
    one, q1 = quotient(x, {"A": [[0, 1]]})
    assert one.elements("A") == (0,)
    assert one.carriers["A"].structure == indiscrete(Kind.PREORD, (0,))
    with pytest.raises(NotACongruence):
        quotient(z4_monoid(), {"A": [[0, 1], [2, 3]]})


def test_quotient_structure_is_final():
    x = xor_monoid(Kind.REL, frozenset({(0, 1)}))
    one, _ = quotient(x, {"A": [[0, 1]]})
    assert one.carriers["A"].structure == frozenset({(0, 0)})


def test_close_propagates_through_applications():
    nodes = ["a", "b", "fa", "fb", "ffa", "ffb"]
    apps = [("f", ("a",), "fa"), ("f", ("b",), "fb"), ("f", ("fa",), "ffa"), ("f", ("fb",), "ffb")]
    roots = close(nodes, apps, [("a", "b")])
    assert roots["ffa"] == roots["ffb"] and roots["fa"] != roots["ffa"]
