import io as stdio
import json
from fractions import Fraction

import pytest

from enralg import io
from enralg.cli import run
from enralg.structure import INF, Kind, Metric, VObject, maximal_sets


def fx(name):
    return str(io.fixture_path(name))


def call(*argv):
    out = stdio.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_info_monoid(capsys):
    code, out = call("info", "--theory", fx("monoid.json"))
    assert code == 0 and out.startswith("valid") and "1 sorts, 2 ops" in out


def test_oracle_stratified():
    code, out = call("oracle", "--theory", fx("stratified.json"), "--generators", fx("stratified_generators.json"))
    assert code == 0 and out.startswith("equal")


def test_free_pmet_unsupported(capsys):
    code, _ = call("free", "--theory", fx("pmet_scaling.json"), "--generators", fx("pmet_generators.json"))
    assert code == 2
    assert "unsupported: instance PMet is not cartesian closed" in capsys.readouterr().err


def test_oracle_pmet_unsupported():
    code, out = call("oracle", "--theory", fx("pmet_scaling.json"), "--generators", fx("pmet_generators.json"))
    assert code == 2 and out.startswith("unsupported")


def test_free_json_output():
    code, out = call("free", "--theory", fx("stratified.json"), "--generators", fx("stratified_generators.json"),
                     "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["exact"] and data["instance"] == "Preord"
    assert [c["rep"] for c in data["sorts"]["B"]["classes"]] == ["f(a)", "f(b)"]
    assert data["sorts"]["B"]["structure"]["relation"] == [["f(a)", "f(b)"]]


def test_free_truncated_warns():
    code, out = call("free", "--theory", fx("monoid.json"), "--generators", fx("monoid_generators.json"),
                     "--depth", "2")
    assert code == 0 and "truncated" in out and "sort A: 5 classes" in out


def test_check_model_and_hom():
    assert call("check-model", "--theory", fx("monoid.json"), "--algebra", fx("xor_monoid.json"))[0] == 0
    assert call("check-model", "--theory", fx("preord_monoid.json"), "--algebra", fx("and_monoid.json"))[0] == 0
    assert call("check-hom", "--theory", fx("monoid.json"), "--dom", fx("z4_monoid.json"),
                "--cod", fx("xor_monoid.json"), "--map", fx("parity.json"))[0] == 0


def test_check_model_reports_violation(tmp_path):
    data = json.loads(io.fixture_path("xor_monoid.json").read_text())
    data["ops"]["e"] = [{"args": [], "value": "1"}]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    code, out = call("check-model", "--theory", fx("monoid.json"), "--algebra", str(p))
    assert code == 1 and "violated" in out


def test_check_hom_failure(tmp_path):
    p = tmp_path / "map.json"
    p.write_text(json.dumps({"maps": {"A": {"0": "0", "1": "1", "2": "1", "3": "0"}}}))
    code, out = call("check-hom", "--theory", fx("monoid.json"), "--dom", fx("z4_monoid.json"),
                     "--cod", fx("xor_monoid.json"), "--map", str(p))
    assert code == 1 and out.startswith("not a homomorphism")


def test_eval_and_quotient(tmp_path):
    code, out = call("eval", "--theory", fx("monoid.json"), "--algebra", fx("xor_monoid.json"),
                     "--term", "m(v, m(v, v))", "--env", "v=1")
    assert (code, out) == (0, "1\n")
    eqs = tmp_path / "eqs.json"
    eqs.write_text(json.dumps({"equations": [{"context": [["u", "A"]], "sort": "A", "lhs": "m(u, u)", "rhs": "e"}]}))
    code, out = call("quotient", "--theory", fx("monoid.json"), "--algebra", fx("z4_monoid.json"),
                     "--equations", str(eqs))
    assert code == 0 and out == "sort A: {0, 2} {1, 3}\n"


def test_eval_usage_errors():
    assert call("eval", "--theory", fx("monoid.json"), "--algebra", fx("xor_monoid.json"), "--term", "m(v, w)",
                "--env", "v=1")[0] == 2
    assert call("eval", "--theory", fx("monoid.json"), "--algebra", fx("xor_monoid.json"), "--term", "m(v",
                "--env", "v=1")[0] == 2


def test_usage_and_parse_errors(tmp_path, capsys):
    assert call()[0] == 2
    assert call("free", "--theory", fx("monoid.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"instance": "Set",\n "sorts": [}')
    assert call("info", "--theory", str(bad))[0] == 2
    assert "line 2" in capsys.readouterr().err
    bad.write_text(json.dumps({"instance": "Top", "sorts": []}))
    assert call("info", "--theory", str(bad))[0] == 2
    assert "'Top'" in capsys.readouterr().err
    assert call("info", "--theory", str(tmp_path / "missing.json"))[0] == 2


def test_partial_algebra_file_is_rejected(tmp_path):
    data = json.loads(io.fixture_path("xor_monoid.json").read_text())
    data["ops"]["m"] = data["ops"]["m"][:3]
    p = tmp_path / "partial.json"
    p.write_text(json.dumps(data))
    with pytest.raises(io.SchemaError, match=r"m\[\*\]\(1, 1\)"):
        io.parse_algebra_file(p, io.parse_theory_file(io.fixture_path("monoid.json")))


def test_invalid_theory_file_surfaces_issues(tmp_path):
    data = json.loads(io.fixture_path("monoid.json").read_text())
    data["equations"][1]["lhs"] = "m(e, w)"
    p = tmp_path / "t.json"
    p.write_text(json.dumps(data))
    with pytest.raises(io.SchemaError, match="equations"):
        io.parse_theory_file(p)


@pytest.mark.parametrize("name", ["monoid.json", "stratified.json", "rel_unary.json", "presheaf.json",
                                  "pmet_scaling.json"])
def test_theory_round_trip(name):
    t = io.parse_theory_file(io.fixture_path(name))
    again = io.parse_theory(json.loads(io.dumps(io.theory_to_json(t))))
    assert again == t


def test_vobject_round_trip():
    objs = [
        VObject(Kind.SET, ("a", "b"), frozenset()),
        VObject(Kind.REL, ("a", "b"), frozenset({("a", "b"), ("b", "b")})),
        VObject(Kind.PREORD, ("a", "b"), frozenset({("a", "a"), ("b", "b"), ("a", "b")})),
        VObject(Kind.SIMP, ("a", "b", "c"), maximal_sets([frozenset("ab"), frozenset("c")])),
        VObject(Kind.PMET, ("a", "b", "c"), Metric({("a", "b"): Fraction(1, 3), ("a", "c"): INF})),
    ]
    for o in objs:
        data = json.loads(io.dumps(io.vobject_to_json(o)))
        assert io.parse_vobject(data, o.kind) == o
