import random

import pytest
from hypothesis import given, settings, strategies as st

from contrastive.dsl import DSLError, parse_bundle, parse_formula, print_bundle, print_formula
from contrastive.formula import TRUE, And, Atom, Intervene, Not, Or
from contrastive.generate import random_bundle, random_formula, random_model
from contrastive.model import Context, Situation, solve

from conftest import CORPUS

seeds = st.integers(0, 10_000)

BASE = "model M {\n  exogenous U : {0, 1};\n  var X : {0, 1};\n  fn X(U) = U;\n}\ncontext u of M { U = 0; }\n"


def error(text):
    with pytest.raises(DSLError) as e:
        parse_bundle(text)
    return e.value


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_random_bundles_round_trip(seed):
    b = random_bundle(random.Random(seed))
    text = print_bundle(b)
    assert parse_bundle(text) == b
    assert print_bundle(parse_bundle(text)) == text


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_random_formulas_round_trip(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    f = random_formula(rng, m, depth=3)
    assert parse_formula(print_formula(f)) == f


@pytest.mark.parametrize("name", sorted(p.name for p in CORPUS.glob("*.scm") if p.name != "broken-cycle.scm"))
def test_corpus_round_trips(name):
    b = parse_bundle((CORPUS / name).read_text(encoding="utf-8"))
    text = print_bundle(b)
    assert parse_bundle(text) == b and print_bundle(parse_bundle(text)) == text


def test_formula_syntax():
    assert parse_formula("A=1 & !B=0") == And(Atom("A", "1"), Not(Atom("B", "0")))
    assert parse_formula("A=1 | B=1 & C=1") == Or(Atom("A", "1"), And(Atom("B", "1"), Atom("C", "1")))
    assert parse_formula("A=1 -> B=1") == Or(Not(Atom("A", "1")), Atom("B", "1"))
    assert parse_formula("[B<-0, A<-1] C=1") == Intervene((("A", "1"), ("B", "0")), Atom("C", "1"))
    assert parse_formula("X != a") == Not(Atom("X", "a"))
    assert parse_formula("true") == TRUE and parse_formula("false") == Not(TRUE)


def test_boolean_sugar():
    assert parse_formula("G1 & !A2") == And(Atom("G1", "true"), Atom("A2", "false"))
    text = ("model M {\n  exogenous U : bool;\n  var X : bool;\n  var Y : bool;\n  fn X(U) = U;\n"
            "  fn Y(X) = not X;\n}\ncontext u of M { U = true; }\nquery q = eval in (M, u) event X & !Y;\n")
    b = parse_bundle(text)
    assert b.models["M"].domain("X") == ("false", "true")
    assert solve(Situation(b.models["M"], Context({"U": "true"}))) == {"U": "true", "X": "true", "Y": "false"}
    assert "event X=true & Y=false;" in print_bundle(b)


def test_range_expansion_and_expressions():
    b = parse_bundle("model M {\n  exogenous U : {0..3};\n  var X : bool;\n  fn X(U) = U >= 2;\n}\n")
    m = b.models["M"]
    assert m.domain("U") == ("0", "1", "2", "3")
    assert [solve(Situation(m, Context({"U": v})))["X"] for v in "0123"] == ["false", "false", "true", "true"]


def test_table_rows_are_normalised():
    text = ("model M {\n  exogenous U : {0, 1};\n  exogenous V : {a, b};\n  var X : {0, 1};\n"
            "  fn X(V, U) = table { (b, 1) -> 1; (a, 0) -> 0; default -> 0; };\n}\n")
    b = parse_bundle(text)
    assert b.models["M"].function("X").rows == ((("a", "0"), "0"), (("b", "1"), "1"))
    assert "table { (a, 0) -> 0; (b, 1) -> 1; default -> 0; }" in print_bundle(b)


def test_extends_overrides_functions(extended):
    base, ext = extended.models["arthropod"], extended.models["extended"]
    assert ext.has("A") and not base.has("A")
    assert ext.function("L") == base.function("L")
    assert ext.function("O") != base.function("O")


def test_empty_file_is_an_empty_bundle():
    for text in ("", "   \n", "// just a comment\n# and another\n"):
        b = parse_bundle(text)
        assert not b.models and not b.contexts and not b.queries
        assert print_bundle(b) == print_bundle(parse_bundle(print_bundle(b)))


def test_broken_cycle_is_reported():
    e = error((CORPUS / "broken-cycle.scm").read_text(encoding="utf-8"))
    assert "cycle" in str(e) and (e.line, e.col) == (2, 7)


@pytest.mark.parametrize("text, where, words", [
    ("model M {\n  exogenous U : {0, 1}\n  var X : {0, 1};\n}\n", (3, 3), "expected ';'"),
    ("model M {\n  exogenous U : bool;\n  var X : bool;\n  fn X(V) = V;\n}\n", (4, 6), "unknown parent"),
    ("model M {\n  exogenous U : {0, 1};\n  var X : {0, 1};\n  fn X(U) = table { (1) -> 1; (0) -> 2; };\n}\n",
     (4, 31), "outside domain"),
    ("model M {\n  exogenous U : {0, 1};\n  var X : {0, 1};\n  fn X(U) = table { (1) -> 1; (1) -> 0; };\n}\n",
     (4, 31), "duplicate row"),
    ("model M {\n  exogenous U : {0, 1};\n  var X : {0, 1};\n  fn X(U) = table { (0) -> 1; };\n}\n",
     (1, 7), "incomplete table"),
    (BASE + "context u of M { U = 1; }\n", (7, 9), "duplicate context"),
    (BASE.replace("U = 0", "U = 3"), (6, 18), "outside domain"),
    (BASE + "query q = cause in (M, u) event Y=1;\n", (7, 11), "unknown variable"),
    (BASE + "query q = frobnicate in (M, u) event X=0;\n", (7, 11), "unknown query kind"),
])
def test_diagnostics_carry_positions(text, where, words):
    e = error(text)
    assert (e.line, e.col) == where
    assert str(e).startswith(f"{where[0]}:{where[1]}: ") and words in str(e)


def test_quoted_names_round_trip():
    f = Atom("odd name", "a \"quoted\" value")
    assert parse_formula(print_formula(f)) == f
