import random

import pytest
from hypothesis import given, settings, strategies as st

from contrastive.formula import Atom, Not, Or, And, holds_in
from contrastive.generate import random_model
from contrastive.model import (CausalModel, Context, ModelError, Situation, StructuralFunction, Variable,
                               conj, enumerate_contexts, intervene, override_functions, restrict_model,
                               solve, validate_model)

seeds = st.integers(0, 10_000)


def fixpoint(model, u, do=()):
    """Jacobi iteration from an arbitrary start; exact after |V| rounds on a DAG."""
    fixed = dict(do)
    val = dict(u.assignment)
    val.update({n: model.domain(n)[0] for n in model.endogenous})
    val.update(fixed)
    for _ in range(len(model.endogenous) + 1):
        nxt = dict(val)
        for n in model.endogenous:
            if n in fixed:
                continue
            f = model.function(n)
            nxt[n] = f.lookup(tuple(val[p] for p in f.parents))
        val = nxt
    return val


def small():
    vs = [Variable("U", ("0", "1"), exogenous=True), Variable("A", ("0", "1")), Variable("B", ("0", "1"))]
    fa = StructuralFunction("A", ("U",), {("0",): "0", ("1",): "1"})
    fb = StructuralFunction("B", ("A",), {("1",): "1"}, default="0")
    return CausalModel(vs, [fa, fb])


def test_solve_arthropod_contexts(arthropod):
    m = arthropod.models["arthropod"]
    vals = solve(Situation(m, arthropod.contexts["spider7"].context))
    assert vals["L"] == "7" and vals["O"] == "Unknown"
    assert solve(Situation(m, arthropod.contexts["odd"].context))["O"] == "Unknown"


def test_solve_fig6(fig6):
    vals = solve(Situation(fig6.models["before"], fig6.contexts["u"].context))
    assert (vals["P"], vals["Q"], vals["R"], vals["S"]) == ("1", "0", "1", "0")


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_topological_solve_matches_fixpoint(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    for u in enumerate_contexts(m):
        assert m.evaluate(u) == fixpoint(m, u)
        x = rng.choice(m.endogenous)
        do = conj({x: rng.choice(m.domain(x))})
        assert m.evaluate(u, do) == fixpoint(m, u, do)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_intervene_matches_evaluate_with_do(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    x = rng.choice(m.endogenous)
    do = conj({x: rng.choice(m.domain(x))})
    mi = intervene(m, do)
    for u in enumerate_contexts(m):
        assert mi.evaluate(u) == m.evaluate(u, do)


def test_intervene_empty_is_identity():
    m = small()
    assert intervene(m, ()) is m


def test_intervene_rejects_exogenous_and_bad_values():
    m = small()
    with pytest.raises(ModelError):
        intervene(m, {"U": "1"})
    with pytest.raises(ModelError):
        intervene(m, {"A": "7"})


def test_interventions_compose(arthropod):
    m = arthropod.models["arthropod"]
    twice = intervene(intervene(m, {"L": "6"}), {"S": "yes"})
    assert twice == intervene(m, {"L": "6", "S": "yes"})


def test_override_functions(fig6):
    before, after = fig6.models["before"], fig6.models["after"]
    m = override_functions(before, [after.function("R")])
    u = fig6.contexts["u"].context
    assert m.function("R") == after.function("R")
    assert solve(Situation(m, Context({"U1": "0", "U2": "1"})))["R"] == "0"
    assert solve(Situation(before, Context({"U1": "0", "U2": "1"})))["R"] == "1"
    assert solve(Situation(m, u))["S"] == "0"


def test_override_rejects_undeclared_target():
    with pytest.raises(ModelError):
        override_functions(small(), [StructuralFunction.constant("Z", "0")])


def test_validate_reports_problems():
    vs = [Variable("U", ("0", "1"), exogenous=True), Variable("A", ("0", "1"))]
    bad = CausalModel(vs, [StructuralFunction("A", ("U",), {("0",): "2"})])
    errors = validate_model(bad).errors
    assert any("outside domain" in e for e in errors)
    assert any("incomplete table" in e for e in errors)
    assert validate_model(small()).ok


def test_validate_reports_cycle():
    vs = [Variable("U", ("0", "1"), exogenous=True), Variable("X", ("0", "1")), Variable("Y", ("0", "1"))]
    fx = StructuralFunction("X", ("Y",), {}, default="0")
    fy = StructuralFunction("Y", ("X",), {}, default="0")
    assert any("cycle" in e for e in validate_model(CausalModel(vs, [fx, fy])).errors)


def test_situation_checks_context():
    with pytest.raises(ModelError):
        Situation(small(), Context({"U": "2"}))
    with pytest.raises(ModelError):
        Situation(small(), Context({}))


def test_enumerate_contexts_is_exhaustive_and_ordered(arthropod):
    m = arthropod.models["arthropod"]
    ctxs = list(enumerate_contexts(m))
    assert len(ctxs) == 9 * 2 * 9 * 2 * 5 == len(set(ctxs))
    assert ctxs[0].as_dict() == {"UC": "yes", "UE": "0", "UL": "0", "US": "yes", "UW": "0"}


def test_restrict_bee_fly_ranges(arthropod):
    m = arthropod.models["arthropod"]
    r = restrict_model(m, Atom("O", "Bee"), Atom("O", "Fly"))
    assert len(r.contexts) == 2
    assert r.range("S") == ("yes", "no") and r.range("W") == ("2", "4")
    assert r.range("L") == ("6",)
    assert not r.admits(conj(L="8")) and r.admits(conj(W="2"))


def test_restrict_empty_raises():
    m = small()
    with pytest.raises(ModelError):
        restrict_model(m, And(Atom("A", "1"), Atom("B", "0")), Atom("A", "0") & Atom("A", "1"))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_restricted_contexts_satisfy_exactly_one(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    x = rng.choice(m.endogenous)
    fact = Atom(x, rng.choice(m.domain(x)))
    foil = Or(Not(fact), Atom(x, rng.choice(m.domain(x))))
    try:
        r = restrict_model(m, fact, foil)
    except ModelError:
        return
    for u in enumerate_contexts(m):
        one = holds_in(m, u, fact) != holds_in(m, u, foil)
        assert r.admits_context(u) == one
    for n, vals in r.ranges:
        assert set(vals) == {m.evaluate(u)[n] for u in r.contexts}
