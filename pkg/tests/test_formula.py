import random

import pytest
from hypothesis import given, settings, strategies as st

from contrastive.dsl import parse_formula
from contrastive.formula import (TRUE, And, Atom, Implies, Intervene, Not, Or, Xor, conjunction, holds,
                                 holds_in, incompatible_in, valid_in_model)
from contrastive.generate import random_formula, random_model
from contrastive.model import ModelError, Situation, enumerate_contexts

seeds = st.integers(0, 10_000)


def instance(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    return rng, m, list(enumerate_contexts(m))


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_classical_connectives(seed):
    rng, m, ctxs = instance(seed)
    a, b = random_formula(rng, m), random_formula(rng, m)
    for u in ctxs:
        ha, hb = holds_in(m, u, a), holds_in(m, u, b)
        assert holds_in(m, u, Not(Not(a))) == ha
        assert holds_in(m, u, Not(And(a, b))) == holds_in(m, u, Or(Not(a), Not(b)))
        assert holds_in(m, u, Implies(a, b)) == ((not ha) or hb)
        assert holds_in(m, u, Xor(a, b)) == (ha != hb)
        assert holds_in(m, u, TRUE)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_intervention_distributes_over_connectives(seed):
    rng, m, ctxs = instance(seed)
    a, b = random_formula(rng, m), random_formula(rng, m)
    x = rng.choice(m.endogenous)
    do = ((x, rng.choice(m.domain(x))),)
    for u in ctxs:
        assert holds_in(m, u, Intervene(do, Not(a))) == (not holds_in(m, u, Intervene(do, a)))
        assert holds_in(m, u, Intervene(do, And(a, b))) == \
            (holds_in(m, u, Intervene(do, a)) and holds_in(m, u, Intervene(do, b)))


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_empty_intervention_and_composition(seed):
    rng, m, ctxs = instance(seed)
    phi = random_formula(rng, m)
    x, y = rng.sample(m.endogenous, 2) if len(m.endogenous) > 1 else (m.endogenous[0],) * 2
    vx, vy, vx2 = (rng.choice(m.domain(x)), rng.choice(m.domain(y)), rng.choice(m.domain(x)))
    for u in ctxs:
        assert holds_in(m, u, Intervene((), phi)) == holds_in(m, u, phi)
        nested = Intervene(((x, vx),), Intervene(((y, vy),), phi))
        if x != y:
            assert holds_in(m, u, nested) == holds_in(m, u, Intervene(((x, vx), (y, vy)), phi))
        # the outer assignment wins on a shared variable
        shadow = Intervene(((x, vx),), Intervene(((x, vx2),), phi))
        assert holds_in(m, u, shadow) == holds_in(m, u, Intervene(((x, vx),), phi))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_atom_under_intervention_reads_intervened_solution(seed):
    rng, m, ctxs = instance(seed)
    x = rng.choice(m.endogenous)
    do = ((x, rng.choice(m.domain(x))),)
    for u in ctxs:
        val = m.evaluate(u, do)
        for n in m.endogenous:
            assert holds_in(m, u, Intervene(do, Atom(n, val[n])))


def test_arthropod_counterfactuals(arthropod):
    m = arthropod.models["arthropod"]
    bee = Situation(m, arthropod.contexts["bee"].context)
    assert holds(bee, parse_formula("O=Bee"))
    assert holds(bee, parse_formula("[S<-no, W<-2] O=Fly"))
    assert holds(bee, parse_formula("[S<-no] O=Unknown"))
    assert not holds(bee, parse_formula("[L<-8] O=Bee"))


def test_holds_rejects_unknown_values(arthropod):
    bee = Situation(arthropod.models["arthropod"], arthropod.contexts["bee"].context)
    with pytest.raises(ModelError):
        holds(bee, Atom("O", "Moth"))
    with pytest.raises(ModelError):
        holds(bee, Intervene((("UL", "6"),), TRUE))


def test_valid_in_model(arthropod, fig6):
    m = arthropod.models["arthropod"]
    assert valid_in_model(m, parse_formula("[L<-8, S<-no, E<-8, C<-no, W<-0] O=Spider"))
    assert not valid_in_model(m, parse_formula("O=Unknown"))
    before = fig6.models["before"]
    assert valid_in_model(before, parse_formula("S=0 | S=1"))
    assert valid_in_model(before, parse_formula("R=0 -> S=1"))
    assert valid_in_model(before, parse_formula("[R<-1] S=0"))


def test_incompatibility(arthropod):
    bee = Situation(arthropod.models["arthropod"], arthropod.contexts["bee"].context)
    assert incompatible_in(bee, Atom("O", "Bee"), Atom("O", "Fly"))
    assert incompatible_in(bee, conjunction((("L", "6"), ("W", "4"))), conjunction((("L", "6"), ("W", "2"))))
    # different variables
    assert not incompatible_in(bee, Atom("O", "Bee"), Atom("W", "2"))
    # jointly satisfiable over the same variables
    assert not incompatible_in(bee, Atom("O", "Bee"), Or(Atom("O", "Bee"), Atom("O", "Fly")))
