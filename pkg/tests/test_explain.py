import random

import pytest
from hypothesis import given, settings, strategies as st

from contrastive import properties as P
from contrastive.causes import PreconditionError
from contrastive.dsl import parse_bundle, parse_formula
from contrastive.explain import (EpistemicState, GeneralEpistemicState, Hypothesis,
                                 enumerate_alternative_explanations, enumerate_alternative_explanations_prime,
                                 enumerate_congruent_explanations, enumerate_congruent_explanations_prime,
                                 enumerate_explanations, enumerate_general_congruent_explanations,
                                 enumerate_general_explanations)
from contrastive.formula import TRUE, _eval
from contrastive.model import Context, Situation, conj
from contrastive.oracle import Brute, _Counter

from conftest import CORPUS

F = parse_formula
seeds = st.integers(0, 10_000)

JOINT_PAIR = "unattainable under CEX1-4; see /root/notes/decisions.md, 'Planning joint congruent explanation'"

GOAL_ROUTES = "prime route adds partial-explanation pairs; see /root/notes/decisions.md, 'Planning goal explanation routes differ'"

ANNOTATIONS = ("Spider", "Beetle", "Bee", "Fly", "Unknown")


def state(bundle, name):
    d = bundle.states[name]
    return EpistemicState(bundle.models[d.model], [bundle.contexts[c].context for c in d.contexts])


def ctx(bundle, name):
    return bundle.contexts[name].context


def pairs(results):
    return [(e.fact, e.contrast) for e in results]


def both_routes(k, fact, foil, actual=None):
    a = enumerate_alternative_explanations(k, fact, foil, actual)
    b = enumerate_alternative_explanations_prime(k, fact, foil, actual)
    assert set(pairs(a)) == set(pairs(b))
    return pairs(a)


# examples ---------------------------------------------------------------------------

def test_spider7_explanation_is_legs(arthropod):
    k = state(arthropod, "unsure-spider")
    got = enumerate_explanations(k, F("O=Unknown"), ctx(arthropod, "spider7"))
    assert [e.events for e in got] == [conj(L="7")]


def test_extended_pass_explanations(extended):
    m = extended.models["extended"]
    base = [{"UL": "7", "UC": "no", "UW": "0"}, {"UL": "8", "UC": "yes", "UW": "0"}, {"UL": "8", "UC": "no", "UW": "2"}]
    ctxs = [Context(dict(b, US="no", UE="8", UA=a)) for b in base for a in ANNOTATIONS]
    got = enumerate_explanations(EpistemicState(m, ctxs), F("V=Pass"), ctx(extended, "spider7"))
    assert {e.events for e in got} >= {conj(L="7", A="Unknown"), conj(O="Unknown", A="Unknown")}


def test_spider7_contrastive_both_routes(arthropod):
    k = state(arthropod, "unsure-spider")
    assert both_routes(k, F("O=Unknown"), F("O=Spider"), ctx(arthropod, "spider7")) == [(conj(L="7"), conj(L="8"))]


def test_spider7_congruent_both_routes(arthropod):
    k1, k2 = state(arthropod, "unsure-odd"), state(arthropod, "seen-spider")
    a = enumerate_congruent_explanations(k1, k2, F("O=Unknown"), F("O=Spider"), ctx(arthropod, "spider7"))
    b = enumerate_congruent_explanations_prime(k1, k2, F("O=Unknown"), F("O=Spider"), ctx(arthropod, "spider7"))
    assert pairs(a) == pairs(b) == [(conj(L="7"), conj(L="8"))]


def test_planning_goal_explanation(planning):
    m = planning.models["planning"]
    k = EpistemicState.where(m, F("G1 & A1 & !A2"))
    got = enumerate_alternative_explanations(k, F("A1 & !A2"), F("!A1 & A2"), ctx(planning, "g13"))
    assert pairs(got) == [(conj(G2="false"), conj(G2="true"))]


@pytest.mark.xfail(strict=True, reason=GOAL_ROUTES)
def test_planning_goal_explanation_routes_agree(planning):
    m = planning.models["planning"]
    k = EpistemicState.where(m, F("G1 & A1 & !A2"))
    both_routes(k, F("A1 & !A2"), F("!A1 & A2"), ctx(planning, "g13"))


def test_planning_known_actions_has_no_explanation(planning):
    m = planning.models["planning"]
    k = EpistemicState.where(m, F("!G1 & G2 & !G3 & !A1 & !A2 & A3"))
    res = enumerate_alternative_explanations(k, F("A3 & !A2"), F("!A3 & A2"), ctx(planning, "g2"))
    assert res == [] and res.reason == "AEX4 unsatisfiable"
    assert both_routes(k, F("A3 & !A2"), F("!A3 & A2"), ctx(planning, "g2")) == []


def test_bee_vs_fly_ignorant_and_informed_states(arthropod):
    m = arthropod.models["arthropod"]
    ignorant = EpistemicState.where(m, F("O=Bee & !O=Fly"))
    assert both_routes(ignorant, F("O=Bee"), F("O=Fly")) == []
    informed = EpistemicState(m, [ctx(arthropod, "bee")])
    assert both_routes(informed, F("O=Bee"), F("O=Fly")) == []


@pytest.mark.xfail(strict=True, reason=JOINT_PAIR)
def test_planning_congruent_explanation_joint_preconditions(planning):
    m = planning.models["planning"]
    k1, k2 = EpistemicState.where(m, F("A1")), EpistemicState.where(m, F("A2"))
    got = enumerate_congruent_explanations(k1, k2, F("A1"), F("A2"), ctx(planning, "u1"), ctx(planning, "u2"))
    assert pairs(got) == [(conj(P1="true", P2="false"), conj(P1="false", P2="true"))]


def test_planning_congruent_explanation_known_goal(planning):
    # with G3 known the primary route keeps only the P2 difference (P1 is known)
    m = planning.models["planning"]
    k1, k2 = EpistemicState.where(m, F("A1 & G3")), EpistemicState.where(m, F("A2 & G3"))
    got = enumerate_congruent_explanations(k1, k2, F("A1"), F("A2"))
    assert pairs(got) == [(conj(P2="false"), conj(P2="true"))]


def test_preconditions(arthropod):
    k = state(arthropod, "unsure-spider")
    with pytest.raises(PreconditionError) as e:
        enumerate_explanations(k, F("O=Spider"))
    assert e.value.condition == "EX1"
    with pytest.raises(PreconditionError) as e:
        enumerate_alternative_explanations(k, F("O=Unknown"), F("O=Unknown | O=Spider"))
    assert e.value.condition == "AEX1"
    with pytest.raises(PreconditionError):
        enumerate_general_explanations(GeneralEpistemicState((Situation(k.model, k.contexts[0]),)),
                                       F("O=Unknown"), [])


# general explanations ------------------------------------------------------------------

LOOSE = """
model loose extends arthropod {
  fn O(L, S, E, C, W) = if E == 8 and S == no then Spider else Unknown;
}
context spider7-loose of loose { UL = 7; US = no; UE = 8; UC = no; UW = 0; }
"""

ANNOTATED = """
context s7-spider of extended { UL = 7; US = no; UE = 8; UC = no; UW = 0; UA = Spider; }
context spider-alt of annotation-only { UL = 8; US = no; UE = 8; UC = no; UW = 0; UA = Unknown; }
"""


def test_general_row_implication_for_spider():
    b = parse_bundle((CORPUS / "arthropod.scm").read_text(encoding="utf-8") + LOOSE)
    k = GeneralEpistemicState((Situation(b.models["arthropod"], ctx(b, "spider")),
                               Situation(b.models["loose"], ctx(b, "spider7-loose"))))
    row = Hypothesis(F("L=8 & S=no & E=8 & C=no & W=0 -> O=Spider"), "spider row")
    got = enumerate_general_explanations(k, F("O=Spider"), [row])
    assert (row, conj(L="8")) in [(g.fact_formula, g.fact_events) for g in got]


def test_general_annotation_formula():
    b = parse_bundle((CORPUS / "extended.scm").read_text(encoding="utf-8") + ANNOTATED)
    ext, ann = b.models["extended"], b.models["annotation-only"]
    alpha = Hypothesis(F("O=Unknown & A=Unknown -> [A<-Spider] V=Pass"), "annotating keeps a pass")
    k = GeneralEpistemicState((Situation(ext, ctx(b, "spider7")), Situation(ext, ctx(b, "s7-spider")),
                               Situation(ann, ctx(b, "spider-alt"))))
    got = [(g.fact_formula, g.fact_events) for g in enumerate_general_explanations(k, F("V=Pass"), [alpha])]
    assert (alpha, conj(O="Spider")) in got
    # without alpha, O=Spider fails where the annotation alone decides V
    assert all(e != conj(O="Spider") for h, e in got if h.formula == TRUE)


# properties ---------------------------------------------------------------------------

def draw_state(seed):
    rng = random.Random(seed)
    return P.draw_alternative_state(rng)


def single(k, i=0):
    return EpistemicState(k.model, [k.contexts[i]])


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_single_context_state_has_no_explanations(seed):
    k, fact, foil = draw_state(seed)
    one = single(k)
    assert list(enumerate_explanations(one, fact)) == []
    try:
        assert list(enumerate_alternative_explanations(one, fact, foil)) == []
        assert list(enumerate_alternative_explanations_prime(one, fact, foil)) == []
    except PreconditionError:
        pass
    rng = random.Random(seed)
    k1, k2, fact, sur = P.draw_congruent_states(rng)
    try:
        assert list(enumerate_congruent_explanations(single(k1), single(k2), fact, sur)) == []
        assert list(enumerate_congruent_explanations_prime(single(k1), single(k2), fact, sur)) == []
    except PreconditionError:
        pass


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_explanations_match_exhaustive_search(seed):
    k, fact, _ = draw_state(seed)
    b = Brute(k.model, _Counter(0))
    got = {e.events for e in enumerate_explanations(k, fact)}
    assert got == b.explanations(k.contexts, fact, k.contexts)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_explanations_are_minimal_and_witnessed(seed):
    k, fact, _ = draw_state(seed)
    b = Brute(k.model, _Counter(0))
    m = k.model
    for e in enumerate_explanations(k, fact):
        t, f = Context(e.certificate["uncertain_true"]), Context(e.certificate["uncertain_false"])
        assert t in k.contexts and f in k.contexts
        assert b.true(t, e.events) and not b.true(f, e.events)
        for u in k.contexts:
            if b.true(u, e.events):
                assert b.sufficient(u, e.events, fact)
        # dropping any conjunct breaks EX2
        for i in range(len(e.events)):
            sub = e.events[:i] + e.events[i + 1:]
            if sub:
                hit = [u for u in k.contexts if b.true(u, sub)]
                assert any(not b.sufficient(u, sub, fact) for u in hit)
        assert _eval(m, t, fact, ())


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_alternative_witnesses(seed):
    k, fact, foil = draw_state(seed)
    b = Brute(k.model, _Counter(0))
    try:
        got = enumerate_alternative_explanations(k, fact, foil)
    except PreconditionError:
        return
    for e in got:
        c = e.certificate
        assert b.true(Context(c["uncertain_true"]), e.fact) and not b.true(Context(c["uncertain_false"]), e.fact)
        hyp = conj(c["contrast_hypothetical"])
        assert b.true(Context(c["contrast_true"]), e.contrast, hyp)
        assert not b.true(Context(c["contrast_false"]), e.contrast, hyp)
        for w in c["cause_witnesses"]:
            u, h = Context(w["context"]), conj(w["hypothetical"])
            assert e.contrast in b.partials(u, foil, h)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_general_with_true_reduces_to_plain(seed):
    k, fact, _ = draw_state(seed)
    gk = GeneralEpistemicState(tuple(Situation(k.model, u) for u in k.contexts))
    plain = {e.events for e in enumerate_explanations(k, fact)}
    general = {g.fact_events for g in enumerate_general_explanations(gk, fact, [Hypothesis(TRUE, "true")])}
    assert plain == general


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_general_congruent_with_true_reduces_to_congruent(seed):
    k1, k2, fact, sur = P.draw_congruent_states(random.Random(seed))
    try:
        simple = set(pairs(enumerate_congruent_explanations(k1, k2, fact, sur)))
    except PreconditionError:
        return
    g = lambda k: GeneralEpistemicState(tuple(Situation(k.model, u) for u in k.contexts))
    general = enumerate_general_congruent_explanations(g(k1), g(k2), fact, sur, [Hypothesis(TRUE, "true")])
    assert simple == {(e.fact_events, e.contrast_events) for e in general}
