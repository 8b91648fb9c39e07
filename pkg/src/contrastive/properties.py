"""Boolean checks for the consistency, presupposition and route-equivalence results.

Each ``check_*`` returns a list of violation messages (empty when the property
holds, or when the instance falls outside the property's hypotheses).  The
``draw_*`` helpers produce random instances whose preconditions hold, for the
property suites.
"""
from __future__ import annotations

import random

from .causes import (PreconditionError, enumerate_alternative_causes, enumerate_congruent_causes,
                     enumerate_congruent_causes_general, maximal_consistent_unions, presupposed_causes)
from .explain import (EpistemicState, enumerate_alternative_explanations,
                      enumerate_alternative_explanations_prime, enumerate_congruent_explanations,
                      enumerate_congruent_explanations_prime)
from .formula import Intervene, Not, _eval
from .generate import _fact, _foil, _surrogate, random_model, variant
from .model import ModelError, Situation, enumerate_contexts, override_functions


def _do(events, formula):
    return Intervene(tuple(events), formula) if events else formula


def _holds(model, ctx, formula):
    return _eval(model, ctx, formula, ())


def check_alternative_consistency(sit: Situation, fact, foil) -> list:
    """Every maximal-consistent union <x, y> of the alternative causes gives
    [X<-y]foil and [X<-y]not fact."""
    try:
        pairs = enumerate_alternative_causes(sit, fact, foil)
    except PreconditionError:
        return []
    bad = []
    for x, y in maximal_consistent_unions(pairs):
        if not _holds(sit.model, sit.context, _do(y, foil)):
            bad.append(f"[X<-{y}] foil fails")
        if not _holds(sit.model, sit.context, _do(y, Not(fact))):
            bad.append(f"[X<-{y}] not-fact fails")
    return bad


def check_congruent_consistency(sa: Situation, sb: Situation, fact, surrogate) -> list:
    """Every maximal-consistent union <x, y> of the congruent causes gives
    (M, u) |= [X<-y]surrogate and (M, u') |= [X<-x]fact."""
    try:
        pairs = enumerate_congruent_causes(sa, sb, fact, surrogate)
    except PreconditionError:
        return []
    bad = []
    for x, y in maximal_consistent_unions(pairs):
        if not _holds(sa.model, sa.context, _do(y, surrogate)):
            bad.append(f"first situation: [X<-{y}] surrogate fails")
        if not _holds(sb.model, sb.context, _do(x, fact)):
            bad.append(f"second situation: [X<-{x}] fact fails")
    return bad


def check_general_congruent_consistency(sa: Situation, sb: Situation, fact, surrogate) -> list:
    """As above across two models, with each side's differing functions swapped in:
    (M <= F_y, u) |= [Y<-y]surrogate and (M' <= F_x, u') |= [X<-x]fact."""
    try:
        pairs = enumerate_congruent_causes_general(sa, sb, fact, surrogate)
    except PreconditionError:
        return []
    ma, mb = sa.model, sb.model
    bad = []
    for x, y in maximal_consistent_unions(pairs):
        group = [p for p in pairs if set(p.fact) <= set(x) and set(p.contrast) <= set(y)]
        fx = sorted({n for p in group for n in p.fact_functions})
        fy = sorted({n for p in group for n in p.contrast_functions})
        try:
            ma_y = override_functions(ma, [mb.function(n) for n in fy])
            mb_x = override_functions(mb, [ma.function(n) for n in fx])
        except ModelError as e:
            bad.append(f"cannot build overridden model: {e}")
            continue
        if not all(ma_y.has(k) for k, _ in y) or not all(mb_x.has(k) for k, _ in x):
            continue
        if not _holds(ma_y, sa.context, _do(y, surrogate)):
            bad.append(f"(M <= F_y): [Y<-{y}] surrogate fails")
        if not _holds(mb_x, sb.context, _do(x, fact)):
            bad.append(f"(M' <= F_x): [X<-{x}] fact fails")
    return bad


def check_presupposition_alternative(sit: Situation, fact, foil) -> list:
    """X=x is a cause of the fact in the presupposed model iff <x, y> is an
    alternative cause for some y."""
    try:
        pres = set(presupposed_causes(sit, fact, foil))
        alts = {p.fact for p in enumerate_alternative_causes(sit, fact, foil)}
    except PreconditionError:
        return []
    bad = [f"presupposed only: {x}" for x in sorted(pres - alts)]
    bad += [f"alternative only: {x}" for x in sorted(alts - pres)]
    return bad


def check_presupposition_congruent(sa: Situation, sb: Situation, fact, surrogate) -> list:
    """Presupposed causes x of the fact (first situation) and y of the surrogate
    (second situation) over the same variables, differing everywhere, are
    exactly the congruent causes."""
    try:
        pa = presupposed_causes(sa, fact, surrogate)
        pb = presupposed_causes(sb, surrogate, fact)
        cong = {(p.fact, p.contrast) for p in enumerate_congruent_causes(sa, sb, fact, surrogate)}
    except PreconditionError:
        return []
    pres = set()
    for x in pa:
        for y in pb:
            if [k for k, _ in x] == [k for k, _ in y] and all(a != b for (_, a), (_, b) in zip(x, y)):
                pres.add((x, y))
    bad = [f"presupposed only: {p}" for p in sorted(pres - cong)]
    bad += [f"congruent only: {p}" for p in sorted(cong - pres)]
    return bad


def _pairs(results):
    return {(e.fact, e.contrast) for e in results}


def check_alternative_routes(state: EpistemicState, fact, foil) -> list:
    """AEX1-4 and AEX1'-4' select the same explanations."""
    try:
        a = _pairs(enumerate_alternative_explanations(state, fact, foil))
        b = _pairs(enumerate_alternative_explanations_prime(state, fact, foil))
    except PreconditionError:
        return []
    return [f"primary only: {p}" for p in sorted(a - b)] + [f"prime only: {p}" for p in sorted(b - a)]


def check_congruent_routes(k1: EpistemicState, k2: EpistemicState, fact, surrogate) -> list:
    """CEX1-4 and CEX1'-4' select the same explanations."""
    try:
        a = _pairs(enumerate_congruent_explanations(k1, k2, fact, surrogate))
        b = _pairs(enumerate_congruent_explanations_prime(k1, k2, fact, surrogate))
    except PreconditionError:
        return []
    return [f"primary only: {p}" for p in sorted(a - b)] + [f"prime only: {p}" for p in sorted(b - a)]


# instance drawing ---------------------------------------------------------------------

def draw_alternative(rng: random.Random, **kw):
    """(situation, fact, foil) with the fact true and the foil incompatible."""
    m = random_model(rng, **kw)
    u = rng.choice(list(enumerate_contexts(m)))
    fact = _fact(rng, m, m.evaluate(u))
    return Situation(m, u), fact, _foil(rng, m, fact)


def draw_congruent(rng: random.Random, general=False, **kw):
    """(first situation, second situation, fact, surrogate); ``general`` uses a model variant."""
    m = random_model(rng, **kw)
    m2 = variant(rng, m) if general else m
    u = rng.choice(list(enumerate_contexts(m)))
    fact = _fact(rng, m, m.evaluate(u))
    u2, sur = _surrogate(rng, m2, fact, u)
    return Situation(m, u), Situation(m2, u2), fact, sur


def _believing(rng, m, formula, reject=None):
    good = [c for c in enumerate_contexts(m) if _eval(m, c, formula, ())
            and (reject is None or not _eval(m, c, reject, ()))]
    k = rng.randint(min(2, len(good)), len(good))
    return EpistemicState(m, rng.sample(good, k))


def draw_alternative_state(rng: random.Random, **kw):
    """(state, fact, foil): K believes fact and not foil."""
    sit, fact, foil = draw_alternative(rng, **kw)
    return _believing(rng, sit.model, fact, foil), fact, foil


def draw_congruent_states(rng: random.Random, **kw):
    """(K, K', fact, surrogate) over one model."""
    sa, sb, fact, sur = draw_congruent(rng, **kw)
    return _believing(rng, sa.model, fact), _believing(rng, sa.model, sur), fact, sur
