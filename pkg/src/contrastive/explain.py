"""Explanations relative to epistemic states.

An explanation is a cause the explainee could not already establish from what
they know.  Each enumerator returns a :class:`Results` list whose ``reason``
names the first condition no candidate could get past when it is empty.
Every result carries a certificate with the witnessing contexts.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .causes import (PreconditionError, _causes, _hypothetical_partials, _partials, _witness,
                     cause_variables, general_congruent_candidates, guard, hypotheticals, live_hypotheticals,
                     is_sufficient, maximal_general_pairs, sort_events, subsets, events_key)
from .formula import (TRUE, And, Atom, Formula, Implies, Not, _eval, all_of, bind, conjunction,
                      incompatible_in)
from .model import CausalModel, Context, ModelError, Situation, conj, enumerate_contexts


# epistemic states -------------------------------------------------------------

@dataclass(frozen=True)
class EpistemicState:
    """The contexts of one model an agent considers possible."""

    model: CausalModel
    contexts: tuple

    def __post_init__(self):
        ctxs = tuple(c if isinstance(c, Context) else Context(c) for c in self.contexts)
        if not ctxs:
            raise ModelError("epistemic state must contain at least one context")
        for c in ctxs:
            Situation(self.model, c)
        object.__setattr__(self, "contexts", tuple(dict.fromkeys(ctxs)))

    @classmethod
    def where(cls, model, formula):
        """All contexts of ``model`` satisfying ``formula``."""
        bind(model, formula)
        return cls(model, tuple(u for u in enumerate_contexts(model) if _eval(model, u, formula, ())))

    def __len__(self):
        return len(self.contexts)


@dataclass(frozen=True)
class GeneralEpistemicState:
    """Situations possibly over different models."""

    situations: tuple

    def __post_init__(self):
        sits = tuple(self.situations)
        if not sits:
            raise ModelError("epistemic state must contain at least one situation")
        object.__setattr__(self, "situations", tuple(dict.fromkeys(sits)))

    @property
    def models(self) -> tuple:
        return tuple(dict.fromkeys(s.model for s in self.situations))


@dataclass(frozen=True)
class Hypothesis:
    """A candidate model-restricting formula, optionally with a display label."""

    formula: Formula
    label: str | None = None


TRUE_HYPOTHESIS = Hypothesis(TRUE, "true")


def function_identity(model: CausalModel, name: str, label=None) -> Hypothesis:
    """``F_X = f`` as the conjunction of f's rows, read as implications."""
    f = model.function(name)
    rows = []
    for key in itertools.product(*(model.domain(p) for p in f.parents)):
        out = f.lookup(key)
        rows.append(Implies(conjunction(conj(zip(f.parents, key))), Atom(name, out)))
    return Hypothesis(all_of(rows), label or f.describe())


def row_implications(model: CausalModel) -> list:
    """One hypothesis per explicit table row of every function."""
    out = []
    for f in model.functions:
        for key, val in f.rows:
            if not f.parents:
                continue
            pre = conj(zip(f.parents, key))
            out.append(Hypothesis(Implies(conjunction(pre), Atom(f.target, val))))
    return out


def default_hypotheses(models) -> list:
    seen, out = set(), []
    for m in models:
        for h in row_implications(m) + [function_identity(m, n) for n in m.endogenous]:
            if h.formula not in seen:
                seen.add(h.formula)
                out.append(h)
    return out


# results ------------------------------------------------------------------------

class Results(list):
    """A list of results plus ``reason`` when it is empty."""

    reason: str | None = None


@dataclass(frozen=True)
class Explanation:
    events: tuple
    kind: str = "plain"
    certificate: dict = field(default_factory=dict, compare=False, hash=False)


@dataclass(frozen=True)
class ContrastiveExplanation:
    fact: tuple
    contrast: tuple
    kind: str
    certificate: dict = field(default_factory=dict, compare=False, hash=False)


@dataclass(frozen=True)
class GeneralExplanation:
    fact_formula: Hypothesis
    fact_events: tuple
    contrast_formula: Hypothesis | None
    contrast_events: tuple
    fact_functions: tuple = ()
    contrast_functions: tuple = ()
    certificate: dict = field(default_factory=dict, compare=False, hash=False)


ORDER = {
    "plain": ("EX2", "EX3", "EX4"),
    "alternative": ("AEX2", "AEX3", "AEX4"),
    "alternative-prime": ("AEX1'", "AEX2'", "AEX3'", "AEX4'"),
    "congruent": ("CEX2", "CEX3", "CEX4"),
    "congruent-prime": ("CEX1'", "CEX2'", "CEX3'", "CEX4'"),
}


class _Tracker:
    """Remembers the furthest condition any candidate failed."""

    def __init__(self, kind):
        self.order = ORDER.get(kind, ())
        self.furthest = -1
        self.tried = 0

    def fail(self, cond):
        self.tried += 1
        if cond in self.order:
            self.furthest = max(self.furthest, self.order.index(cond))

    def finish(self, items, key):
        out = Results(sorted(items, key=key))
        if not out:
            if self.furthest >= 0:
                out.reason = f"{self.order[self.furthest]} unsatisfiable"
            else:
                out.reason = "no candidate"
        return out


# helpers ---------------------------------------------------------------------------

def _true(model, u, events, frozen=()):
    val = model.evaluate(u, frozen)
    return all(val[k] == v for k, v in events)


def _restrict(events, names):
    return tuple((k, v) for k, v in events if k in names)


def _event_candidates(model, contexts, names, frozen=()):
    out = set()
    for u in contexts:
        val = model.evaluate(u, frozen)
        full = tuple((n, val[n]) for n in names)
        for sub in subsets(full, 1):
            out.add(sub)
    return out


def _uncertain(model, contexts, events, frozen=()):
    yes = no = None
    for u in contexts:
        if _true(model, u, events, frozen):
            yes = yes or u
        else:
            no = no or u
        if yes and no:
            return yes, no
    return None


def _ctx(u):
    return dict(u.assignment)


def _check_believed(model, contexts, formula, cond):
    for u in contexts:
        if not _eval(model, u, formula, ()):
            raise PreconditionError(cond, f"not believed: fails in context {_ctx(u)}")


# plain explanations -------------------------------------------------------------------

def _sufficient_everywhere(model, contexts, events, phi, frozen=()):
    hit = False
    for u in contexts:
        if _true(model, u, events, frozen):
            hit = True
            if not is_sufficient(model, u, events, phi, frozen):
                return False
    return hit


def _explanations(model, contexts, phi, frozen=(), actual=None, track=None):
    names = cause_variables(model, phi)
    pool = [actual] if actual is not None else contexts
    cands = sort_events(model, _event_candidates(model, pool, names, frozen))
    ex2 = {}

    def sat2(e):
        if e not in ex2:
            ex2[e] = _sufficient_everywhere(model, contexts, e, phi, frozen)
        return ex2[e]

    out = []
    for e in cands:
        if not sat2(e):
            track and track.fail("EX2")
            continue
        if any(sat2(s) for s in subsets(e, 1) if len(s) < len(e)):
            track and track.fail("EX3")
            continue
        wit = _uncertain(model, contexts, e, frozen)
        if wit is None:
            track and track.fail("EX4")
            continue
        out.append((e, wit))
    return out


def enumerate_explanations(state: EpistemicState, event, actual=None) -> Results:
    """EX1-EX4.  With ``actual``, only explanations true in that context."""
    model = state.model
    bind(model, event)
    guard(model)
    _check_believed(model, state.contexts, event, "EX1")
    track = _Tracker("plain")
    found = _explanations(model, state.contexts, event, (), actual, track)
    items = [Explanation(e, "plain", {"conditions": ["EX1", "EX2", "EX3", "EX4"],
                                      "uncertain_true": _ctx(w[0]), "uncertain_false": _ctx(w[1])})
             for e, w in found]
    return track.finish(items, lambda x: events_key(model, x.events))


# contrastive alternative explanations ------------------------------------------------

def _alt_preconditions(state, fact, foil):
    model = state.model
    bind(model, fact)
    bind(model, foil)
    guard(model)
    _check_believed(model, state.contexts, And(fact, Not(foil)), "AEX1")
    if not incompatible_in(Situation(model, state.contexts[0]), fact, foil):
        raise PreconditionError("incompatible", "fact and foil are not incompatible")


def _hypothetical_uncertainty(model, contexts, x, y):
    """AEX4, second half: some W=w other than X=x leaves the agent unsure of X=y."""
    for hyp in hypotheticals(model):
        if hyp == x:
            continue
        wit = _uncertain(model, contexts, y, hyp)
        if wit is not None:
            return hyp, wit
    return None


def enumerate_alternative_explanations(state: EpistemicState, fact, foil, actual=None) -> Results:
    """AEX1-AEX4: minimal sufficient alternative causes the agent is unsure of."""
    _alt_preconditions(state, fact, foil)
    model, ctxs = state.model, state.contexts
    parts = {u: _partials(model, u, fact) for u in ctxs}
    hyps = {u: _hypothetical_partials(model, u, foil) for u in ctxs}
    track = _Tracker("alternative")
    memo = {}

    def sat2(x, y):
        key = (x, y)
        if key not in memo:
            xs = tuple(k for k, _ in x)
            ys = tuple(v for _, v in y)
            wits = {}
            ok = all(a != b for (_, a), (_, b) in zip(x, y))
            hit = False
            for u in ctxs if ok else ():
                if not _true(model, u, x):
                    continue
                hit = True
                hyp = hyps[u].get(xs, {}).get(ys)
                if x not in parts[u] or hyp is None:
                    ok = False
                    break
                wits[u] = hyp
            memo[key] = wits if ok and hit else None
        return memo[key]

    pool = [actual] if actual is not None else ctxs
    names = cause_variables(model, fact)
    out = []
    for x in sort_events(model, _event_candidates(model, pool, names)):
        xs = tuple(k for k, _ in x)
        ys_pool = set()
        for u in ctxs:
            if _true(model, u, x):
                ys_pool |= set(hyps[u].get(xs, {}))
        if not ys_pool:
            track.fail("AEX2")
            continue
        for ys in sorted(ys_pool):
            y = tuple(zip(xs, ys))
            wits = sat2(x, y)
            if wits is None:
                track.fail("AEX2")
                continue
            sub_ok = False
            for idx in subsets(range(len(x)), 1):
                if len(idx) < len(x) and sat2(tuple(x[i] for i in idx), tuple(y[i] for i in idx)):
                    sub_ok = True
                    break
            if sub_ok:
                track.fail("AEX3")
                continue
            unc = _uncertain(model, ctxs, x)
            hunc = _hypothetical_uncertainty(model, ctxs, x, y) if unc else None
            if unc is None or hunc is None:
                track.fail("AEX4")
                continue
            cert = {"conditions": ["AEX1", "AEX2", "AEX3", "AEX4"],
                    "cause_witnesses": [{"context": _ctx(u), "hypothetical": dict(h)}
                                        for u, h in wits.items()],
                    "uncertain_true": _ctx(unc[0]), "uncertain_false": _ctx(unc[1]),
                    "contrast_hypothetical": dict(hunc[0]),
                    "contrast_true": _ctx(hunc[1][0]), "contrast_false": _ctx(hunc[1][1])}
            out.append(ContrastiveExplanation(x, y, "alternative", cert))
    return track.finish(out, lambda e: (events_key(model, e.fact), events_key(model, e.contrast)))


def _hypothetical_explanation_parts(model, contexts, psi):
    """X -> {y: W=w} for partial explanations of psi under some M_{W<-w} (EX2-EX4 relative to K)."""
    out = {}
    for hyp in live_hypotheticals(model, psi):
        if not any(_eval(model, u, psi, hyp) for u in contexts):
            continue
        for e, _ in _explanations(model, contexts, psi, hyp):
            for sub in subsets(e, 1):
                xs = tuple(k for k, _ in sub)
                out.setdefault(xs, {}).setdefault(tuple(v for _, v in sub), hyp)
    return out


def _maximal_pairs(pairs):
    sets = [frozenset(k for k, _ in x) for x, _, _ in pairs]
    return [p for p, s in zip(pairs, sets) if not any(s < t for t in sets)]


def enumerate_alternative_explanations_prime(state: EpistemicState, fact, foil, actual=None) -> Results:
    """AEX1'-AEX4': differences between partial explanations of fact and of foil."""
    _alt_preconditions(state, fact, foil)
    model, ctxs = state.model, state.contexts
    track = _Tracker("alternative-prime")
    fact_expl = _explanations(model, ctxs, fact, (), actual)
    xs_pool = set()
    for e, _ in fact_expl:
        xs_pool |= set(subsets(e, 1))
    if not xs_pool:
        track.fail("AEX1'")
        return track.finish([], None)
    foil_parts = _hypothetical_explanation_parts(model, ctxs, foil)
    pairs = []
    for x in xs_pool:
        xs = tuple(k for k, _ in x)
        options = foil_parts.get(xs)
        if not options:
            track.fail("AEX2'")
            continue
        for ys, hyp in options.items():
            y = tuple(zip(xs, ys))
            if any(a == b for (_, a), (_, b) in zip(x, y)):
                track.fail("AEX3'")
                continue
            pairs.append((x, y, hyp))
    kept = _maximal_pairs(pairs)
    if pairs and not kept:
        track.fail("AEX4'")
    out = [ContrastiveExplanation(x, y, "alternative",
                                  {"conditions": ["AEX1'", "AEX2'", "AEX3'", "AEX4'"],
                                   "contrast_hypothetical": dict(h)})
           for x, y, h in kept]
    return track.finish(out, lambda e: (events_key(model, e.fact), events_key(model, e.contrast)))


# contrastive congruent explanations ---------------------------------------------------

def _cong_preconditions(k1, k2, fact, surrogate):
    if k1.model != k2.model:
        raise PreconditionError("models", "states use different models; use the general case")
    model = k1.model
    bind(model, fact)
    bind(model, surrogate)
    guard(model)
    _check_believed(model, k1.contexts, fact, "CEX1")
    _check_believed(model, k2.contexts, surrogate, "CEX1")


def _somewhere(model, contexts, events):
    for u in contexts:
        if _true(model, u, events):
            return u
    return None


def enumerate_congruent_explanations(k1: EpistemicState, k2: EpistemicState, fact, surrogate,
                                     actual=None, actual_contrast=None) -> Results:
    """CEX1-CEX4 over one model and two epistemic states."""
    _cong_preconditions(k1, k2, fact, surrogate)
    model = k1.model
    pa = {u: _partials(model, u, fact) for u in k1.contexts}
    pb = {u: _partials(model, u, surrogate) for u in k2.contexts}
    track = _Tracker("congruent")
    memo = {}

    def sat2(x, y):
        if (x, y) not in memo:
            ok = all(a != b for (_, a), (_, b) in zip(x, y))
            ua = [u for u in k1.contexts if _true(model, u, x)]
            ub = [u for u in k2.contexts if _true(model, u, y)]
            ok = ok and bool(ua) and bool(ub) and all(x in pa[u] for u in ua) \
                and all(y in pb[u] for u in ub)
            memo[(x, y)] = ok
        return memo[(x, y)]

    names = [n for n in cause_variables(model, fact) if n in set(cause_variables(model, surrogate))]
    pool_a = [actual] if actual is not None else k1.contexts
    pool_b = [actual_contrast] if actual_contrast is not None else k2.contexts
    ys_by_vars = {}
    for y in _event_candidates(model, pool_b, names):
        ys_by_vars.setdefault(tuple(k for k, _ in y), set()).add(y)
    out = []
    for x in sort_events(model, _event_candidates(model, pool_a, names)):
        xs = tuple(k for k, _ in x)
        ys = ys_by_vars.get(xs, ())
        if not ys:
            track.fail("CEX2")
        for y in sort_events(model, ys):
            if not sat2(x, y):
                track.fail("CEX2")
                continue
            if any(sat2(tuple(x[i] for i in idx), tuple(y[i] for i in idx))
                   for idx in subsets(range(len(x)), 1) if len(idx) < len(x)):
                track.fail("CEX3")
                continue
            unc = _uncertain(model, k1.contexts, x)
            there = _somewhere(model, k2.contexts, y)
            if unc is None or there is None:
                track.fail("CEX4")
                continue
            cert = {"conditions": ["CEX1", "CEX2", "CEX3", "CEX4"],
                    "uncertain_true": _ctx(unc[0]), "uncertain_false": _ctx(unc[1]),
                    "contrast_true": _ctx(there)}
            out.append(ContrastiveExplanation(x, y, "congruent", cert))
    return track.finish(out, lambda e: (events_key(model, e.fact), events_key(model, e.contrast)))


def _contrast_explanations(model, contexts, psi, actual=None):
    """EX2-EX3 relative to ``contexts``; the contrast only needs to occur somewhere."""
    names = cause_variables(model, psi)
    pool = [actual] if actual is not None else contexts
    cands = sort_events(model, _event_candidates(model, pool, names))
    memo = {}

    def sat2(e):
        if e not in memo:
            memo[e] = _sufficient_everywhere(model, contexts, e, psi)
        return memo[e]

    return [e for e in cands if sat2(e) and not any(sat2(s) for s in subsets(e, 1) if len(s) < len(e))]


def enumerate_congruent_explanations_prime(k1: EpistemicState, k2: EpistemicState, fact, surrogate,
                                           actual=None, actual_contrast=None) -> Results:
    """CEX1'-CEX4': differences between partial explanations in the two states."""
    _cong_preconditions(k1, k2, fact, surrogate)
    model = k1.model
    track = _Tracker("congruent-prime")
    xs_pool = set()
    for e, _ in _explanations(model, k1.contexts, fact, (), actual):
        xs_pool |= set(subsets(e, 1))
    if not xs_pool:
        track.fail("CEX1'")
        return track.finish([], None)
    ys_pool = {}
    for e in _contrast_explanations(model, k2.contexts, surrogate, actual_contrast):
        for sub in subsets(e, 1):
            ys_pool.setdefault(tuple(k for k, _ in sub), set()).add(sub)
    pairs = []
    for x in xs_pool:
        ys = ys_pool.get(tuple(k for k, _ in x))
        if not ys:
            track.fail("CEX2'")
            continue
        for y in ys:
            if any(a == b for (_, a), (_, b) in zip(x, y)):
                track.fail("CEX3'")
                continue
            pairs.append((x, y, None))
    kept = _maximal_pairs(pairs)
    out = [ContrastiveExplanation(x, y, "congruent", {"conditions": ["CEX1'", "CEX2'", "CEX3'", "CEX4'"]})
           for x, y, _ in kept]
    return track.finish(out, lambda e: (events_key(model, e.fact), events_key(model, e.contrast)))


# general explanations ---------------------------------------------------------------

def _as_hypotheses(space):
    out = []
    for h in space:
        out.append(h if isinstance(h, Hypothesis) else Hypothesis(h))
    return out


def _valid(model, hyp, cache):
    key = (model, hyp.formula)
    if key not in cache:
        try:
            bind(model, hyp.formula)
        except ModelError:
            cache[key] = False
        else:
            cache[key] = all(_eval(model, u, hyp.formula, ()) for u in enumerate_contexts(model))
    return cache[key]


def _general_events(state, names_of):
    out = {()}
    for s in state.situations:
        val = s.values()
        full = tuple((n, val[n]) for n in names_of(s.model))
        out |= set(subsets(full, 1))
    return out


def _holds_events(sit, events):
    val = sit.values()
    return all(val.get(k) == v for k, v in events)


def _general_uncertain(state, hyp, events, cache):
    yes = no = None
    for s in state.situations:
        if _valid(s.model, hyp, cache) and _holds_events(s, events):
            yes = yes or s
        else:
            no = no or s
    return (yes, no) if yes and no else None


def _model_set(state, hyp, cache):
    return frozenset(i for i, m in enumerate(state.models) if _valid(m, hyp, cache))


def _mask(ids):
    return sum(1 << i for i in ids)


def _dominated(keys):
    """keys[i] = (model-set masks, event sets); True where another key is weakly
    larger on every mask, weakly smaller on every event set, and strictly better
    somewhere."""
    uniq = list(dict.fromkeys(keys))
    verdict = {}
    for masks, evs in uniq:
        verdict[(masks, evs)] = any(
            (masks2, evs2) != (masks, evs)
            and all(m2 & m == m for m, m2 in zip(masks, masks2)) and all(e2 <= e for e, e2 in zip(evs, evs2))
            for masks2, evs2 in uniq)
    return [verdict[k] for k in keys]


def _sit_cert(state, s):
    return {"situation": state.situations.index(s), "context": _ctx(s.context)}


def enumerate_general_explanations(state: GeneralEpistemicState, event, hypothesis_space,
                                   actual: Situation | None = None) -> Results:
    """(alpha, X=x) pairs: alpha restricts the models, X=x the contexts."""
    hyps = _as_hypotheses(hypothesis_space)
    if not hyps:
        raise PreconditionError("hypotheses", "empty hypothesis space")
    if TRUE_HYPOTHESIS not in hyps and all(h.formula != TRUE for h in hyps):
        hyps = [TRUE_HYPOTHESIS] + hyps
    for s in state.situations:
        guard(s.model)
        bind(s.model, event)
        if not _eval(s.model, s.context, event, ()):
            raise PreconditionError("EX1", f"event fails in context {_ctx(s.context)}")
    cache = {}
    track = _Tracker("plain")

    def names_of(m):
        return cause_variables(m, event)

    events = sort_events(state.models[0], _general_events(state, names_of) - {()})
    if actual is not None:
        events = [e for e in events if _holds_events(actual, e)]
        hyps = [h for h in hyps if _valid(actual.model, h, cache)]

    def sat2(h, e):
        hit = False
        for s in state.situations:
            if not _valid(s.model, h, cache) or not _holds_events(s, e):
                continue
            hit = True
            if not all(s.model.has(k) for k, _ in e):
                return False
            if not is_sufficient(s.model, s.context, e, event):
                return False
        return hit

    sat = [(h, e) for h in hyps for e in events if sat2(h, e)]
    if not sat:
        track.fail("EX2")
    sets = {h: _mask(_model_set(state, h, cache)) for h in hyps}
    dominated = _dominated([((sets[h],), (frozenset(e),)) for h, e in sat])
    out = []
    for (h, e), dom in zip(sat, dominated):
        if dom:
            track.fail("EX3")
            continue
        unc = _general_uncertain(state, h, e, cache)
        if unc is None:
            track.fail("EX4")
            continue
        out.append(GeneralExplanation(h, e, None, (), certificate={
            "conditions": ["EX1", "EX2", "EX3", "EX4"],
            "uncertain_true": _sit_cert(state, unc[0]), "uncertain_false": _sit_cert(state, unc[1])}))
    keyf = lambda g: (g.fact_formula.label or "", repr(g.fact_formula.formula), g.fact_events)
    return track.finish(out, keyf)


def enumerate_general_alternative_explanations(state: GeneralEpistemicState, fact, foil,
                                               hypothesis_space, actual: Situation | None = None) -> Results:
    """Triples (alpha, X=x, X=y): one formula, since only one model is characterised."""
    hyps = _as_hypotheses(hypothesis_space) or [TRUE_HYPOTHESIS]
    if all(h.formula != TRUE for h in hyps):
        hyps = [TRUE_HYPOTHESIS] + hyps
    for s in state.situations:
        guard(s.model)
        bind(s.model, fact)
        bind(s.model, foil)
        if not _eval(s.model, s.context, And(fact, Not(foil)), ()):
            raise PreconditionError("AEX1", f"fact/foil not accepted in context {_ctx(s.context)}")
    cache = {}
    track = _Tracker("alternative")
    cands = set()
    for s in state.situations:
        if actual is not None and s != actual:
            continue
        for x in _partials(s.model, s.context, fact):
            xs = tuple(k for k, _ in x)
            for ys in _hypothetical_partials(s.model, s.context, foil).get(xs, {}):
                y = tuple(zip(xs, ys))
                if all(a != b for (_, a), (_, b) in zip(x, y)):
                    cands.add((x, y))
    if actual is not None:
        hyps = [h for h in hyps if _valid(actual.model, h, cache)]

    def sat2(h, x, y):
        hit = False
        xs, ys = tuple(k for k, _ in x), tuple(v for _, v in y)
        for s in state.situations:
            if not _valid(s.model, h, cache) or not _holds_events(s, x):
                continue
            hit = True
            if x not in _partials(s.model, s.context, fact):
                return False
            if ys not in _hypothetical_partials(s.model, s.context, foil).get(xs, {}):
                return False
        return hit

    sat = [(h, x, y) for h in hyps for x, y in cands if sat2(h, x, y)]
    if not sat:
        track.fail("AEX2")
    sets = {h: _mask(_model_set(state, h, cache)) for h in hyps}
    dominated = _dominated([((sets[h],), (frozenset(x), frozenset(y))) for h, x, y in sat])
    out = []
    for (h, x, y), dom in zip(sat, dominated):
        if dom:
            track.fail("AEX3")
            continue
        unc = _general_uncertain(state, h, x, cache)
        if unc is None:
            track.fail("AEX4")
            continue
        out.append(GeneralExplanation(h, x, None, y, certificate={
            "conditions": ["AEX1", "AEX2", "AEX3", "AEX4"],
            "uncertain_true": _sit_cert(state, unc[0]), "uncertain_false": _sit_cert(state, unc[1])}))
    keyf = lambda g: (g.fact_formula.label or "", repr(g.fact_formula.formula), g.fact_events, g.contrast_events)
    return track.finish(out, keyf)


def enumerate_general_congruent_explanations(k1: GeneralEpistemicState, k2: GeneralEpistemicState,
                                             fact, surrogate, hypothesis_space,
                                             actual: Situation | None = None,
                                             actual_contrast: Situation | None = None) -> Results:
    """<(alpha, X=x), (beta, Y=y)> with function differences carried along."""
    hyps = _as_hypotheses(hypothesis_space) or [TRUE_HYPOTHESIS]
    if all(h.formula != TRUE for h in hyps):
        hyps = [TRUE_HYPOTHESIS] + hyps
    for state, phi in ((k1, fact), (k2, surrogate)):
        for s in state.situations:
            guard(s.model)
            bind(s.model, phi)
            if not _eval(s.model, s.context, phi, ()):
                raise PreconditionError("CEX1", f"not believed in context {_ctx(s.context)}")
    cache = {}
    track = _Tracker("congruent")
    pair_info = {}
    for sa in k1.situations:
        for sb in k2.situations:
            diff, cands = general_congruent_candidates(sa, sb, fact, surrogate)
            pair_info[(sa, sb)] = (diff, set(maximal_general_pairs(diff, cands)))
    xs_pool, ys_pool = {()}, {()}
    for (sa, sb), (diff, cands) in pair_info.items():
        if actual is not None and sa != actual or actual_contrast is not None and sb != actual_contrast:
            continue
        for x, y in cands:
            xs_pool.add(x)
            ys_pool.add(y)
    hyps_a, hyps_b = list(hyps), list(hyps)
    if actual is not None:
        hyps_a = [h for h in hyps if _valid(actual.model, h, cache)]
    if actual_contrast is not None:
        hyps_b = [h for h in hyps if _valid(actual_contrast.model, h, cache)]

    def sat2(a, x, b, y):
        sa_list = [s for s in k1.situations if _valid(s.model, a, cache) and _holds_events(s, x)]
        sb_list = [s for s in k2.situations if _valid(s.model, b, cache) and _holds_events(s, y)]
        if not sa_list or not sb_list:
            return None
        diffs = set()
        for sa in sa_list:
            for sb in sb_list:
                diff, cands = pair_info[(sa, sb)]
                if (x, y) not in cands:
                    return None
                diffs.add(diff)
        return tuple(sorted(diffs))

    sat = []
    for a in hyps_a:
        for b in hyps_b:
            for x in xs_pool:
                for y in ys_pool:
                    d = sat2(a, x, b, y)
                    if d is None:
                        track.fail("CEX2")
                    else:
                        sat.append((a, x, b, y, d))
    seta = {h: _mask(_model_set(k1, h, cache)) for h in hyps}
    setb = {h: _mask(_model_set(k2, h, cache)) for h in hyps}
    dominated = _dominated([((seta[a], setb[b]), (frozenset(x), frozenset(y))) for a, x, b, y, _ in sat])
    out = []
    for (a, x, b, y, d), dom in zip(sat, dominated):
        if dom:
            track.fail("CEX3")
            continue
        unc = _general_uncertain(k1, a, x, cache)
        there = next((s for s in k2.situations if _valid(s.model, b, cache) and _holds_events(s, y)), None)
        if unc is None or there is None:
            track.fail("CEX4")
            continue
        funcs = tuple(sorted(set().union(*map(set, d)))) if d else ()
        out.append(GeneralExplanation(a, x, b, y, funcs, funcs, certificate={
            "conditions": ["CEX1", "CEX2", "CEX3", "CEX4"],
            "uncertain_true": _sit_cert(k1, unc[0]), "uncertain_false": _sit_cert(k1, unc[1]),
            "contrast_true": _sit_cert(k2, there)}))
    keyf = lambda g: (g.fact_formula.label or "", repr(g.fact_formula.formula), g.fact_events,
                      g.contrast_formula.label or "", repr(g.contrast_formula.formula), g.contrast_events)
    return track.finish(out, keyf)
