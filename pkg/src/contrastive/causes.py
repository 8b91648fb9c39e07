"""Actual, sufficient, contrastive, restricted and presupposed causes.

Everything here is exhaustive search over finite domains.  Hypothetical
situations ``M_{W<-w}`` are represented by a *frozen* intervention that is
applied underneath any counterfactual intervention, so no surgered model is
ever materialised during search.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .formula import And, Intervene, Not, Xor, _eval, bind, event_variables, holds_in, incompatible_in
from .model import (CausalModel, Context, ModelError, RestrictedModel, Situation, conj,
                    enumerate_contexts, restrict_model)


class PreconditionError(ValueError):
    """A query's precondition failed; ``condition`` names the failed clause."""

    def __init__(self, condition, message):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


class InstanceTooLarge(ValueError):
    pass


@dataclass
class Limits:
    max_vars: int = 12


limits = Limits()


def guard(model: CausalModel):
    n = len(model.endogenous)
    if n > limits.max_vars:
        raise InstanceTooLarge(f"instance too large: {n} endogenous variables (limit {limits.max_vars})")


@dataclass(frozen=True)
class Witness:
    """AC2 witness: hold ``fixed`` at actual values and set the cause to ``setting``."""

    fixed: tuple
    setting: tuple


@dataclass(frozen=True)
class ContrastivePair:
    fact: tuple
    contrast: tuple
    fact_functions: tuple = ()      # variable names whose F differs (general case)
    contrast_functions: tuple = ()
    hypothetical: tuple | None = None  # W=w under which the contrast side is a cause

    @property
    def variables(self) -> tuple:
        return tuple(k for k, _ in self.fact)


@dataclass(frozen=True)
class RestrictedCause:
    functions: frozenset
    events: tuple


# ordering -------------------------------------------------------------------

def events_key(model, events):
    def idx(k, v):
        try:
            return model.domain(k).index(v)
        except (ModelError, ValueError):
            return -1
    return (len(events), tuple((k, idx(k, v)) for k, v in events))


def sort_events(model, items):
    return sorted(items, key=lambda e: events_key(model, e))


def pair_key(model, p: ContrastivePair):
    return (events_key(model, p.fact), events_key(model, p.contrast),
            p.fact_functions, p.contrast_functions)


def subsets(items, min_size=0):
    items = tuple(items)
    for r in range(min_size, len(items) + 1):
        yield from itertools.combinations(items, r)


# AC1-AC3 ----------------------------------------------------------------------

def cause_variables(model, event) -> tuple:
    """Endogenous variables eligible as causes: those the event itself does not cite."""
    cited = event_variables(event)
    return tuple(n for n in model.endogenous if n not in cited)


def _hyp_descendants(model, names, frozen):
    """Descendants of ``names`` in M_{frozen}; frozen variables lose their parents."""
    fixed = {k for k, _ in frozen} - set(names)
    children = {}
    for f in model.functions:
        if f.target in fixed:
            continue
        for p in f.parents:
            children.setdefault(p, []).append(f.target)
    seen, stack = set(names), list(names)
    while stack:
        for c in children.get(stack.pop(), ()):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return seen


def _merge(*parts):
    out = {}
    for p in parts:
        out.update(p)
    return conj(out)


@lru_cache(maxsize=256)
def _parents(model):
    """Parents each function actually depends on (declared but unused ones dropped)."""
    out = {}
    for f in model.functions:
        doms = [model.domain(p) for p in f.parents]
        used = []
        for i, p in enumerate(f.parents):
            rest = [d for j, d in enumerate(doms) if j != i]
            for key in itertools.product(*rest):
                vals = {f.lookup(key[:i] + (v,) + key[i:]) for v in doms[i]}
                if len(vals) > 1:
                    used.append(p)
                    break
        out[f.target] = tuple(used)
    return out


@lru_cache(maxsize=4_096)
def _ancestors(model, names):
    par, seen, stack = _parents(model), set(names), list(names)
    while stack:
        for p in par.get(stack.pop(), ()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return frozenset(seen)


def _reaching(model, cited, blockers):
    """Intervened variables that can still influence a cited variable."""
    par, seen, out = _parents(model), set(), set(cited & blockers)
    stack = [n for n in cited if n not in blockers]
    while stack:
        for p in par.get(stack.pop(), ()):
            if p in blockers:
                out.add(p)
            elif p not in seen:
                seen.add(p)
                stack.append(p)
    return out


@lru_cache(maxsize=200_000)
def _witness(model, ctx, events, phi, frozen=(), ranges=None):
    if not events:
        return None
    xs = tuple(k for k, _ in events)
    actual = model.evaluate(ctx, frozen)
    frozen_vars = {k for k, _ in frozen}
    cited = event_variables(phi)
    # holding a variable that cannot reach phi changes nothing
    desc = sorted((_hyp_descendants(model, xs, frozen) - set(xs) - frozen_vars)
                  & _ancestors(model, cited))
    rng = dict(ranges) if ranges is not None else None
    doms = [rng[x] if rng is not None else model.domain(x) for x in xs]
    base = dict(frozen)
    for held in subsets(desc):
        hold = {w: actual[w] for w in held}
        fixed = dict(base)
        fixed.update(hold)
        for x in xs:
            fixed.pop(x, None)
        keys = sorted(set(fixed) | set(xs))
        slot = {k: i for i, k in enumerate(keys)}
        template = [(k, fixed.get(k)) for k in keys]
        pos = [slot[x] for x in xs]
        # settings of variables cut off from phi are irrelevant: try one value
        live = _reaching(model, cited, frozenset(keys))
        opts = [d if x in live else d[:1] for x, d in zip(xs, doms)]
        for xp in itertools.product(*opts):
            row = list(template)
            for i, x, v in zip(pos, xs, xp):
                row[i] = (x, v)
            if not _eval(model, ctx, phi, tuple(row)):
                return Witness(conj(hold), conj(zip(xs, xp)))
    return None


def _true_in(model, ctx, events, frozen=()):
    val = model.evaluate(ctx, frozen)
    return all(val[k] == v for k, v in events)


def is_sufficient(model, ctx, events, phi, frozen=(), ranges=None) -> bool:
    """AC1 and AC2."""
    events = conj(events)
    if not _true_in(model, ctx, events, frozen) or not _eval(model, ctx, phi, frozen):
        return False
    if ranges is None:
        # witnesses extend to supersets (extra conjuncts keep their actual
        # values), so sufficiency means containing some actual cause
        have = set(events)
        return any(set(c) <= have for c in _causes(model, ctx, phi, frozen))
    return _witness(model, ctx, events, phi, frozen, ranges) is not None


@lru_cache(maxsize=50_000)
def _causes(model, ctx, phi, frozen=(), ranges=None):
    if not _eval(model, ctx, phi, frozen):
        return ()
    val = model.evaluate(ctx, frozen)
    blocked = _frozen_blocks(model, phi)
    if blocked and blocked <= {k for k, _ in frozen}:
        # every cited variable is pinned by the hypothetical
        return ()
    names = cause_variables(model, phi)
    if ranges is None and names:
        # a superset of a witnessed set is witnessed, so an unwitnessed
        # full set rules out every cause
        if _witness(model, ctx, tuple((x, val[x]) for x in names), phi, frozen) is None:
            return ()
    found = []
    for xs in subsets(names, 1):
        s = set(xs)
        if any(set(k for k, _ in c) <= s for c in found):
            continue
        events = tuple((x, val[x]) for x in xs)
        if _witness(model, ctx, events, phi, frozen, ranges) is not None:
            found.append(events)
    return tuple(sort_events(model, found))


@lru_cache(maxsize=50_000)
def _partials(model, ctx, phi, frozen=(), ranges=None) -> frozenset:
    out = set()
    for c in _causes(model, ctx, phi, frozen, ranges):
        for sub in subsets(c, 1):
            out.add(sub)
    return frozenset(out)


def enumerate_actual_causes(situation: Situation, event) -> list:
    """All actual causes of ``event`` (AC1-AC3, modified AC2), canonically ordered."""
    model, ctx = situation.model, situation.context
    bind(model, event)
    guard(model)
    if not _eval(model, ctx, event, ()):
        raise PreconditionError("AC1", "event does not hold in the situation")
    return list(_causes(model, ctx, event))


def actual_cause_witness(situation: Situation, events, event) -> Witness | None:
    events = conj(events)
    if not is_sufficient(situation.model, situation.context, events, event):
        return None
    return _witness(situation.model, situation.context, events, event)


def check_sufficient_cause(situation: Situation, events, event) -> bool:
    bind(situation.model, event)
    return is_sufficient(situation.model, situation.context, conj(events), event)


def check_actual_cause(situation: Situation, events, event) -> bool:
    events = conj(events)
    if not check_sufficient_cause(situation, events, event):
        return False
    return not any(is_sufficient(situation.model, situation.context, sub, event)
                   for sub in subsets(events) if len(sub) < len(events))


def is_partial_cause(model, ctx, events, phi, frozen=(), ranges=None) -> bool:
    return conj(events) in _partials(model, ctx, phi, frozen, ranges)


# hypothetical situations -------------------------------------------------------

def hypotheticals(model: CausalModel, exclude=()):
    """Every non-empty W=w over endogenous variables, canonically ordered."""
    names = [n for n in model.endogenous if n not in exclude]
    for ws in subsets(names, 1):
        for vals in itertools.product(*(model.domain(w) for w in ws)):
            yield tuple(zip(ws, vals))


def _frozen_blocks(model, formula):
    cited = event_variables(formula)
    return cited if cited and all(not model.var(v).exogenous for v in cited) else frozenset()


def live_hypotheticals(model: CausalModel, psi):
    """Hypotheticals in which every frozen variable can still influence psi.

    A frozen variable whose paths to psi all run through other frozen
    variables changes nothing, so dropping it gives an equivalent hypothetical
    that is enumerated anyway.  Hypotheticals pinning every cited variable
    are skipped too: psi then has no causes.
    """
    cited = event_variables(psi)
    blocked = _frozen_blocks(model, psi)
    for hyp in hypotheticals(model):
        ws = frozenset(k for k, _ in hyp)
        if blocked and blocked <= ws:
            continue
        if len(_reaching(model, cited, ws)) < len(ws):
            continue
        yield hyp


@lru_cache(maxsize=2_000)
def _hypothetical_partials(model, ctx, psi):
    """Map variable-tuple -> {values: first hypothetical W=w} for partial causes of psi."""
    out = {}
    for hyp in live_hypotheticals(model, psi):
        if not _eval(model, ctx, psi, hyp):
            continue
        for part in _partials(model, ctx, psi, hyp):
            xs = tuple(k for k, _ in part)
            ys = tuple(v for _, v in part)
            out.setdefault(xs, {}).setdefault(ys, hyp)
    return out


def foil_partial_causes(model, ctx, psi) -> dict:
    return _hypothetical_partials(model, ctx, psi)


# contrastive alternative causes --------------------------------------------------

def _distinct(a, b):
    return all(x != y for (_, x), (_, y) in zip(a, b))


def _maximal_by_vars(pairs):
    sets = [frozenset(p.variables) for p in pairs]
    return [p for p, s in zip(pairs, sets) if not any(s < t for t in sets)]


def alternative_candidates(model, ctx, fact, foil):
    """Pairs satisfying CAC1-CAC4 (no maximality)."""
    out = []
    foil_parts = _hypothetical_partials(model, ctx, foil)
    for x in _partials(model, ctx, fact):
        xs = tuple(k for k, _ in x)
        for ys, hyp in foil_parts.get(xs, {}).items():
            y = tuple(zip(xs, ys))
            if _distinct(x, y):
                out.append(ContrastivePair(x, y, hypothetical=hyp))
    return out


def enumerate_alternative_causes(situation: Situation, fact, foil) -> list:
    """Contrastive alternative causes <X=x, X=y> of <fact, foil> (CAC1-CAC5)."""
    model, ctx = situation.model, situation.context
    bind(model, fact)
    bind(model, foil)
    guard(model)
    if not _eval(model, ctx, fact, ()):
        raise PreconditionError("CAC1", "fact does not hold in the situation")
    if not incompatible_in(situation, fact, foil):
        raise PreconditionError("incompatible", "fact and foil are not incompatible")
    if _eval(model, ctx, foil, ()):
        raise PreconditionError("CAC2", "foil holds in the situation")
    if not _hypothetical_partials(model, ctx, foil):
        raise PreconditionError("CAC3", "foil is infeasible: it has no cause in any hypothetical situation")
    pairs = _maximal_by_vars(alternative_candidates(model, ctx, fact, foil))
    return sorted(pairs, key=lambda p: pair_key(model, p))


# congruent causes ---------------------------------------------------------------

def congruent_candidates(model, ctx_a, ctx_b, fact, surrogate):
    out = []
    right = {}
    for y in _partials(model, ctx_b, surrogate):
        right.setdefault(tuple(k for k, _ in y), []).append(y)
    for x in _partials(model, ctx_a, fact):
        for y in right.get(tuple(k for k, _ in x), ()):
            if _distinct(x, y):
                out.append(ContrastivePair(x, y))
    return out


def enumerate_congruent_causes(sit_a: Situation, sit_b: Situation, fact, surrogate) -> list:
    """Congruent causes over one shared model (CCC1-CCC4, simple case)."""
    if sit_a.model != sit_b.model:
        raise PreconditionError("models", "situations use different models; use the general case")
    model = sit_a.model
    bind(model, fact)
    bind(model, surrogate)
    guard(model)
    if not _eval(model, sit_a.context, fact, ()):
        raise PreconditionError("CCC1", "fact does not hold in the first situation")
    if not _eval(model, sit_b.context, surrogate, ()):
        raise PreconditionError("CCC2", "surrogate does not hold in the second situation")
    pairs = _maximal_by_vars(congruent_candidates(model, sit_a.context, sit_b.context, fact, surrogate))
    return sorted(pairs, key=lambda p: pair_key(model, p))


# restricted causes and the general congruent case ----------------------------------

@lru_cache(maxsize=10_000)
def influencing_functions(model: CausalModel, event) -> frozenset:
    """Variables whose function can change the event's truth in some context.

    F_X is kept iff detaching X (letting it take any value) flips the event
    somewhere; every other function is removable.
    """
    keep = set()
    ctxs = list(enumerate_contexts(model))
    for name in model.endogenous:
        for u in ctxs:
            base = _eval(model, u, event, ())
            if any(_eval(model, u, event, ((name, v),)) != base for v in model.domain(name)):
                keep.add(name)
                break
    return frozenset(keep)


def compute_restricted_causes(situation: Situation, event) -> list:
    """(F', X=x) with X=x an actual cause and F' the functions the event depends on.

    Every superset of an actual cause that is true in the situation is also
    sufficient; only the minimal ones are listed.
    """
    model, ctx = situation.model, situation.context
    bind(model, event)
    if not _eval(model, ctx, event, ()):
        raise PreconditionError("AC1", "event does not hold in the situation")
    fs = influencing_functions(model, event)
    causes = _causes(model, ctx, event) or ((),)
    return [RestrictedCause(fs, c) for c in causes]


def _parts_with_empty(model, ctx, phi):
    return {()} | set(_partials(model, ctx, phi))


def general_congruent_candidates(sit_a, sit_b, fact, surrogate):
    ma, mb = sit_a.model, sit_b.model
    fa, fb = influencing_functions(ma, fact), influencing_functions(mb, surrogate)
    diff = tuple(sorted(n for n in fa & fb if not ma.same_function(n, mb)))
    same_model = ma == mb

    def one_sided_ok(names, other_model, other_relevant):
        if same_model:
            return not names
        return all(not other_model.has(n) or n not in other_relevant for n in names)

    out = []
    for x in _parts_with_empty(ma, sit_a.context, fact):
        xd = dict(x)
        for y in _parts_with_empty(mb, sit_b.context, surrogate):
            yd = dict(y)
            shared = set(xd) & set(yd)
            if any(xd[k] == yd[k] for k in shared):
                continue
            if not one_sided_ok(set(xd) - shared, mb, fb):
                continue
            if not one_sided_ok(set(yd) - shared, ma, fa):
                continue
            out.append((x, y))
    return diff, out


def maximal_general_pairs(diff, cands) -> list:
    """CCC4 over (x, y, shared variables); the empty pair needs a function difference."""
    keyed = [(set(x), set(y), {k for k, _ in x} & {k for k, _ in y}, x, y) for x, y in cands]
    out = []
    for sx, sy, sh, x, y in keyed:
        if any(sx <= tx and sy <= ty and sh <= th and (sx, sy) != (tx, ty)
               for tx, ty, th, _, _ in keyed):
            continue
        if not x and not y and not diff:
            continue
        out.append((x, y))
    return out


def enumerate_congruent_causes_general(sit_a: Situation, sit_b: Situation, fact, surrogate) -> list:
    """Congruent causes across two models: function and event differences."""
    for m in (sit_a.model, sit_b.model):
        guard(m)
    bind(sit_a.model, fact)
    bind(sit_b.model, surrogate)
    if not _eval(sit_a.model, sit_a.context, fact, ()):
        raise PreconditionError("CCC1", "fact does not hold in the first situation")
    if not _eval(sit_b.model, sit_b.context, surrogate, ()):
        raise PreconditionError("CCC2", "surrogate does not hold in the second situation")
    diff, cands = general_congruent_candidates(sit_a, sit_b, fact, surrogate)
    pairs = [ContrastivePair(x, y, diff, diff) for x, y in maximal_general_pairs(diff, cands)]
    model = sit_a.model
    return sorted(pairs, key=lambda p: pair_key(model, p))


# presupposed causes ----------------------------------------------------------------

@lru_cache(maxsize=1_000)
def _restriction(model, fact, foil):
    return restrict_model(model, fact, foil)


def presupposed_causes(situation: Situation, fact, foil) -> list:
    """Actual causes of the fact in M^{fact xor foil}."""
    model, ctx = situation.model, situation.context
    if not _eval(model, ctx, fact, ()):
        raise PreconditionError("AC1", "fact does not hold in the situation")
    try:
        r = _restriction(model, fact, foil)
    except ModelError as e:
        raise PreconditionError("PAC", str(e)) from None
    if not r.admits_context(ctx):
        raise PreconditionError("PAC", "situation violates fact xor foil")
    return list(_causes(model, ctx, fact, (), r.ranges))


def check_presupposed_cause(situation: Situation, events, fact, foil) -> bool:
    return conj(events) in presupposed_causes(situation, fact, foil)


# consistency of cause sets -----------------------------------------------------------

def maximal_consistent_unions(pairs) -> list:
    """Unions of pairs whose sides give every variable at most one value, maximal."""
    pairs = list(pairs)
    found = []

    def consistent(acc_x, acc_y, p):
        return all(acc_x.get(k, v) == v for k, v in p.fact) and \
            all(acc_y.get(k, v) == v for k, v in p.contrast)

    def extend(i, chosen, acc_x, acc_y):
        if i == len(pairs):
            found.append((frozenset(chosen), conj(acc_x), conj(acc_y)))
            return
        p = pairs[i]
        if consistent(acc_x, acc_y, p):
            nx, ny = dict(acc_x), dict(acc_y)
            nx.update(p.fact)
            ny.update(p.contrast)
            extend(i + 1, chosen | {i}, nx, ny)
        extend(i + 1, chosen, acc_x, acc_y)

    extend(0, frozenset(), {}, {})
    sets = [c for c, _, _ in found]
    out = []
    for c, x, y in found:
        if c and not any(c < d for d in sets) and (x, y) not in out:
            out.append((x, y))
    return out
