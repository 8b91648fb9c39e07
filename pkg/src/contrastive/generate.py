"""Random recursive models and query bundles.

Generated queries satisfy their preconditions by construction (facts hold in
their situations, foils are incompatible with facts, epistemic states believe
the fact), except foil feasibility (CAC3), which is left to the engine to
report.  The bundles serve the property suites, the oracle comparison and
``contrastive run random`` alike.  Names, labels and state
forms are varied to exercise the printer.
"""
from __future__ import annotations

import itertools
import random

from .dsl import Bundle, ContextDecl, HypothesisDecl, Query, StateDecl, CLAUSES
from .formula import And, Atom, Intervene, Not, Or, _eval, event_variables
from .model import CausalModel, Context, StructuralFunction, Variable, enumerate_contexts

DOMAINS = (("false", "true"), ("0", "1"), ("0", "1", "2"), ("a", "b"), ("lo", "mid", "hi"))
LABELS = ("a \"quoted\" label", "back\\slash", "größer", "x -> y", "plain")


def random_domain(rng, max_dom=3):
    return rng.choice([d for d in DOMAINS if len(d) <= max_dom])


def random_table(rng, model_vars, target, parents, domain):
    keys = list(itertools.product(*(model_vars[p] for p in parents)))
    rows = {k: rng.choice(domain) for k in keys}
    default = None
    if keys and rng.random() < 0.4:
        default = rng.choice(domain)
        rows = {k: v for k, v in rows.items() if v != default}
    return StructuralFunction(target, parents, rows, default)


def random_model(rng, max_endo=5, max_dom=3, max_exo=3, max_parents=3, prefix="", min_endo=1) -> CausalModel:
    """A recursive model over a random DAG with random decision tables."""
    n_exo = rng.randint(1, max_exo)
    n_endo = rng.randint(min(min_endo, max_endo), max_endo)
    exo = [f"{prefix}U{i}" for i in range(n_exo)]
    endo = [f"{prefix}X{i}" for i in range(n_endo)]
    doms = {n: random_domain(rng, max_dom) for n in exo + endo}
    variables = [Variable(n, doms[n], exogenous=True) for n in exo]
    variables += [Variable(n, doms[n]) for n in endo]
    functions = []
    for i, n in enumerate(endo):
        pool = exo + endo[:i]
        k = rng.randint(1, min(max_parents, len(pool)))
        parents = tuple(sorted(rng.sample(pool, k)))
        functions.append(random_table(rng, doms, n, parents, doms[n]))
    return CausalModel(variables, functions)


def variant(rng, model: CausalModel) -> CausalModel:
    """Same signature with one endogenous function redrawn."""
    doms = {v.name: v.domain for v in model.variables}
    target = rng.choice(model.endogenous)
    old = model.function(target)
    for _ in range(10):
        f = random_table(rng, doms, target, old.parents, doms[target])
        if f != old:
            break
    return CausalModel(model.variables, [f if g.target == target else g for g in model.functions])


# formulas ----------------------------------------------------------------------------

def random_formula(rng, model, depth=2):
    names = list(model.endogenous) + list(model.exogenous)
    if depth <= 0 or rng.random() < 0.35:
        n = rng.choice(names)
        return Atom(n, rng.choice(model.domain(n)))
    r = rng.random()
    if r < 0.2:
        return Not(random_formula(rng, model, depth - 1))
    if r < 0.5:
        return And(random_formula(rng, model, depth - 1), random_formula(rng, model, depth - 1))
    if r < 0.8:
        return Or(random_formula(rng, model, depth - 1), random_formula(rng, model, depth - 1))
    n = rng.choice(model.endogenous)
    return Intervene(((n, rng.choice(model.domain(n))),), random_formula(rng, model, depth - 1))


def _fact(rng, model, values, deep=False):
    """An event true under ``values``: one atom, a conjunction, or a disjunction.
    ``deep`` prefers variables with an endogenous parent, which have causes."""
    endo = list(model.endogenous)
    inner = [n for n in endo if any(p in endo for p in model.function(n).parents)]
    x = rng.choice(inner if deep and inner and rng.random() < 0.85 else endo)
    atom = Atom(x, values[x])
    r = rng.random()
    if r < 0.6 or len(endo) < 2:
        return atom
    y = rng.choice([n for n in endo if n != x])
    if r < 0.85:
        return And(atom, Atom(y, values[y]))
    other = [v for v in model.domain(y) if v != values[y]]
    return Or(atom, Atom(y, rng.choice(other)))


def _foil(rng, model, fact):
    """An event citing the fact's variables that can never hold with it."""
    if isinstance(fact, Atom):
        other = [v for v in model.domain(fact.var) if v != fact.value]
        return Atom(fact.var, rng.choice(other))
    if isinstance(fact, And) and rng.random() < 0.5:
        a, b = fact.left, fact.right
        return And(Atom(a.var, rng.choice([v for v in model.domain(a.var) if v != a.value])), b)
    return Not(fact)


def _surrogate(rng, model, fact, u):
    """A context and an event true there, preferably the fact's variable at another value."""
    ctxs = list(enumerate_contexts(model))
    var = sorted(event_variables(fact))[0]
    here = model.evaluate(u)[var] if var in model.endogenous else None
    moved = [c for c in ctxs if model.evaluate(c).get(var) != here]
    if moved and rng.random() < 0.75:
        u2 = rng.choice(moved)
        return u2, Atom(var, model.evaluate(u2)[var])
    u2 = rng.choice(ctxs)
    return u2, _fact(rng, model, model.evaluate(u2))


def _where_state(model, formula):
    return [u for u in enumerate_contexts(model) if _eval(model, u, formula, ())]


# bundles ---------------------------------------------------------------------------

class _Builder:
    def __init__(self, rng):
        self.rng = rng
        self.b = Bundle()
        self.ctx_names = {}
        self.n = 0

    def fresh(self, stem):
        self.n += 1
        return f"{stem}{self.n}" if self.rng.random() < 0.7 else f"{stem}-{self.n}"

    def context(self, model_name, u):
        key = (model_name, u)
        if key not in self.ctx_names:
            name = self.fresh("c")
            self.b.contexts[name] = ContextDecl(model_name, u)
            self.ctx_names[key] = name
        return self.ctx_names[key]

    def state(self, model_name, contexts, formula=None):
        """A contexts state, or a where state when the filter reproduces it."""
        name = self.fresh("k")
        m = self.b.models[model_name]
        if formula is not None and self.rng.random() < 0.5:
            self.b.states[name] = StateDecl("where", model_name, formula=formula)
            return name, _where_state(m, formula)
        ctxs = tuple(self.context(model_name, u) for u in contexts)
        self.b.states[name] = StateDecl("contexts", model_name, contexts=ctxs)
        return name, list(contexts)

    def situations(self, items):
        """items: [(model name, context)] -> a situations state."""
        name = self.fresh("s")
        self.b.states[name] = StateDecl("situations", items=tuple(
            (m, self.context(m, u)) for m, u in items))
        return name

    def hypotheses(self, model_names):
        rng = self.rng
        if rng.random() < 0.4:
            return "default"
        name = self.fresh("h")
        items = []
        for _ in range(rng.randint(1, 3)):
            m = rng.choice(model_names)
            model = self.b.models[m]
            if rng.random() < 0.5:
                label = rng.choice(LABELS) if rng.random() < 0.5 else None
                items.append(HypothesisDecl(function=(rng.choice(model.endogenous), m), label=label))
            else:
                label = rng.choice(LABELS) if rng.random() < 0.5 else None
                items.append(HypothesisDecl(formula=random_formula(rng, model, 2), label=label))
        self.b.hypotheses[name] = tuple(items)
        return name

    def query(self, kind, **clauses):
        name = self.fresh("q")
        cl = {k.replace("_", "-"): v for k, v in clauses.items() if v is not None}
        self.b.queries[name] = Query(kind, tuple((c, cl[c]) for c in CLAUSES if c in cl))
        return name


SIMPLE_KINDS = ("eval", "cause", "sufficient", "restricted", "alt-cause", "cong-cause",
                "presupposed", "explain", "alt-explain", "cong-explain")
GENERAL_KINDS = ("cong-cause-general", "general-explain", "general-alt-explain", "general-cong-explain")
ALL_KINDS = SIMPLE_KINDS + GENERAL_KINDS


def random_bundle(rng: random.Random, n_queries=6, kinds=ALL_KINDS, max_endo=5, max_dom=3) -> Bundle:
    """Two related models (one a variant of the other) and ``n_queries`` valid queries."""
    bld = _Builder(rng)
    base = random_model(rng, max_endo=max_endo, max_dom=max_dom, min_endo=3)
    names = ("m", "m-variant") if rng.random() < 0.5 else ("base", "other")
    bld.b.models[names[0]] = base
    bld.b.models[names[1]] = variant(rng, base)
    for _ in range(n_queries * 4):
        if len(bld.b.queries) >= n_queries:
            break
        _add_query(bld, rng.choice(kinds), names)
    return bld.b


def _add_query(bld, kind, names):
    rng = bld.rng
    mname = names[0] if kind in SIMPLE_KINDS or rng.random() < 0.5 else names[1]
    model = bld.b.models[mname]
    ctxs = list(enumerate_contexts(model))
    u = rng.choice(ctxs)
    val = model.evaluate(u)
    fact = _fact(rng, model, val, deep=True)
    where = (mname, bld.context(mname, u))

    if kind == "eval":
        return bld.query(kind, **{"in": where, "event": random_formula(rng, model)})
    if kind in ("cause", "restricted"):
        return bld.query(kind, **{"in": where, "event": fact})
    if kind == "sufficient":
        cited = event_variables(fact)
        pool = [n for n in model.endogenous if n not in cited]
        if not pool:
            return None
        pick = rng.sample(pool, rng.randint(1, len(pool)))
        ev = Atom(pick[0], val[pick[0]])
        for n in pick[1:]:
            ev = And(ev, Atom(n, val[n]))
        return bld.query(kind, **{"in": where, "event": fact, "events": ev})
    if kind in ("alt-cause", "presupposed"):
        return bld.query(kind, **{"in": where, "fact": fact, "foil": _foil(rng, model, fact)})
    if kind in ("cong-cause", "cong-cause-general"):
        other = names[1] if kind == "cong-cause-general" else mname
        m2 = bld.b.models[other]
        u2, sur = _surrogate(rng, m2, fact, u)
        return bld.query(kind, **{"in": where, "vs": (other, bld.context(other, u2)),
                                 "fact": fact, "surrogate": sur})
    if kind in ("explain", "alt-explain", "cong-explain"):
        foil = _foil(rng, model, fact) if kind == "alt-explain" else None
        good = [c for c in ctxs if _eval(model, c, fact, ()) and (foil is None or not _eval(model, c, foil, ()))]
        k = _sample(rng, good, u)
        sname, k = bld.state(mname, k, fact if len(good) == len(k) else None)
        actual = bld.context(mname, u) if rng.random() < 0.3 and u in k else None
        if kind == "explain":
            return bld.query(kind, state=sname, event=fact, actual=actual)
        if kind == "alt-explain":
            route = rng.choice((None, "primary", "prime"))
            return bld.query(kind, state=sname, fact=fact, foil=foil, actual=actual, route=route)
        u2, sur = _surrogate(rng, model, fact, u)
        good2 = [c for c in ctxs if _eval(model, c, sur, ())]
        s2, _ = bld.state(mname, _sample(rng, good2, u2), sur if rng.random() < 0.5 else None)
        route = rng.choice((None, "primary", "prime"))
        return bld.query(kind, state=sname, contrast_state=s2, fact=fact, surrogate=sur,
                         actual=actual, route=route)
    # general explanation kinds: situations spread over both models
    models = [bld.b.models[n] for n in names]
    fact = _fact(rng, models[0], models[0].evaluate(u), deep=True)
    foil = _foil(rng, models[0], fact) if kind == "general-alt-explain" else None
    items = _general_items(rng, names, models, fact, foil)
    if not items:
        return None
    sname = bld.situations(items)
    hyp = bld.hypotheses(list(names)) if rng.random() < 0.8 else None
    actual = items[0] if rng.random() < 0.3 else None
    actual = (actual[0], bld.context(*actual)) if actual else None
    if kind == "general-explain":
        return bld.query(kind, state=sname, event=fact, hypotheses=hyp, actual=actual)
    if kind == "general-alt-explain":
        return bld.query(kind, state=sname, fact=fact, foil=foil, hypotheses=hyp, actual=actual)
    u2, sur = _surrogate(rng, models[1], fact, u)
    items2 = _general_items(rng, names[1:], models[1:], sur, None)
    if not items2:
        return None
    s2 = bld.situations(items2)
    return bld.query(kind, state=sname, contrast_state=s2, fact=fact, surrogate=sur,
                     hypotheses=hyp, actual=actual)


def _sample(rng, good, must=None):
    k = rng.randint(min(2, len(good)), min(4, len(good)))
    out = rng.sample(good, k)
    if must is not None and must in good and must not in out and rng.random() < 0.5:
        out[0] = must
    return sorted(out, key=lambda c: c.assignment)


def _general_items(rng, names, models, fact, foil):
    pool = []
    for n, m in zip(names, models):
        for c in enumerate_contexts(m):
            if _eval(m, c, fact, ()) and (foil is None or not _eval(m, c, foil, ())):
                pool.append((n, c))
    if not pool:
        return []
    return rng.sample(pool, rng.randint(1, min(4, len(pool))))


def random_instance(seed: int, kind: str, **kw):
    """(bundle, query name) for one query of ``kind`` drawn from ``seed``."""
    rng = random.Random(seed)
    for _ in range(50):
        b = random_bundle(rng, n_queries=1, kinds=(kind,), **kw)
        if b.queries:
            return b, next(iter(b.queries))
    raise RuntimeError(f"could not generate a {kind} query")


__all__ = ["random_model", "variant", "random_formula", "random_bundle", "random_instance",
           "ALL_KINDS", "SIMPLE_KINDS", "GENERAL_KINDS"]
