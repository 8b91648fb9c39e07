"""Causal formulas: primitive events, Boolean connectives, interventions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import CausalModel, Context, ModelError, Situation, conj, enumerate_contexts


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    var: str
    value: str

    def __post_init__(self):
        object.__setattr__(self, "value", str(self.value))


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Intervene(Formula):
    assignments: tuple
    body: Formula

    def __post_init__(self):
        object.__setattr__(self, "assignments", conj(self.assignments))


TRUE = Top()


def Implies(a, b) -> Formula:
    return Or(Not(a), b)


def Xor(a, b) -> Formula:
    return Or(And(a, Not(b)), And(Not(a), b))


def conjunction(events) -> Formula:
    """Formula for a conjunction of primitive events (``TRUE`` if empty)."""
    out = None
    for k, v in events:
        atom = Atom(k, v)
        out = atom if out is None else And(out, atom)
    return TRUE if out is None else out


def all_of(formulas) -> Formula:
    """Balanced conjunction, so large tables stay shallow for hashing and evaluation."""
    fs = list(formulas)
    if not fs:
        return TRUE
    while len(fs) > 1:
        fs = [And(fs[i], fs[i + 1]) if i + 1 < len(fs) else fs[i] for i in range(0, len(fs), 2)]
    return fs[0]


def variables(formula) -> frozenset:
    """Every variable the formula mentions, including intervened ones."""
    out = set()
    stack = [formula]
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            out.add(f.var)
        elif isinstance(f, Not):
            stack.append(f.arg)
        elif isinstance(f, (And, Or)):
            stack += [f.left, f.right]
        elif isinstance(f, Intervene):
            out.update(k for k, _ in f.assignments)
            stack.append(f.body)
    return frozenset(out)


def event_variables(formula) -> frozenset:
    """Variables occurring in primitive events (not only as intervention targets)."""
    out = set()
    stack = [formula]
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            out.add(f.var)
        elif isinstance(f, Not):
            stack.append(f.arg)
        elif isinstance(f, (And, Or)):
            stack += [f.left, f.right]
        elif isinstance(f, Intervene):
            stack.append(f.body)
    return frozenset(out)


def is_nested(formula) -> bool:
    """True if an intervention occurs under another intervention (non-basic)."""
    def walk(f, under):
        if isinstance(f, Intervene):
            return under or walk(f.body, True)
        if isinstance(f, Not):
            return walk(f.arg, under)
        if isinstance(f, (And, Or)):
            return walk(f.left, under) or walk(f.right, under)
        return False
    return walk(formula, False)


def bind(model: CausalModel, formula):
    """Raise ModelError unless every variable/value exists in ``model``."""
    stack = [formula]
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            if f.value not in model.domain(f.var):
                raise ModelError(f"{f.var}={f.value}: value outside domain {model.domain(f.var)}")
        elif isinstance(f, Not):
            stack.append(f.arg)
        elif isinstance(f, (And, Or)):
            stack += [f.left, f.right]
        elif isinstance(f, Intervene):
            for k, v in f.assignments:
                var = model.var(k)
                if var.exogenous:
                    raise ModelError(f"cannot intervene on exogenous variable {k}")
                if v not in var.domain:
                    raise ModelError(f"{k}<-{v}: value outside domain {var.domain}")
            stack.append(f.body)
    return formula


def _eval(model, context, formula, do):
    t = type(formula)
    if t is Atom:
        try:
            return model.evaluate(context, do)[formula.var] == formula.value
        except KeyError:
            raise ModelError(f"unknown variable {formula.var!r}") from None
    if t is Not:
        return not _eval(model, context, formula.arg, do)
    if t is And:
        return _eval(model, context, formula.left, do) and _eval(model, context, formula.right, do)
    if t is Or:
        return _eval(model, context, formula.left, do) or _eval(model, context, formula.right, do)
    if t is Intervene:
        # outer assignments win over inner ones on shared variables
        merged = dict(formula.assignments)
        merged.update(do)
        return _eval(model, context, formula.body, conj(merged))
    if t is Top:
        return True
    raise TypeError(f"not a formula: {formula!r}")


def holds_in(model: CausalModel, context: Context, formula, do=()) -> bool:
    """(M, u) |= [do] formula."""
    return _eval(model, context, formula, tuple(do))


def holds(situation: Situation, formula) -> bool:
    bind(situation.model, formula)
    return _eval(situation.model, situation.context, formula, ())


def valid_in_model(model: CausalModel, formula) -> bool:
    """M |= formula: true in every context."""
    bind(model, formula)
    return all(_eval(model, u, formula, ()) for u in enumerate_contexts(model))


def models_of(model, formula, contexts=None) -> list:
    ctxs = enumerate_contexts(model) if contexts is None else contexts
    return [u for u in ctxs if _eval(model, u, formula, ())]


def incompatible_in(situation: Situation, fact, foil) -> bool:
    """Fact and foil cite the same variables and no intervention makes both true."""
    model = situation.model
    bind(model, fact)
    bind(model, foil)
    vs = event_variables(fact)
    if vs != event_variables(foil):
        return False
    # intervening on every cited endogenous variable (and choosing the context
    # for exogenous ones) realises any joint valuation of the cited variables
    both = And(fact, foil)
    names = sorted(vs)
    for combo in itertools.product(*(model.domain(n) for n in names)):
        if _truth(both, dict(zip(names, combo))):
            return False
    return True


def _truth(formula, val) -> bool:
    """Evaluate an intervention-free formula over a plain valuation."""
    t = type(formula)
    if t is Atom:
        return val[formula.var] == formula.value
    if t is Not:
        return not _truth(formula.arg, val)
    if t is And:
        return _truth(formula.left, val) and _truth(formula.right, val)
    if t is Or:
        return _truth(formula.left, val) or _truth(formula.right, val)
    if t is Top:
        return True
    raise ModelError("intervention inside fact/foil is not supported here")
