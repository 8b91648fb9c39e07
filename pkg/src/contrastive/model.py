"""Finite-domain structural causal models and model surgery.

Values are symbolic strings.  A model is immutable; every surgery returns a
new model.  Conjunctions of primitive events are plain tuples of
``(variable, value)`` pairs kept sorted by variable name (see :func:`conj`).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

Events = tuple  # tuple[tuple[str, str], ...], sorted by variable name


class ModelError(ValueError):
    """Raised when a model, context or intervention is malformed."""


def conj(pairs=(), **kw) -> Events:
    """Canonical event conjunction from pairs and/or keyword arguments."""
    items = dict(pairs.items() if isinstance(pairs, Mapping) else pairs)
    for k, v in kw.items():
        items[k] = v
    return tuple(sorted((k, str(v)) for k, v in items.items()))


def conj_vars(events: Events) -> tuple:
    return tuple(k for k, _ in events)


@dataclass(frozen=True)
class Variable:
    name: str
    domain: tuple
    exogenous: bool = False

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(str(v) for v in self.domain))


@dataclass(frozen=True)
class StructuralFunction:
    """Decision table for one endogenous variable.

    ``rows`` maps parent-value tuples to an output value; parent valuations not
    listed fall through to ``default``.  ``expr`` keeps the surface expression
    a table was compiled from, for printing.
    """

    target: str
    parents: tuple
    rows: tuple = ()
    default: str | None = None
    expr: str | None = None

    def __post_init__(self):
        rows = self.rows.items() if isinstance(self.rows, Mapping) else self.rows
        norm = {tuple(str(x) for x in k): str(v) for k, v in rows}
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "rows", tuple(sorted(norm.items())))
        if self.default is not None:
            object.__setattr__(self, "default", str(self.default))

    @classmethod
    def constant(cls, target, value):
        return cls(target, (), {(): value})

    def lookup(self, key):
        hit = self._index.get(key)
        if hit is None:
            return self.default
        return hit

    def describe(self) -> str:
        """``F_X = body`` with the source expression, or the listed rows."""
        if self.expr is not None:
            body = self.expr
        else:
            rows = [f"({', '.join(k)}) -> {v}" for k, v in self.rows]
            if self.default is not None:
                rows.append(f"default -> {self.default}")
            body = "table {" + "; ".join(rows) + "}"
        return f"F_{self.target} = {body}"

    @property
    def _index(self):
        try:
            return self.__dict__["_idx"]
        except KeyError:
            idx = dict(self.rows)
            object.__setattr__(self, "_idx", idx)
            return idx


class CausalModel:
    """A signature plus one structural function per endogenous variable.

    Construction does not validate; use :func:`validate_model` for a report or
    :meth:`check` to raise.  Equality is structural.
    """

    __slots__ = ("variables", "functions", "_vars", "_fns", "_hash", "_order",
                 "_solve_cache", "_desc", "_tables")

    def __init__(self, variables: Iterable[Variable], functions: Iterable[StructuralFunction]):
        self.variables = tuple(sorted(variables, key=lambda v: v.name))
        self.functions = tuple(sorted(functions, key=lambda f: f.target))
        self._vars = {v.name: v for v in self.variables}
        self._fns = {f.target: f for f in self.functions}
        self._hash = hash((self.variables, self.functions))
        self._order = None
        self._solve_cache = {}
        self._desc = {}
        self._tables = {}

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, CausalModel):
            return NotImplemented
        return (self._hash == other._hash and self.variables == other.variables
                and self.functions == other.functions)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"CausalModel(vars={[v.name for v in self.variables]})"

    # signature ---------------------------------------------------------
    @property
    def exogenous(self) -> tuple:
        return tuple(v.name for v in self.variables if v.exogenous)

    @property
    def endogenous(self) -> tuple:
        return tuple(v.name for v in self.variables if not v.exogenous)

    def has(self, name) -> bool:
        return name in self._vars

    def var(self, name) -> Variable:
        try:
            return self._vars[name]
        except KeyError:
            raise ModelError(f"unknown variable {name!r}") from None

    def domain(self, name) -> tuple:
        return self.var(name).domain

    def function(self, name) -> StructuralFunction:
        return self._fns[name]

    def table(self, name) -> tuple:
        """Fully expanded table of F_name as a tuple of (parent-values, value)."""
        if name not in self._tables:
            f = self._fns[name]
            doms = [self.domain(p) for p in f.parents]
            self._tables[name] = (f.parents, tuple(
                (key, f.lookup(key)) for key in itertools.product(*doms)))
        return self._tables[name]

    def same_function(self, name, other: "CausalModel") -> bool:
        """True iff F_name is the same table in both models."""
        if not (other.has(name) and name in self._fns and name in other._fns):
            return False
        return self.table(name) == other.table(name)

    # structure ---------------------------------------------------------
    def order(self) -> tuple:
        """Endogenous variables in a topological order (ties broken by name)."""
        if self._order is None:
            self._order = _toposort(self)
        return self._order

    def check(self):
        report = validate_model(self)
        if not report.ok:
            raise ModelError("; ".join(report.errors))
        return self

    def descendants(self, names) -> frozenset:
        """Variables reachable from ``names`` along function edges, ``names`` included."""
        key = frozenset(names)
        if key not in self._desc:
            children = {}
            for f in self.functions:
                for p in f.parents:
                    children.setdefault(p, []).append(f.target)
            seen, stack = set(key), list(key)
            while stack:
                for c in children.get(stack.pop(), ()):
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
            self._desc[key] = frozenset(seen)
        return self._desc[key]

    # evaluation --------------------------------------------------------
    def evaluate(self, context: "Context", do: Events = ()) -> dict:
        """Valuation of every variable under ``context`` and intervention ``do``.

        The returned dict is shared through a cache and must not be mutated.
        """
        key = (context.assignment, do)
        hit = self._solve_cache.get(key)
        if hit is not None:
            return hit
        val = dict(context.assignment)
        forced = dict(do)
        for name in self.order():
            if name in forced:
                val[name] = forced[name]
                continue
            f = self._fns[name]
            out = f.lookup(tuple(val[p] for p in f.parents))
            if out is None:
                raise ModelError(f"F_{name} undefined on {tuple(val[p] for p in f.parents)}")
            val[name] = out
        if len(self._solve_cache) > 200_000:
            self._solve_cache.clear()
        self._solve_cache[key] = val
        return val


def _toposort(model) -> tuple:
    endo = set(model.endogenous)
    deps = {n: {p for p in model.function(n).parents if p in endo} for n in endo if n in model._fns}
    order, done = [], set()
    pending = sorted(deps)
    while pending:
        ready = [n for n in pending if deps[n] <= done]
        if not ready:
            raise ModelError("cycle among " + ", ".join(_find_cycle(deps)))
        for n in ready:
            order.append(n)
            done.add(n)
        pending = [n for n in pending if n not in done]
    return tuple(order)


def _find_cycle(deps) -> list:
    color, stack = {}, []

    def visit(n):
        color[n] = 1
        stack.append(n)
        for p in sorted(deps.get(n, ())):
            if color.get(p) == 1:
                return stack[stack.index(p):] + [p]
            if p not in color:
                found = visit(p)
                if found:
                    return found
        stack.pop()
        color[n] = 2
        return None

    for n in sorted(deps):
        if n not in color:
            found = visit(n)
            if found:
                return found
    return []


@dataclass(frozen=True)
class Context:
    """Total assignment to the exogenous variables, kept sorted by name."""

    assignment: tuple = ()

    def __post_init__(self):
        a = self.assignment.items() if isinstance(self.assignment, Mapping) else self.assignment
        object.__setattr__(self, "assignment", tuple(sorted((k, str(v)) for k, v in a)))

    def __getitem__(self, name):
        return dict(self.assignment)[name]

    def as_dict(self) -> dict:
        return dict(self.assignment)


@dataclass(frozen=True)
class Situation:
    model: CausalModel
    context: Context

    def __post_init__(self):
        if not isinstance(self.context, Context):
            object.__setattr__(self, "context", Context(self.context))
        got = {k for k, _ in self.context.assignment}
        if got != set(self.model.exogenous):
            raise ModelError(f"context assigns {sorted(got)}, model needs {sorted(self.model.exogenous)}")
        for k, v in self.context.assignment:
            if v not in self.model.domain(k):
                raise ModelError(f"{k}={v} outside domain {self.model.domain(k)}")

    def values(self, do: Events = ()) -> dict:
        return self.model.evaluate(self.context, do)


# validation -----------------------------------------------------------------

@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_model(model: CausalModel) -> ValidationReport:
    report = ValidationReport()
    err = report.errors.append
    for v in model.variables:
        if not v.domain:
            err(f"{v.name}: empty domain")
        if len(set(v.domain)) != len(v.domain):
            err(f"{v.name}: duplicate domain values")
    for name in model.endogenous:
        if name not in model._fns:
            err(f"{name}: no structural function")
    for f in model.functions:
        if not model.has(f.target):
            err(f"F_{f.target}: target not declared")
            continue
        if model.var(f.target).exogenous:
            err(f"F_{f.target}: target is exogenous")
        missing = [p for p in f.parents if not model.has(p)]
        if missing:
            err(f"F_{f.target}: orphan parent(s) {', '.join(missing)}")
            continue
        if f.target in f.parents:
            err(f"F_{f.target}: depends on itself")
        dom = model.domain(f.target)
        for key, out in f.rows:
            if len(key) != len(f.parents):
                err(f"F_{f.target}: row {key} has wrong arity")
            elif any(k not in model.domain(p) for k, p in zip(key, f.parents)):
                err(f"F_{f.target}: row {key} outside parent domains")
            if out not in dom:
                err(f"F_{f.target}: row {key} -> {out} outside domain of {f.target}")
        if f.default is not None:
            if f.default not in dom:
                err(f"F_{f.target}: default {f.default} outside domain of {f.target}")
        else:
            n = 1
            for p in f.parents:
                n *= len(model.domain(p))
            if len(f.rows) < n:
                err(f"F_{f.target}: incomplete table ({len(f.rows)} of {n} rows, no default)")
    if report.ok:
        try:
            _toposort(model)
        except ModelError as e:
            err(str(e))
    return report


# enumeration ----------------------------------------------------------------

def enumerate_contexts(model: CausalModel) -> Iterator[Context]:
    """Every exogenous assignment once, lexicographic in (name, domain index)."""
    names = model.exogenous
    for combo in itertools.product(*(model.domain(n) for n in names)):
        yield Context(tuple(zip(names, combo)))


def solve(situation: Situation) -> dict:
    return dict(situation.values())


# surgery --------------------------------------------------------------------

def _check_assignment(model, events):
    for k, v in events:
        var = model.var(k)
        if var.exogenous:
            raise ModelError(f"cannot intervene on exogenous variable {k}")
        if v not in var.domain:
            raise ModelError(f"{k}={v} outside domain {var.domain}")


def intervene(model: CausalModel, assignments) -> CausalModel:
    """M_{X<-x}: each assigned variable's function becomes a constant.

    Assigned variables stay in the signature (as constants) so that they can be
    intervened on again.
    """
    events = conj(assignments)
    _check_assignment(model, events)
    if not events:
        return model
    fixed = dict(events)
    fns = [StructuralFunction.constant(f.target, fixed[f.target]) if f.target in fixed else f
           for f in model.functions]
    return CausalModel(model.variables, fns)


def override_functions(model: CausalModel, replacements: Iterable[StructuralFunction],
                       new_variables: Iterable[Variable] = ()) -> CausalModel:
    """M <= F': replace F_X by F'_X for each replacement; may add variables."""
    variables = {v.name: v for v in model.variables}
    for v in new_variables:
        if v.name in variables and variables[v.name] != v:
            raise ModelError(f"domain mismatch for {v.name}")
        variables[v.name] = v
    fns = {f.target: f for f in model.functions}
    for f in replacements:
        if f.target not in variables:
            raise ModelError(f"F_{f.target}: variable not declared")
        fns[f.target] = f
    out = CausalModel(variables.values(), fns.values())
    out.check()
    return out


@dataclass(frozen=True)
class RestrictedModel:
    """M^{fact xor foil}: contexts where exactly one of fact, foil holds.

    Interventions are admissible when every assigned value is one the variable
    takes in some admissible world.
    """

    model: CausalModel
    contexts: tuple
    ranges: tuple  # ((variable, (values...)), ...)

    def admits(self, events: Events) -> bool:
        r = dict(self.ranges)
        return all(v in r.get(k, ()) for k, v in events)

    def admits_context(self, context: Context) -> bool:
        return context in self.contexts

    def range(self, name) -> tuple:
        return dict(self.ranges)[name]


def restrict_model(model: CausalModel, fact, foil) -> RestrictedModel:
    from .formula import holds_in, Xor

    xor = Xor(fact, foil)
    ctxs = tuple(u for u in enumerate_contexts(model) if holds_in(model, u, xor))
    if not ctxs:
        raise ModelError("fact xor foil holds in no context")
    seen = {n: set() for n in model.endogenous}
    for u in ctxs:
        val = model.evaluate(u)
        for n in seen:
            seen[n].add(val[n])
    ranges = tuple((n, tuple(x for x in model.domain(n) if x in seen[n])) for n in sorted(seen))
    return RestrictedModel(model, ctxs, ranges)
