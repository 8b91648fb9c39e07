"""Command-line front end: ``check``, ``eval``, ``run`` and ``oracle``.

Exit status is 0 on success, 1 when a query's precondition fails (or the
oracle disagrees), 2 when the bundle does not parse or validate.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from . import causes
from .causes import (InstanceTooLarge, PreconditionError, actual_cause_witness, check_actual_cause,
                     check_sufficient_cause, compute_restricted_causes, enumerate_actual_causes,
                     enumerate_alternative_causes, enumerate_congruent_causes,
                     enumerate_congruent_causes_general, maximal_consistent_unions,
                     presupposed_causes)
from .dsl import DSLError, Bundle, parse_bundle, print_formula
from .explain import (EpistemicState, GeneralEpistemicState, Hypothesis, default_hypotheses,
                      enumerate_alternative_explanations, enumerate_alternative_explanations_prime,
                      enumerate_congruent_explanations, enumerate_congruent_explanations_prime,
                      enumerate_explanations, enumerate_general_alternative_explanations,
                      enumerate_general_congruent_explanations, enumerate_general_explanations,
                      function_identity)
from .formula import _eval, bind, holds
from .model import ModelError, Situation, conj, enumerate_contexts

SCHEMA = 1


@dataclass
class QueryResult:
    """One query's outcome in the structured schema (plain JSON values only)."""

    query: str
    kind: str
    results: list
    reason: str | None = None
    summary: dict = field(default_factory=dict)
    timing: float = field(default=0.0, compare=False)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "query": self.query, "kind": self.kind, "results": self.results,
                "reason": self.reason, "summary": self.summary}

    @classmethod
    def from_json(cls, data: dict) -> "QueryResult":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        return cls(data["query"], data["kind"], data["results"], data.get("reason"),
                   data.get("summary", {}))


def _plain(x):
    # canonical JSON values: tuples become lists, keys strings
    return json.loads(json.dumps(x, sort_keys=True))


def _events(e) -> dict:
    return {k: v for k, v in e}


# resolving bundle references ----------------------------------------------------------

class Resolver:
    def __init__(self, bundle: Bundle):
        self.bundle = bundle
        self.names = {}
        for name, m in bundle.models.items():
            self.names.setdefault(id(m), name)

    def model_name(self, model):
        for name, m in self.bundle.models.items():
            if m is model or m == model:
                return name
        return None

    def situation(self, ref) -> Situation:
        m, c = ref
        return Situation(self.bundle.models[m], self.bundle.contexts[c].context)

    def context(self, name):
        return self.bundle.contexts[name].context

    def actual(self, ref):
        """A context name or (model, context) pair, as a Situation."""
        if isinstance(ref, tuple):
            return self.situation(ref)
        decl = self.bundle.contexts[ref]
        return Situation(self.bundle.models[decl.model], decl.context)

    def simple_state(self, name) -> EpistemicState:
        s = self.bundle.states[name]
        if s.kind == "contexts":
            return EpistemicState(self.bundle.models[s.model], [self.context(c) for c in s.contexts])
        if s.kind == "where":
            return EpistemicState.where(self.bundle.models[s.model], s.formula)
        models = {m for m, _ in s.items}
        if len(models) != 1:
            raise PreconditionError("state", f"state {name} spans several models; use a general query")
        g = self.general_state(name)
        return EpistemicState(g.situations[0].model, [x.context for x in g.situations])

    def general_state(self, name) -> GeneralEpistemicState:
        s = self.bundle.states[name]
        if s.kind != "situations":
            k = self.simple_state(name)
            return GeneralEpistemicState([Situation(k.model, u) for u in k.contexts])
        sits = []
        for m, x in s.items:
            model = self.bundle.models[m]
            if isinstance(x, str):
                sits.append(Situation(model, self.context(x)))
            else:
                bind(model, x)
                sits.extend(Situation(model, u) for u in enumerate_contexts(model)
                            if _eval(model, u, x, ()))
        if not sits:
            raise PreconditionError("state", f"state {name} contains no situation")
        return GeneralEpistemicState(sits)

    def hypotheses(self, name, models) -> list:
        if name is None or name == "default":
            return default_hypotheses(models)
        out = []
        for h in self.bundle.hypotheses[name]:
            if h.function is not None:
                var, m = h.function
                out.append(function_identity(self.bundle.models[m], var, h.label))
            else:
                out.append(Hypothesis(h.formula, h.label))
        return out


def _label(h):
    if h is None:
        return None
    return h.label if h.label is not None else print_formula(h.formula)


def _functions(model, names):
    return [model.function(n).describe() for n in names if model.has(n)]


def _pair_item(p, model_a, model_b=None, extra=None):
    model_b = model_b or model_a
    item = {"events": {"fact": _events(p.fact), "contrast": _events(p.contrast)},
            "functions": {"fact": _functions(model_a, p.fact_functions),
                          "contrast": _functions(model_b, p.contrast_functions)},
            "witnesses": {}, "certificate": {}}
    if p.hypothetical is not None:
        item["witnesses"]["hypothetical"] = _events(p.hypothetical)
    if extra:
        item.update(extra)
    return item


def _unions(pairs):
    return [{"fact": _events(x), "contrast": _events(y)} for x, y in maximal_consistent_unions(pairs)]


# execution ------------------------------------------------------------------------------

def execute(bundle: Bundle, name: str) -> QueryResult:
    """Run one named query.  Raises PreconditionError / InstanceTooLarge / ModelError."""
    if name not in bundle.queries:
        raise KeyError(f"no query named {name!r}")
    q = bundle.queries[name]
    cl = dict(q.clauses)
    r = Resolver(bundle)
    route = cl.get("route", "primary")
    if route not in ("primary", "prime"):
        raise PreconditionError("route", f"unknown route {route!r} (primary or prime)")
    if route == "prime" and q.kind not in ("alt-explain", "cong-explain"):
        raise PreconditionError("route", f"query kind {q.kind} has no primed route")
    start = time.perf_counter()
    results, reason, summary = [], None, {}
    kind = q.kind

    if kind == "eval":
        sit = r.situation(cl["in"])
        value = holds(sit, cl["event"])
        results = [{"value": value, "valuation": dict(sorted(sit.values().items()))}]
    elif kind == "cause":
        sit = r.situation(cl["in"])
        for c in enumerate_actual_causes(sit, cl["event"]):
            w = actual_cause_witness(sit, c, cl["event"])
            results.append({"events": {"fact": _events(c)},
                            "witnesses": {"fixed": _events(w.fixed), "setting": _events(w.setting)}})
        if not results:
            reason = "AC2 unsatisfiable"
    elif kind == "sufficient":
        sit = r.situation(cl["in"])
        events = _formula_events(cl["events"])
        ok = check_sufficient_cause(sit, events, cl["event"])
        item = {"events": {"fact": _events(events)}, "value": ok,
                "actual": ok and check_actual_cause(sit, events, cl["event"])}
        if ok:
            w = actual_cause_witness(sit, events, cl["event"])
            item["witnesses"] = {"fixed": _events(w.fixed), "setting": _events(w.setting)}
        results = [item]
    elif kind == "restricted":
        sit = r.situation(cl["in"])
        for rc in compute_restricted_causes(sit, cl["event"]):
            results.append({"events": {"fact": _events(rc.events)},
                            "functions": {"fact": [f"F_{n}" for n in sorted(rc.functions)]}})
    elif kind == "alt-cause":
        sit = r.situation(cl["in"])
        pairs = enumerate_alternative_causes(sit, cl["fact"], cl["foil"])
        results = [_pair_item(p, sit.model) for p in pairs]
        summary["maximal_consistent_unions"] = _unions(pairs)
    elif kind in ("cong-cause", "cong-cause-general"):
        sa, sb = r.situation(cl["in"]), r.situation(cl["vs"])
        fn = enumerate_congruent_causes if kind == "cong-cause" else enumerate_congruent_causes_general
        pairs = fn(sa, sb, cl["fact"], cl["surrogate"])
        results = [_pair_item(p, sa.model, sb.model) for p in pairs]
        summary["maximal_consistent_unions"] = _unions(pairs)
    elif kind == "presupposed":
        sit = r.situation(cl["in"])
        results = [{"events": {"fact": _events(c)}} for c in presupposed_causes(sit, cl["fact"], cl["foil"])]
    elif kind == "explain":
        k = r.simple_state(cl["state"])
        out = enumerate_explanations(k, cl["event"], _actual_context(r, cl, "actual"))
        results = [{"events": {"fact": _events(e.events)}, "certificate": e.certificate} for e in out]
        reason = out.reason
    elif kind == "alt-explain":
        k = r.simple_state(cl["state"])
        fn = enumerate_alternative_explanations if route == "primary" else enumerate_alternative_explanations_prime
        out = fn(k, cl["fact"], cl["foil"], _actual_context(r, cl, "actual"))
        results = [_expl_item(e) for e in out]
        reason = out.reason
    elif kind == "cong-explain":
        k1, k2 = r.simple_state(cl["state"]), r.simple_state(cl["contrast-state"])
        act = _actual_context(r, cl, "actual")
        act2 = _actual_context(r, cl, "contrast-actual")
        if route == "primary":
            out = enumerate_congruent_explanations(k1, k2, cl["fact"], cl["surrogate"], act, act2)
        else:
            out = enumerate_congruent_explanations_prime(k1, k2, cl["fact"], cl["surrogate"], act, act2)
        results = [_expl_item(e) for e in out]
        reason = out.reason
    elif kind in ("general-explain", "general-alt-explain"):
        k = r.general_state(cl["state"])
        space = r.hypotheses(cl.get("hypotheses"), k.models)
        act = r.actual(cl["actual"]) if "actual" in cl else None
        if kind == "general-explain":
            out = enumerate_general_explanations(k, cl["event"], space, act)
        else:
            out = enumerate_general_alternative_explanations(k, cl["fact"], cl["foil"], space, act)
        results = [_general_item(g, k.models[0], k.models[0]) for g in out]
        reason = out.reason
    elif kind == "general-cong-explain":
        k1, k2 = r.general_state(cl["state"]), r.general_state(cl["contrast-state"])
        space = r.hypotheses(cl.get("hypotheses"), tuple(dict.fromkeys(k1.models + k2.models)))
        act = r.actual(cl["actual"]) if "actual" in cl else None
        act2 = r.actual(cl["contrast-actual"]) if "contrast-actual" in cl else None
        out = enumerate_general_congruent_explanations(k1, k2, cl["fact"], cl["surrogate"], space, act, act2)
        ma = act.model if act else k1.models[0]
        mb = act2.model if act2 else k2.models[0]
        results = [_general_item(g, ma, mb) for g in out]
        reason = out.reason
    else:  # pragma: no cover - check_query rejects unknown kinds
        raise PreconditionError("kind", f"unknown query kind {kind}")

    if not results and reason is None:
        reason = "no candidate"
    if results:
        reason = None
    res = QueryResult(name, kind, _plain(results), reason, _plain(summary))
    res.timing = time.perf_counter() - start
    return res


def _formula_events(f):
    """A conjunction of atoms as sorted events (the ``events`` clause)."""
    from .formula import And, Atom
    out, stack = [], [f]
    while stack:
        g = stack.pop()
        if isinstance(g, And):
            stack += [g.left, g.right]
        elif isinstance(g, Atom):
            out.append((g.var, g.value))
        else:
            raise PreconditionError("events", "events clause must be a conjunction of primitive events")
    return conj(out)


def _actual_context(r, cl, key):
    if key not in cl:
        return None
    return r.actual(cl[key]).context


def _expl_item(e):
    return {"events": {"fact": _events(e.fact), "contrast": _events(e.contrast)},
            "witnesses": {k: v for k, v in e.certificate.items() if k != "conditions"},
            "certificate": e.certificate}


def _general_item(g, model_a, model_b):
    return {"events": {"fact": _events(g.fact_events), "contrast": _events(g.contrast_events)},
            "formulas": {"fact": _label(g.fact_formula), "contrast": _label(g.contrast_formula)},
            "functions": {"fact": _functions(model_a, g.fact_functions),
                          "contrast": _functions(model_b, g.contrast_functions)},
            "witnesses": {k: v for k, v in g.certificate.items() if k != "conditions"},
            "certificate": g.certificate}


# text rendering -----------------------------------------------------------------------

def _side(events, functions=(), formula=None):
    parts = []
    if formula is not None:
        parts.append(f"[{formula}]")
    parts.extend(functions)
    parts.extend(f"{k}={v}" for k, v in sorted(events.items()))
    return ", ".join(parts) if parts else "∅"


def _assign(d):
    return ", ".join(f"{a}={b}" for a, b in sorted(d.items())) or "∅"


def _cert_value(v):
    if isinstance(v, dict) and "context" in v:
        where = f"situation {v['situation']} " if "situation" in v else ""
        extra = f" do {_assign(v['hypothetical'])}" if "hypothetical" in v else ""
        return f"{where}[{_assign(v['context'])}]{extra}"
    if isinstance(v, dict):
        return _assign(v)
    if isinstance(v, list):
        return "; ".join(_cert_value(x) for x in v)
    return str(v)


def render_text(res: QueryResult) -> str:
    lines = [f"{res.query} ({res.kind})"]
    if not res.results:
        lines.append(f"  no results: {res.reason}")
    for item in res.results:
        if "value" in item and "events" not in item:
            lines.append(f"  {'true' if item['value'] else 'false'}  valuation: "
                         + ", ".join(f"{k}={v}" for k, v in item["valuation"].items()))
            continue
        ev = item.get("events", {})
        fns = item.get("functions", {})
        forms = item.get("formulas", {})
        if "contrast" in ev:
            text = "⟨" + _side(ev["fact"], fns.get("fact", ()), forms.get("fact")) + " | " \
                   + _side(ev["contrast"], fns.get("contrast", ()), forms.get("contrast")) + "⟩"
        else:
            text = _side(ev.get("fact", {}), fns.get("fact", ()))
        if "value" in item:
            text += f"  sufficient: {str(item['value']).lower()}  actual: {str(item['actual']).lower()}"
        lines.append("  " + text)
        for k, v in sorted(item.get("witnesses", {}).items()):
            lines.append(f"      {k.replace('_', ' ')}: {_cert_value(v)}")
    unions = res.summary.get("maximal_consistent_unions", [])
    for u in unions if len(res.results) > 1 else ():
        lines.append("  union: ⟨" + _side(u["fact"]) + " | " + _side(u["contrast"]) + "⟩")
    return "\n".join(lines)


def emit_result(res: QueryResult, fmt="text") -> str:
    if fmt == "json":
        return json.dumps(res.to_json(), sort_keys=True, ensure_ascii=False, indent=2)
    return render_text(res)


# command line ---------------------------------------------------------------------------

def _load(path, seed):
    if path == "random":
        from .generate import random_bundle
        import random
        return random_bundle(random.Random(seed if seed is not None else 0))
    with open(path, encoding="utf-8") as fh:
        return parse_bundle(fh.read())


def _error(msg):
    print(msg, file=sys.stderr)


def build_parser():
    p = argparse.ArgumentParser(prog="contrastive", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, needs_query in (("check", False), ("eval", True), ("run", False), ("oracle", True)):
        sp = sub.add_parser(name)
        sp.add_argument("file", help="bundle file, or 'random' for a generated bundle (see --seed)")
        sp.add_argument("--query", required=needs_query) if name != "check" else None
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--seed", type=int, default=None, help="seed for the 'random' bundle")
        sp.add_argument("--max-vars", type=int, default=12, help="enumeration guard (endogenous variables)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    causes.limits.max_vars = args.max_vars
    try:
        bundle = _load(args.file, args.seed)
    except DSLError as e:
        _error(f"{args.file}:{e}")
        return 2
    except (OSError, ModelError) as e:
        _error(f"{args.file}: {e}")
        return 2

    if args.command == "check":
        n = len(bundle.queries)
        msg = {"schema": SCHEMA, "file": args.file, "models": sorted(bundle.models),
               "queries": sorted(bundle.queries), "ok": True}
        print(json.dumps(msg, sort_keys=True) if args.format == "json"
              else f"{args.file}: ok ({len(bundle.models)} models, {n} queries)")
        return 0

    names = [args.query] if args.query else sorted(bundle.queries)
    if args.query and args.query not in bundle.queries:
        _error(f"{args.file}: no query named {args.query!r}")
        return 2
    status = 0
    outputs = []
    for name in names:
        try:
            res = execute(bundle, name)
        except (PreconditionError, InstanceTooLarge, ModelError) as e:
            _error(f"{name}: {e}")
            status = max(status, 1)
            continue
        if args.command == "oracle":
            from .oracle import replay
            report = replay(bundle, name, res)
            for line in report.lines:
                print(line)
            if not report.ok:
                status = max(status, 1)
            else:
                print(f"{name}: oracle agrees ({len(res.results)} results)")
            continue
        outputs.append(emit_result(res, args.format))
    if outputs:
        if args.format == "json" and len(outputs) > 1:
            print("[\n" + ",\n".join(outputs) + "\n]")
        else:
            print("\n\n".join(outputs))
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
