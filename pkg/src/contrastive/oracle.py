"""Brute-force replay of query results.

The oracle shares nothing with the search engines beyond the parsed models and
formulas: it has its own evaluator, checks AC2 by trying every hold set over
the remaining endogenous variables, and enumerates hypotheticals without any
reachability pruning.  For each query it

* replays every certificate in the result (soundness), and
* recomputes the answer exhaustively and compares (completeness), as long as
  the work stays within an evaluation budget; a query over budget is
  reported as such and only the replay counts.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .formula import Atom, And, Intervene, Not, Or, Top, event_variables, Xor
from .model import Context, conj, enumerate_contexts

BUDGET = 10_000_000
MAX_HYPOTHETICALS = 10_000


class OverBudget(Exception):
    pass


@dataclass
class Report:
    query: str
    lines: list = field(default_factory=list)
    ok: bool = True
    complete: bool = True

    def fail(self, msg):
        self.ok = False
        self.lines.append(f"{self.query}: MISMATCH {msg}")

    def note(self, msg):
        self.lines.append(f"{self.query}: {msg}")


def _subsets(items, lo=0):
    items = tuple(items)
    for r in range(lo, len(items) + 1):
        yield from itertools.combinations(items, r)


def _ev(d):
    return conj(sorted(d.items()))


# naive engine ----------------------------------------------------------------------

class Brute:
    """Exhaustive semantics for one model.  ``frozen`` is a hypothetical W=w;
    settings in ``do`` override it."""

    def __init__(self, model, counter):
        self.model = model
        self.counter = counter
        self.endo = [v.name for v in model.variables if not v.exogenous]
        self.dom = {v.name: v.domain for v in model.variables}
        rows = {}
        for name in self.endo:
            f = model.function(name)
            table = {}
            for key in itertools.product(*(self.dom[p] for p in f.parents)):
                table[key] = f.lookup(key)
            rows[name] = (f.parents, table)
        # evaluation order by repeatedly picking variables whose parents are known
        known = {v.name for v in model.variables if v.exogenous}
        order, pending = [], list(self.endo)
        while pending:
            ready = [n for n in pending if all(p in known for p in rows[n][0])]
            if not ready:
                raise ValueError("model is not recursive")
            for n in ready:
                order.append((n,) + rows[n])
                known.add(n)
            pending = [n for n in pending if n not in known]
        self.order = order
        self.memo = {}
        self.cause_memo = {}
        self.valid_memo = {}

    def contexts(self):
        return list(enumerate_contexts(self.model))

    def values(self, u, do=()):
        self.counter.tick()
        key = (u.assignment, do)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        force = dict(do)
        val = dict(u.assignment)
        for name, parents, table in self.order:
            val[name] = force[name] if name in force else table[tuple(val[p] for p in parents)]
        self.memo[key] = val
        return val

    def holds(self, u, f, do=()):
        if isinstance(f, Top):
            return True
        if isinstance(f, Atom):
            return self.values(u, do)[f.var] == f.value
        if isinstance(f, Not):
            return not self.holds(u, f.arg, do)
        if isinstance(f, And):
            return self.holds(u, f.left, do) and self.holds(u, f.right, do)
        if isinstance(f, Or):
            return self.holds(u, f.left, do) or self.holds(u, f.right, do)
        if isinstance(f, Intervene):
            d = dict(f.assignments)
            d.update(do)
            return self.holds(u, f.body, conj(d))
        raise TypeError(f)

    def true(self, u, events, frozen=()):
        val = self.values(u, frozen)
        return all(val[k] == v for k, v in events)

    def mentions_ok(self, f):
        """Every variable and value of f exists in this model."""
        stack = [f]
        while stack:
            g = stack.pop()
            if isinstance(g, Atom):
                if g.var not in self.dom or g.value not in self.dom[g.var]:
                    return False
            elif isinstance(g, Not):
                stack.append(g.arg)
            elif isinstance(g, (And, Or)):
                stack += [g.left, g.right]
            elif isinstance(g, Intervene):
                if any(k not in self.dom or v not in self.dom[k] for k, v in g.assignments):
                    return False
                stack.append(g.body)
        return True

    def valid(self, f):
        self.counter.tick()
        if f not in self.valid_memo:
            self.valid_memo[f] = self.mentions_ok(f) and all(self.holds(u, f) for u in self.contexts())
        return self.valid_memo[f]

    # AC1-AC3 -----------------------------------------------------------------
    def setting(self, frozen, hold, xs, xp):
        d = dict(frozen)
        d.update(hold)
        d.update(zip(xs, xp))
        return conj(d)

    def ac2(self, u, events, phi, frozen=(), ranges=None):
        """(hold, setting) with [X<-x', W<-w*] not phi, or None."""
        xs = [k for k, _ in events]
        fz = {k for k, _ in frozen}
        actual = self.values(u, frozen)
        others = [n for n in self.endo if n not in xs and n not in fz]
        doms = [ranges[x] if ranges is not None else self.dom[x] for x in xs]
        for ws in _subsets(others):
            hold = {w: actual[w] for w in ws}
            for xp in itertools.product(*doms):
                if not self.holds(u, phi, self.setting(frozen, hold, xs, xp)):
                    return conj(hold), conj(zip(xs, xp))
        return None

    def sufficient(self, u, events, phi, frozen=(), ranges=None):
        if not events or not self.true(u, events, frozen) or not self.holds(u, phi, frozen):
            return False
        return self.ac2(u, events, phi, frozen, ranges) is not None

    def is_cause(self, u, events, phi, frozen=(), ranges=None):
        return self.sufficient(u, events, phi, frozen, ranges) and not any(
            self.sufficient(u, s, phi, frozen, ranges) for s in _subsets(events, 1) if len(s) < len(events))

    def causes(self, u, phi, frozen=(), ranges=None):
        key = (u.assignment, phi, frozen, None if ranges is None else tuple(sorted(ranges.items())))
        if key in self.cause_memo:
            return self.cause_memo[key]
        out = []
        if self.holds(u, phi, frozen):
            cited = event_variables(phi)
            val = self.values(u, frozen)
            names = [n for n in self.endo if n not in cited]
            for xs in _subsets(names, 1):
                # a strict superset of a cause violates AC3
                if any(set(k for k, _ in c) < set(xs) for c in out):
                    continue
                ev = conj((x, val[x]) for x in xs)
                if self.sufficient(u, ev, phi, frozen, ranges):
                    out.append(ev)
        out = frozenset(out)
        self.cause_memo[key] = out
        return out

    def partials(self, u, phi, frozen=(), ranges=None):
        return {s for c in self.causes(u, phi, frozen, ranges) for s in _subsets(c, 1)}

    def hypotheticals(self):
        if self.counter.armed and self.n_hypotheticals() > MAX_HYPOTHETICALS:
            raise OverBudget
        for ws in _subsets(self.endo, 1):
            for vals in itertools.product(*(self.dom[w] for w in ws)):
                yield conj(zip(ws, vals))

    def n_hypotheticals(self):
        n = 1
        for name in self.endo:
            n *= len(self.dom[name]) + 1
        return n - 1

    def influencing(self, phi):
        keep = set()
        for name in self.endo:
            for u in self.contexts():
                base = self.holds(u, phi)
                if any(self.holds(u, phi, ((name, v),)) != base for v in self.dom[name]):
                    keep.add(name)
                    break
        return keep

    def same_table(self, name, other):
        if name not in self.dom or name not in other.dom or name not in other.endo or name not in self.endo:
            return False
        a = dict((r[0], r[1:]) for r in self.order)[name]
        b = dict((r[0], r[1:]) for r in other.order)[name]
        return a == b

    def explanations(self, contexts, phi, pool, frozen=(), uncertain=True):
        """EX2-EX4 relative to ``contexts``; candidates drawn from ``pool``."""
        cited = event_variables(phi)
        names = [n for n in self.endo if n not in cited]
        cands = set()
        for u in pool:
            val = self.values(u, frozen)
            cands |= set(_subsets(tuple((n, val[n]) for n in names), 1))
        memo = {}

        def ex2(e):
            if e not in memo:
                hit = [u for u in contexts if self.true(u, e, frozen)]
                memo[e] = bool(hit) and all(self.sufficient(u, e, phi, frozen) for u in hit)
            return memo[e]

        out = set()
        for e in cands:
            if not ex2(e) or any(ex2(s) for s in _subsets(e, 1) if len(s) < len(e)):
                continue
            if uncertain and not self.uncertain(contexts, e, frozen):
                continue
            out.add(e)
        return out

    def uncertain(self, contexts, events, frozen=()):
        seen = {self.true(u, events, frozen) for u in contexts}
        return seen == {True, False}


class _Counter:
    def __init__(self, budget):
        self.n = 0
        self.budget = budget
        self.armed = False

    def tick(self):
        self.n += 1
        if self.armed and self.n > self.budget:
            raise OverBudget


# replay -------------------------------------------------------------------------------

def replay(bundle, name, result, budget=BUDGET) -> Report:
    """Check ``result`` (a QueryResult for query ``name``) against brute force."""
    from .cli import Resolver

    rep = Report(name)
    counter = _Counter(budget)
    brutes = {}

    def B(model):
        if id(model) not in brutes:
            brutes[id(model)] = Brute(model, counter)
        return brutes[id(model)]

    q = bundle.queries[name]
    cl = dict(q.clauses)
    r = Resolver(bundle)
    check = CHECKS[q.kind]
    items = result.results
    sound, complete = check(rep, r, cl, items, B, counter, result)
    try:
        sound()
    except OverBudget:  # pragma: no cover - replay runs unarmed
        pass
    if complete is not None:
        counter.n = 0
        counter.armed = True
        try:
            complete()
        except OverBudget:
            rep.complete = False
            rep.note(f"exhaustive recomputation over budget ({budget} evaluations or"
                     f" {MAX_HYPOTHETICALS} hypotheticals); certificates replayed only")
        finally:
            counter.armed = False
    return rep


def _fact(item):
    return _ev(item["events"]["fact"])


def _contrast(item):
    return _ev(item["events"]["contrast"])


def _ctx(d):
    return Context(tuple(sorted(d.items())))


def _same(rep, what, got, want):
    got, want = set(got), set(want)
    for x in sorted(got - want, key=repr):
        rep.fail(f"{what}: reported but not derived: {x}")
    for x in sorted(want - got, key=repr):
        rep.fail(f"{what}: derived but not reported: {x}")


def _single(rep, items):
    if len(items) != 1:
        rep.fail(f"expected exactly one result, got {len(items)}")
        return False
    return True


def _check_eval(rep, r, cl, items, B, counter, res):
    sit = r.situation(cl["in"])
    b = B(sit.model)

    def sound():
        want = b.holds(sit.context, cl["event"])
        if not _single(rep, items):
            return
        if items[0]["value"] != want:
            rep.fail(f"value {items[0]['value']} but brute force gives {want}")
        val = b.values(sit.context)
        if items[0]["valuation"] != dict(sorted(val.items())):
            rep.fail("valuation differs")
    return sound, None


def _replay_witness(rep, b, u, events, phi, w, frozen=()):
    actual = b.values(u, frozen)
    fixed = _ev(w["fixed"])
    if any(actual[k] != v for k, v in fixed):
        rep.fail(f"witness for {events}: held values are not the actual ones")
    d = dict(frozen)
    d.update(fixed)
    d.update(_ev(w["setting"]))
    if b.holds(u, phi, conj(d)):
        rep.fail(f"witness for {events}: the event still holds under the setting")


def _check_cause(rep, r, cl, items, B, counter, res):
    sit = r.situation(cl["in"])
    b, u, phi = B(sit.model), sit.context, cl["event"]
    got = [_fact(i) for i in items]

    def sound():
        for i, e in zip(items, got):
            if not b.is_cause(u, e, phi):
                rep.fail(f"{e} is not an actual cause")
            _replay_witness(rep, b, u, e, phi, i["witnesses"])

    def complete():
        _same(rep, "actual causes", got, b.causes(u, phi))
    return sound, complete


def _check_sufficient(rep, r, cl, items, B, counter, res):
    sit = r.situation(cl["in"])
    b, u, phi = B(sit.model), sit.context, cl["event"]
    if not _single(rep, items):
        return (lambda: None), None
    item = items[0]
    e = _fact(item)

    def sound():
        suff = b.sufficient(u, e, phi)
        if item["value"] != suff:
            rep.fail(f"sufficient={item['value']} but brute force gives {suff}")
        act = suff and b.is_cause(u, e, phi)
        if item["actual"] != act:
            rep.fail(f"actual={item['actual']} but brute force gives {act}")
        if "witnesses" in item:
            _replay_witness(rep, b, u, e, phi, item["witnesses"])
    return sound, None


def _check_restricted(rep, r, cl, items, B, counter, res):
    sit = r.situation(cl["in"])
    b, u, phi = B(sit.model), sit.context, cl["event"]

    def sound():
        fs = [f"F_{n}" for n in sorted(b.influencing(phi))]
        for i in items:
            if i["functions"]["fact"] != fs:
                rep.fail(f"function set {i['functions']['fact']} but brute force gives {fs}")
            e = _fact(i)
            if e and not b.is_cause(u, e, phi):
                rep.fail(f"{e} is not an actual cause")

    def complete():
        want = b.causes(u, phi) or {()}
        _same(rep, "restricted causes", [_fact(i) for i in items], want)
    return sound, complete


def _distinct(x, y):
    return [k for k, _ in x] == [k for k, _ in y] and all(a != c for (_, a), (_, c) in zip(x, y))


def _maximal(pairs):
    sets = {p: frozenset(k for k, _ in p[0]) for p in pairs}
    return {p for p in pairs if not any(sets[p] < t for t in sets.values())}


def _brute_unions(pairs):
    """Maximal consistent unions by trying every subset of the pairs."""
    pairs = list(pairs)
    if len(pairs) > 14:
        return None
    good = []
    for idx in _subsets(range(len(pairs)), 1):
        xs, ys, ok = {}, {}, True
        for i in idx:
            for side, acc in ((pairs[i][0], xs), (pairs[i][1], ys)):
                for k, v in side:
                    if acc.setdefault(k, v) != v:
                        ok = False
        if ok:
            good.append((frozenset(idx), _ev(xs), _ev(ys)))
    out = set()
    for s, x, y in good:
        if not any(s < t for t, _, _ in good):
            out.add((x, y))
    return out


def _check_unions(rep, res, pairs):
    want = _brute_unions(pairs)
    if want is None:
        return
    got = {(_ev(x["fact"]), _ev(x["contrast"])) for x in res.summary.get("maximal_consistent_unions", [])}
    _same(rep, "maximal consistent unions", got, want)


def _check_alt_cause(rep, r, cl, items, B, counter, res):
    sit = r.situation(cl["in"])
    b, u, fact, foil = B(sit.model), sit.context, cl["fact"], cl["foil"]
    got = [(_fact(i), _contrast(i)) for i in items]

    def sound():
        fp = b.partials(u, fact)
        for (x, y), i in zip(got, items):
            if x not in fp:
                rep.fail(f"{x} is not a partial cause of the fact")
            hyp = _ev(i["witnesses"].get("hypothetical", {}))
            if not hyp:
                rep.fail(f"{x} vs {y}: no hypothetical recorded")
            elif y not in b.partials(u, foil, hyp):
                rep.fail(f"{y} is not a partial cause of the foil under {hyp}")
            if not _distinct(x, y):
                rep.fail(f"{x} vs {y}: sides share an event")
        _check_unions(rep, res, got)

    def complete():
        fp = b.partials(u, fact)
        by_vars = {}
        for x in fp:
            by_vars.setdefault(tuple(k for k, _ in x), []).append(x)
        cands = set()
        for hyp in b.hypotheticals():
            if not b.holds(u, foil, hyp):
                continue
            for y in b.partials(u, foil, hyp):
                for x in by_vars.get(tuple(k for k, _ in y), ()):
                    if _distinct(x, y):
                        cands.add((x, y))
        _same(rep, "alternative causes", got, _maximal(cands))
    return sound, complete


def _check_cong_cause(rep, r, cl, items, B, counter, res):
    sa, sb = r.situation(cl["in"]), r.situation(cl["vs"])
    b = B(sa.model)
    fact, sur = cl["fact"], cl["surrogate"]
    got = [(_fact(i), _contrast(i)) for i in items]

    def sound():
        pa, pb = b.partials(sa.context, fact), b.partials(sb.context, sur)
        for x, y in got:
            if x not in pa or y not in pb or not _distinct(x, y):
                rep.fail(f"{x} vs {y} fails CCC1-CCC3")
        _check_unions(rep, res, got)

    def complete():
        pa, pb = b.partials(sa.context, fact), b.partials(sb.context, sur)
        cands = {(x, y) for x in pa for y in pb if _distinct(x, y)}
        _same(rep, "congruent causes", got, _maximal(cands))
    return sound, complete


def _general_pairs(B, sa, sb, fact, sur):
    """Naive general congruent causes: (diff, set of (x, y))."""
    ba, bb = B(sa.model), B(sb.model)
    fa, fb = ba.influencing(fact), bb.influencing(sur)
    diff = tuple(sorted(n for n in fa & fb if not ba.same_table(n, bb)))
    same = sa.model == sb.model
    pa = {()} | ba.partials(sa.context, fact)
    pb = {()} | bb.partials(sb.context, sur)

    def one_sided(names, other, relevant):
        if same:
            return not names
        return all(n not in other.dom or n not in relevant for n in names)

    cands = []
    for x in pa:
        for y in pb:
            xd, yd = dict(x), dict(y)
            shared = set(xd) & set(yd)
            if any(xd[k] == yd[k] for k in shared):
                continue
            if one_sided(set(xd) - shared, bb, fb) and one_sided(set(yd) - shared, ba, fa):
                cands.append((x, y, shared))
    out = set()
    for x, y, sh in cands:
        if any(set(x) <= set(x2) and set(y) <= set(y2) and sh <= sh2 and (set(x), set(y)) != (set(x2), set(y2))
               for x2, y2, sh2 in cands):
            continue
        if not x and not y and not diff:
            continue
        out.add((x, y))
    return diff, out


def _check_cong_general(rep, r, cl, items, B, counter, res):
    sa, sb = r.situation(cl["in"]), r.situation(cl["vs"])
    got = [(_fact(i), _contrast(i)) for i in items]

    def sound():
        diff, want = _general_pairs(B, sa, sb, cl["fact"], cl["surrogate"])
        fx = [sa.model.function(n).describe() for n in diff]
        fy = [sb.model.function(n).describe() for n in diff]
        for i in items:
            if i["functions"]["fact"] != fx or i["functions"]["contrast"] != fy:
                rep.fail(f"function difference {i['functions']} but brute force gives {diff}")
        _same(rep, "general congruent causes", got, want)
        _check_unions(rep, res, got)
    return sound, None


def _check_presupposed(rep, r, cl, items, B, counter, res):
    sit = r.situation(cl["in"])
    b, u = B(sit.model), sit.context
    fact, foil = cl["fact"], cl["foil"]

    def ranges():
        xor = Xor(fact, foil)
        ctxs = [c for c in b.contexts() if b.holds(c, xor)]
        return {n: tuple(v for v in b.dom[n] if any(b.values(c)[n] == v for c in ctxs)) for n in b.endo}

    got = [_fact(i) for i in items]

    def sound():
        rg = ranges()
        for e in got:
            if not b.is_cause(u, e, fact, (), rg):
                rep.fail(f"{e} is not a cause in the presupposed model")

    def complete():
        _same(rep, "presupposed causes", got, b.causes(u, fact, (), ranges()))
    return sound, complete


def _state(r, name):
    k = r.simple_state(name)
    return k.model, list(k.contexts)


def _pool(r, cl, key, ctxs):
    return [r.actual(cl[key]).context] if key in cl else ctxs


def _replay_uncertain(rep, b, ctxs, events, w, frozen=()):
    yes, no = _ctx(w["uncertain_true"]), _ctx(w["uncertain_false"])
    if yes not in ctxs or no not in ctxs:
        rep.fail(f"{events}: uncertainty witness outside the epistemic state")
    elif not b.true(yes, events, frozen) or b.true(no, events, frozen):
        rep.fail(f"{events}: uncertainty witness does not separate")


def _check_explain(rep, r, cl, items, B, counter, res):
    model, ctxs = _state(r, cl["state"])
    b, phi = B(model), cl["event"]
    pool = _pool(r, cl, "actual", ctxs)
    got = [_fact(i) for i in items]

    def sound():
        for e, i in zip(got, items):
            hit = [u for u in ctxs if b.true(u, e)]
            if not hit or not all(b.sufficient(u, e, phi) for u in hit):
                rep.fail(f"{e} fails EX2")
            _replay_uncertain(rep, b, ctxs, e, i["certificate"])

    def complete():
        _same(rep, "explanations", got, b.explanations(ctxs, phi, pool))
    return sound, complete


def _alt_ok(b, ctxs, x, y, fact, foil, hyps):
    """AEX2 for (x, y) with witnesses drawn from ``hyps``; None when it fails."""
    hit = [u for u in ctxs if b.true(u, x)]
    if not hit or not _distinct(x, y):
        return None
    wits = {}
    for u in hit:
        if x not in b.partials(u, fact):
            return None
        h = next((h for h in hyps if b.holds(u, foil, h) and y in b.partials(u, foil, h)), None)
        if h is None:
            return None
        wits[u] = h
    return wits


def _check_alt_explain(rep, r, cl, items, B, counter, res):
    model, ctxs = _state(r, cl["state"])
    b, fact, foil = B(model), cl["fact"], cl["foil"]
    pool = _pool(r, cl, "actual", ctxs)
    got = [(_fact(i), _contrast(i)) for i in items]
    prime = cl.get("route", "primary") == "prime"

    def sound_primary():
        for (x, y), i in zip(got, items):
            w = i["witnesses"]
            seen = set()
            for cw in w["cause_witnesses"]:
                u, h = _ctx(cw["context"]), _ev(cw["hypothetical"])
                seen.add(u)
                if x not in b.partials(u, fact):
                    rep.fail(f"{x} is not a partial cause of the fact in {dict(u.assignment)}")
                if y not in b.partials(u, foil, h):
                    rep.fail(f"{y} is not a partial cause of the foil under {h}")
            if seen != {u for u in ctxs if b.true(u, x)}:
                rep.fail(f"{x}: cause witnesses do not cover the contexts where it holds")
            _replay_uncertain(rep, b, ctxs, x, w)
            h = _ev(w["contrast_hypothetical"])
            if h == x:
                rep.fail(f"{x}: contrast hypothetical equals the explanation")
            t, f = _ctx(w["contrast_true"]), _ctx(w["contrast_false"])
            if not b.true(t, y, h) or b.true(f, y, h):
                rep.fail(f"{y}: contrast uncertainty witness does not separate under {h}")

    def sound_prime():
        fact_parts = {s for e in b.explanations(ctxs, fact, pool) for s in _subsets(e, 1)}
        for (x, y), i in zip(got, items):
            h = _ev(i["witnesses"]["contrast_hypothetical"])
            if x not in fact_parts:
                rep.fail(f"{x} is not part of an explanation of the fact")
            if not _distinct(x, y):
                rep.fail(f"{x} vs {y}: sides share an event")
            parts = {s for e in b.explanations(ctxs, foil, ctxs, h) for s in _subsets(e, 1)}
            if y not in parts:
                rep.fail(f"{y} is not part of an explanation of the foil under {h}")

    def complete_primary():
        hyps = list(b.hypotheticals())
        cited = event_variables(fact)
        names = [n for n in b.endo if n not in cited]
        xs_pool = set()
        for u in pool:
            val = b.values(u)
            xs_pool |= set(_subsets(tuple((n, val[n]) for n in names), 1))
        want = set()
        for x in xs_pool:
            xs = [k for k, _ in x]
            for ys in itertools.product(*(b.dom[k] for k in xs)):
                y = conj(zip(xs, ys))
                if _alt_ok(b, ctxs, x, y, fact, foil, hyps) is None:
                    continue
                idx = range(len(x))
                if any(_alt_ok(b, ctxs, tuple(x[j] for j in s), tuple(y[j] for j in s), fact, foil, hyps)
                       for s in _subsets(idx, 1) if len(s) < len(x)):
                    continue
                if not b.uncertain(ctxs, x):
                    continue
                if not any(h != x and b.uncertain(ctxs, y, h) for h in hyps):
                    continue
                want.add((x, y))
        _same(rep, "alternative explanations", got, want)

    def complete_prime():
        fact_parts = {s for e in b.explanations(ctxs, fact, pool) for s in _subsets(e, 1)}
        foil_parts = {}
        for h in b.hypotheticals():
            if not any(b.holds(u, foil, h) for u in ctxs):
                continue
            for e in b.explanations(ctxs, foil, ctxs, h):
                for s in _subsets(e, 1):
                    foil_parts.setdefault(tuple(k for k, _ in s), set()).add(s)
        cands = {(x, y) for x in fact_parts for y in foil_parts.get(tuple(k for k, _ in x), ())
                 if _distinct(x, y)}
        _same(rep, "alternative explanations (primed)", got, _maximal(cands))

    if prime:
        return sound_prime, complete_prime
    return sound_primary, complete_primary


def _check_cong_explain(rep, r, cl, items, B, counter, res):
    model, k1 = _state(r, cl["state"])
    _, k2 = _state(r, cl["contrast-state"])
    b, fact, sur = B(model), cl["fact"], cl["surrogate"]
    pool_a = _pool(r, cl, "actual", k1)
    pool_b = _pool(r, cl, "contrast-actual", k2)
    got = [(_fact(i), _contrast(i)) for i in items]
    prime = cl.get("route", "primary") == "prime"
    cited = event_variables(fact) | event_variables(sur)
    names = [n for n in b.endo if n not in cited]

    def events_from(pool):
        out = set()
        for u in pool:
            val = b.values(u)
            out |= set(_subsets(tuple((n, val[n]) for n in names), 1))
        return out

    def ok2(x, y):
        ua = [u for u in k1 if b.true(u, x)]
        ub = [u for u in k2 if b.true(u, y)]
        return bool(ua) and bool(ub) and _distinct(x, y) and all(x in b.partials(u, fact) for u in ua) \
            and all(y in b.partials(u, sur) for u in ub)

    def sound_primary():
        for (x, y), i in zip(got, items):
            if not ok2(x, y):
                rep.fail(f"{x} vs {y} fails CEX2")
            _replay_uncertain(rep, b, k1, x, i["witnesses"])
            t = _ctx(i["witnesses"]["contrast_true"])
            if t not in k2 or not b.true(t, y):
                rep.fail(f"{y}: contrast witness does not hold")

    def complete_primary():
        ys = {}
        for y in events_from(pool_b):
            ys.setdefault(tuple(k for k, _ in y), set()).add(y)
        want = set()
        for x in events_from(pool_a):
            for y in ys.get(tuple(k for k, _ in x), ()):
                if not ok2(x, y):
                    continue
                if any(ok2(tuple(x[j] for j in s), tuple(y[j] for j in s))
                       for s in _subsets(range(len(x)), 1) if len(s) < len(x)):
                    continue
                if b.uncertain(k1, x) and any(b.true(u, y) for u in k2):
                    want.add((x, y))
        _same(rep, "congruent explanations", got, want)

    def prime_want():
        # the fact side keeps EX4 (uncertainty); the contrast side only EX2-EX3
        xs = {s for e in b.explanations(k1, fact, pool_a) for s in _subsets(e, 1)}
        ys = {s for e in b.explanations(k2, sur, pool_b, uncertain=False) for s in _subsets(e, 1)}
        return _maximal({(x, y) for x in xs for y in ys if _distinct(x, y)})

    def sound_prime():
        want = prime_want()
        for p in got:
            if p not in want:
                rep.fail(f"{p} fails CEX1'-CEX4'")

    def complete_prime():
        _same(rep, "congruent explanations (primed)", got, prime_want())

    if prime:
        return sound_prime, complete_prime
    return sound_primary, complete_primary


# general explanations -------------------------------------------------------------------

def _hyp_by_label(r, cl, models):
    from .cli import _label
    from .explain import TRUE_HYPOTHESIS
    space = list(r.hypotheses(cl.get("hypotheses"), models))
    if all(h.formula != TRUE_HYPOTHESIS.formula for h in space):
        space = [TRUE_HYPOTHESIS] + space
    return space, {_label(h): h for h in space}


def _gen_valid(B, sit, hyp):
    return B(sit.model).valid(hyp.formula)


def _gen_true(sit, B, events):
    b = B(sit.model)
    if any(k not in b.dom for k, _ in events):
        return False
    return b.true(sit.context, events)


def _replay_general_uncertain(rep, B, sits, hyp, events, w):
    yes, no = sits[w["uncertain_true"]["situation"]], sits[w["uncertain_false"]["situation"]]
    if not (_gen_valid(B, yes, hyp) and _gen_true(yes, B, events)):
        rep.fail(f"{events}: uncertain_true witness does not satisfy the explanation")
    if _gen_valid(B, no, hyp) and _gen_true(no, B, events):
        rep.fail(f"{events}: uncertain_false witness satisfies the explanation")


def _gen_dominance(state_models, sat, hyps_of):
    """Drop entries dominated on (model sets, event sets); sat entries are tuples
    (hyps..., events...) and hyps_of gives one model-set per hypothesis slot."""
    keys = [hyps_of(s) for s in sat]
    out = []
    for s, (ms, es) in zip(sat, keys):
        if any((ms2, es2) != (ms, es) and all(m <= m2 for m, m2 in zip(ms, ms2))
               and all(e2 <= e for e, e2 in zip(es, es2)) for ms2, es2 in keys):
            continue
        out.append(s)
    return out


def _check_general_explain(rep, r, cl, items, B, counter, res):
    k = r.general_state(cl["state"])
    sits = list(k.situations)
    space, by_label = _hyp_by_label(r, cl, k.models)
    phi = cl["event"]
    act = r.actual(cl["actual"]) if "actual" in cl else None

    def sat2(h, e):
        hit = [s for s in sits if _gen_valid(B, s, h) and _gen_true(s, B, e)]
        return bool(hit) and all(B(s.model).sufficient(s.context, e, phi) for s in hit)

    def sound():
        for i in items:
            h, e = by_label.get(i["formulas"]["fact"]), _fact(i)
            if h is None:
                rep.fail(f"unknown formula {i['formulas']['fact']}")
                continue
            if not sat2(h, e):
                rep.fail(f"({i['formulas']['fact']}, {e}) fails EX2")
            _replay_general_uncertain(rep, B, sits, h, e, i["witnesses"])

    def complete():
        models = list(k.models)
        cands = set()
        for s in sits:
            b = B(s.model)
            cited = event_variables(phi)
            val = b.values(s.context)
            cands |= set(_subsets(tuple((n, val[n]) for n in b.endo if n not in cited), 1))
        hyps = space
        if act is not None:
            cands = {e for e in cands if _gen_true(act, B, e)}
            hyps = [h for h in space if _gen_valid(B, act, h)]
        msets = {h: frozenset(i for i, m in enumerate(models) if B(m).valid(h.formula)) for h in space}
        sat = [(h, e) for h in hyps for e in cands if sat2(h, e)]
        kept = _gen_dominance(models, sat, lambda s: ((msets[s[0]],), (frozenset(s[1]),)))
        want = set()
        from .cli import _label
        for h, e in kept:
            yes = any(_gen_valid(B, s, h) and _gen_true(s, B, e) for s in sits)
            no = any(not (_gen_valid(B, s, h) and _gen_true(s, B, e)) for s in sits)
            if yes and no:
                want.add((_label(h), e))
        _same(rep, "general explanations", [(i["formulas"]["fact"], _fact(i)) for i in items], want)
    return sound, complete


def _check_general_alt(rep, r, cl, items, B, counter, res):
    k = r.general_state(cl["state"])
    sits = list(k.situations)
    space, by_label = _hyp_by_label(r, cl, k.models)
    fact, foil = cl["fact"], cl["foil"]

    def sound():
        for i in items:
            h, x, y = by_label.get(i["formulas"]["fact"]), _fact(i), _contrast(i)
            if h is None:
                rep.fail(f"unknown formula {i['formulas']['fact']}")
                continue
            if not _distinct(x, y):
                rep.fail(f"{x} vs {y}: sides share an event")
            hit = [s for s in sits if _gen_valid(B, s, h) and _gen_true(s, B, x)]
            if not hit:
                rep.fail(f"({i['formulas']['fact']}, {x}) holds nowhere")
            for s in hit:
                b = B(s.model)
                if x not in b.partials(s.context, fact):
                    rep.fail(f"{x} is not a partial cause of the fact in situation {sits.index(s)}")
            _replay_general_uncertain(rep, B, sits, h, x, i["witnesses"])

    act = r.actual(cl["actual"]) if "actual" in cl else None

    def foil_parts(s):
        b = B(s.model)
        out = set()
        for w in b.hypotheticals():
            if b.holds(s.context, foil, w):
                out |= b.partials(s.context, foil, w)
        return out

    def complete():
        from .cli import _label
        fparts = {s: foil_parts(s) for s in sits}
        cands = set()
        for s in sits:
            if act is not None and s != act:
                continue
            for x in B(s.model).partials(s.context, fact):
                for y in fparts[s]:
                    if _distinct(x, y):
                        cands.add((x, y))
        hyps = space if act is None else [h for h in space if _gen_valid(B, act, h)]

        def sat2(h, x, y):
            hit = [s for s in sits if _gen_valid(B, s, h) and _gen_true(s, B, x)]
            return bool(hit) and all(x in B(s.model).partials(s.context, fact) and y in fparts[s]
                                     for s in hit)

        models = list(k.models)
        msets = {h: frozenset(i for i, m in enumerate(models) if B(m).valid(h.formula)) for h in space}
        sat = [(h, x, y) for h in hyps for x, y in cands if sat2(h, x, y)]
        kept = _gen_dominance(models, sat, lambda t: ((msets[t[0]],), (frozenset(t[1]), frozenset(t[2]))))
        want = set()
        for h, x, y in kept:
            inside = [_gen_valid(B, s, h) and _gen_true(s, B, x) for s in sits]
            if any(inside) and not all(inside):
                want.add((_label(h), x, y))
        got = [(i["formulas"]["fact"], _fact(i), _contrast(i)) for i in items]
        _same(rep, "general alternative explanations", got, want)
    return sound, complete


def _check_general_cong(rep, r, cl, items, B, counter, res):
    k1, k2 = r.general_state(cl["state"]), r.general_state(cl["contrast-state"])
    s1, s2 = list(k1.situations), list(k2.situations)
    space, by_label = _hyp_by_label(r, cl, tuple(dict.fromkeys(k1.models + k2.models)))
    fact, sur = cl["fact"], cl["surrogate"]
    info = {}

    def pairs(sa, sb):
        if (sa, sb) not in info:
            info[(sa, sb)] = _general_pairs(B, sa, sb, fact, sur)
        return info[(sa, sb)]

    def sat2(a, x, b, y):
        la = [s for s in s1 if _gen_valid(B, s, a) and _gen_true(s, B, x)]
        lb = [s for s in s2 if _gen_valid(B, s, b) and _gen_true(s, B, y)]
        if not la or not lb:
            return False
        return all((x, y) in pairs(sa, sb)[1] for sa in la for sb in lb)

    def sound():
        for i in items:
            a, b = by_label.get(i["formulas"]["fact"]), by_label.get(i["formulas"]["contrast"])
            x, y = _fact(i), _contrast(i)
            if a is None or b is None:
                rep.fail(f"unknown formula in {i['formulas']}")
                continue
            if not sat2(a, x, b, y):
                rep.fail(f"({i['formulas']['fact']}, {x}) vs ({i['formulas']['contrast']}, {y}) fails CEX2")
            _replay_general_uncertain(rep, B, s1, a, x, i["witnesses"])
            t = s2[i["witnesses"]["contrast_true"]["situation"]]
            if not (_gen_valid(B, t, b) and _gen_true(t, B, y)):
                rep.fail(f"{y}: contrast witness does not satisfy ({i['formulas']['contrast']})")

    act = r.actual(cl["actual"]) if "actual" in cl else None
    act2 = r.actual(cl["contrast-actual"]) if "contrast-actual" in cl else None

    def complete():
        from .cli import _label
        xs, ys = {()}, {()}
        for sa in s1:
            for sb in s2:
                if act is not None and sa != act or act2 is not None and sb != act2:
                    continue
                for x, y in pairs(sa, sb)[1]:
                    xs.add(x)
                    ys.add(y)
        ha = space if act is None else [h for h in space if _gen_valid(B, act, h)]
        hb = space if act2 is None else [h for h in space if _gen_valid(B, act2, h)]
        m1, m2 = list(k1.models), list(k2.models)
        set1 = {h: frozenset(i for i, m in enumerate(m1) if B(m).valid(h.formula)) for h in space}
        set2 = {h: frozenset(i for i, m in enumerate(m2) if B(m).valid(h.formula)) for h in space}
        sat = []
        for a in ha:
            for b in hb:
                for x in xs:
                    for y in ys:
                        counter.tick()
                        if sat2(a, x, b, y):
                            sat.append((a, x, b, y))
        kept = _gen_dominance(None, sat, lambda t: ((set1[t[0]], set2[t[2]]), (frozenset(t[1]), frozenset(t[3]))))
        want = set()
        for a, x, b, y in kept:
            inside = [_gen_valid(B, s, a) and _gen_true(s, B, x) for s in s1]
            there = any(_gen_valid(B, s, b) and _gen_true(s, B, y) for s in s2)
            if any(inside) and not all(inside) and there:
                want.add((_label(a), x, _label(b), y))
        got = [(i["formulas"]["fact"], _fact(i), i["formulas"]["contrast"], _contrast(i)) for i in items]
        _same(rep, "general congruent explanations", got, want)
    return sound, complete


CHECKS = {
    "eval": _check_eval,
    "cause": _check_cause,
    "sufficient": _check_sufficient,
    "restricted": _check_restricted,
    "alt-cause": _check_alt_cause,
    "cong-cause": _check_cong_cause,
    "cong-cause-general": _check_cong_general,
    "presupposed": _check_presupposed,
    "explain": _check_explain,
    "alt-explain": _check_alt_explain,
    "cong-explain": _check_cong_explain,
    "general-explain": _check_general_explain,
    "general-alt-explain": _check_general_alt,
    "general-cong-explain": _check_general_cong,
}
