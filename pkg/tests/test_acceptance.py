"""Acceptance criteria 1-9.  Each test is named test_criterion_<n>_...; the
terminal summary prints one pass/fail line per criterion."""
import random
import time

import pytest

from contrastive import properties as P
from contrastive.causes import PreconditionError
from contrastive.cli import execute
from contrastive.dsl import parse_bundle, print_bundle
from contrastive.generate import random_bundle
from contrastive.model import Situation, enumerate_contexts, solve
from contrastive.oracle import Brute, _Counter, replay

from conftest import CORPUS, load

LEDGER = "counterexamples in /root/notes/decisions.md, 'Property suites'"


def _pairs(res):
    return {(tuple(sorted(i["events"]["fact"].items())), tuple(sorted(i["events"]["contrast"].items())))
            for i in res.results}


def _facts(res):
    return {tuple(sorted(i["events"]["fact"].items())) for i in res.results}


def _timed(limit):
    class T:
        def __enter__(self):
            self.t = time.perf_counter()
            return self

        def __exit__(self, *exc):
            self.elapsed = time.perf_counter() - self.t
            if exc[0] is None:
                assert self.elapsed < limit, f"took {self.elapsed:.2f}s (limit {limit}s)"
    return T()


# 1 --------------------------------------------------------------------------------------

def test_criterion_1_table_reproduction(arthropod):
    with _timed(1.0):
        m = arthropod.models["arthropod"]
        expect = {"spider": "Spider", "beetle": "Beetle", "bee": "Bee", "fly": "Fly"}
        for ctx, out in expect.items():
            assert solve(Situation(m, arthropod.contexts[ctx].context))["O"] == out
        rows = {("8", "no", "8", "no", "0"), ("6", "no", "2", "yes", "2"),
                ("6", "yes", "5", "yes", "4"), ("6", "no", "5", "yes", "2")}
        for u in enumerate_contexts(m):
            val = m.evaluate(u)
            if tuple(val[k] for k in "LSECW") not in rows:
                assert val["O"] == "Unknown"


# 2 --------------------------------------------------------------------------------------

def test_criterion_2_bee_causes(arthropod):
    with _timed(1.0):
        res = execute(arthropod, "bee-causes")
    want = {(("L", "6"),), (("S", "yes"),), (("E", "5"),), (("C", "yes"),), (("W", "4"),)}
    assert _facts(res) == want
    # completeness against exhaustive AC1-AC3 search
    m = arthropod.models["arthropod"]
    b = Brute(m, _Counter(0))
    from contrastive.formula import Atom
    assert set(b.causes(arthropod.contexts["bee"].context, Atom("O", "Bee"))) == want


# 3 --------------------------------------------------------------------------------------

def test_criterion_3_extended_causes(extended):
    res = execute(extended, "spider7-pass-causes")
    assert _facts(res) == {(("A", "Unknown"), ("L", "7")), (("A", "Unknown"), ("O", "Unknown"))}
    triple = execute(extended, "spider7-pass-sufficient").results[0]
    assert triple["value"] is True and triple["actual"] is False


# 4 --------------------------------------------------------------------------------------

def test_criterion_4_bee_vs_fly(arthropod):
    want = {((("S", "yes"),), (("S", "no"),)), ((("W", "4"),), (("W", "2"),))}
    assert _pairs(execute(arthropod, "bee-vs-fly")) == want
    assert _pairs(execute(arthropod, "bee-but-fly")) == want


# 5 --------------------------------------------------------------------------------------

def test_criterion_5_general_congruent(extended, fig6):
    res = execute(extended, "bee5-update")
    hits = [i for i in res.results if i["events"] == {"fact": {}, "contrast": {"A": "Bee"}}
            and [f.split(" =")[0] for f in i["functions"]["fact"]] == ["F_O"]
            and [f.split(" =")[0] for f in i["functions"]["contrast"]] == ["F_O"]
            and i["functions"]["fact"] != i["functions"]["contrast"]]
    assert hits
    res = execute(fig6, "same-output")
    assert [(i["functions"], i["events"]) for i in res.results] == [
        ({"fact": ["F_R = max(P, Q)"], "contrast": ["F_R = P"]}, {"fact": {}, "contrast": {}})]


# 6 --------------------------------------------------------------------------------------

def test_criterion_6_explanations(arthropod, planning):
    assert _facts(execute(arthropod, "spider7-explain")) == {(("L", "7"),)}
    l78 = {((("L", "7"),), (("L", "8"),))}
    for q in ("spider7-vs-spider", "spider7-vs-spider-prime", "spider7-but-spider", "spider7-but-spider-prime"):
        assert _pairs(execute(arthropod, q)) == l78, q
    assert _pairs(execute(planning, "g1g3-explain")) == {((("G2", "false"),), (("G2", "true"),))}
    res = execute(planning, "a3-vs-a2-known")
    assert res.results == [] and res.reason == "AEX4 unsatisfiable"
    res = execute(planning, "a2-structure")
    hits = [i for i in res.results
            if i["events"] == {"fact": {}, "contrast": {"P2": "false"}}
            and i["functions"]["fact"] and i["functions"]["fact"][0].startswith("F_A2 =")
            and i["functions"]["contrast"] and i["functions"]["contrast"][0].startswith("F_A2 =")
            and i["functions"]["fact"] != i["functions"]["contrast"]]
    assert hits


# 7 --------------------------------------------------------------------------------------

THEOREMS = {
    "alternative-consistency": lambda r: P.check_alternative_consistency(*P.draw_alternative(r)),
    "congruent-consistency": lambda r: P.check_congruent_consistency(*P.draw_congruent(r)),
    "general-congruent-consistency":
        lambda r: P.check_general_congruent_consistency(*P.draw_congruent(r, general=True)),
    "presupposition-alternative": lambda r: P.check_presupposition_alternative(*P.draw_alternative(r)),
    "presupposition-congruent": lambda r: P.check_presupposition_congruent(*P.draw_congruent(r)),
    "alternative-routes": lambda r: P.check_alternative_routes(*P.draw_alternative_state(r)),
    "congruent-routes": lambda r: P.check_congruent_routes(*P.draw_congruent_states(r)),
}


@pytest.mark.parametrize("name", sorted(THEOREMS))
@pytest.mark.xfail(strict=True, reason=LEDGER)
def test_criterion_7_theorem_suite(name):
    start = time.perf_counter()
    bad = {}
    for seed in range(500):
        v = THEOREMS[name](random.Random(seed))
        if v:
            bad[seed] = v
    assert time.perf_counter() - start < 300 / len(THEOREMS)
    assert not bad, f"{len(bad)} of 500 seeds violate {name}; first: {next(iter(bad.items()))}"


# 8 --------------------------------------------------------------------------------------

def _random_queries(n):
    """The first n generated queries whose preconditions hold, with results."""
    out, seed = [], 0
    while len(out) < n:
        b = random_bundle(random.Random(seed))
        seed += 1
        for q in sorted(b.queries):
            try:
                res = execute(b, q)
            except PreconditionError:
                continue
            if len(out) < n:
                out.append((b, q, res))
    return out


def test_criterion_8_oracle_equivalence():
    with _timed(300):
        cases = []
        for path in sorted(CORPUS.glob("*.scm")):
            if path.name == "broken-cycle.scm":
                continue
            b = load(path.name)
            cases += [(b, q, execute(b, q)) for q in sorted(b.queries)]
        assert len(cases) >= 20
        cases += _random_queries(100)
        bad = [(q, rep.lines) for b, q, res in cases for rep in [replay(b, q, res)] if not rep.ok]
        assert not bad


# 9 --------------------------------------------------------------------------------------

def test_criterion_9_dsl_round_trip():
    with _timed(30):
        for path in sorted(CORPUS.glob("*.scm")):
            if path.name == "broken-cycle.scm":
                continue
            b = load(path.name)
            assert parse_bundle(print_bundle(b)) == b, path.name
        for seed in range(200):
            b = random_bundle(random.Random(seed))
            text = print_bundle(b)
            assert parse_bundle(text) == b, seed
            assert print_bundle(parse_bundle(text)) == text
