import copy
import random

import pytest
from hypothesis import given, settings, strategies as st

from contrastive.causes import PreconditionError
from contrastive.cli import execute
from contrastive.generate import ALL_KINDS, random_instance
from contrastive.oracle import replay

from conftest import load

# small enough for the exhaustive recomputation to run
COMPLETE = [("arthropod.scm", "classify-odd"), ("arthropod.scm", "bee-causes"),
            ("arthropod.scm", "bee-but-fly"), ("arthropod.scm", "bee-vs-fly-presupposed"),
            ("arthropod.scm", "spider7-explain"), ("arthropod.scm", "spider7-but-spider"),
            ("extended.scm", "spider7-pass-causes"), ("extended.scm", "spider7-pass-sufficient"),
            ("extended.scm", "spider7-pass-restricted"), ("extended.scm", "bee5-update"),
            ("planning.scm", "g1g3-cause"), ("planning.scm", "g1g3-explain"), ("planning.scm", "g3-cause"),
            ("planning.scm", "a2-structure"), ("fig6.scm", "same-output"), ("fig6.scm", "s-restricted")]


def _other_value(bundle, var, value):
    for m in bundle.models.values():
        if m.has(var):
            return next(v for v in m.domain(var) if v != value)
    raise LookupError(var)


def _mutate(bundle, item):
    """The item with its first fact event moved to another value (or its truth value flipped)."""
    item = copy.deepcopy(item)
    fact = item.get("events", {}).get("fact")
    if fact:
        k = sorted(fact)[0]
        fact[k] = _other_value(bundle, k, fact[k])
    elif "value" in item:
        item["value"] = not item["value"]
    else:
        return None
    return item


@pytest.mark.parametrize("file, query", COMPLETE)
def test_untampered_results_pass(file, query):
    b = load(file)
    rep = replay(b, query, execute(b, query))
    assert rep.ok and rep.complete, rep.lines


@pytest.mark.parametrize("file, query", COMPLETE)
def test_dropped_result_is_detected(file, query):
    b = load(file)
    res = execute(b, query)
    if not res.results:
        pytest.skip("no results to drop")
    res.results = res.results[1:]
    assert not replay(b, query, res).ok


@pytest.mark.parametrize("file, query", COMPLETE)
def test_altered_result_is_detected(file, query):
    b = load(file)
    res = execute(b, query)
    bad = _mutate(b, res.results[0]) if res.results else None
    if bad is None:
        pytest.skip("nothing to alter")
    res.results = [bad] + res.results[1:]
    assert not replay(b, query, res).ok


def test_invented_result_is_detected(arthropod):
    res = execute(arthropod, "bee-causes")
    extra = copy.deepcopy(res.results[0])
    extra["events"]["fact"] = {"L": "6", "S": "yes"}
    res.results.append(extra)
    rep = replay(arthropod, "bee-causes", res)
    assert not rep.ok and any("MISMATCH" in line for line in rep.lines)


def test_tampered_certificate_is_detected(arthropod):
    # replay-only query: the certificates are all that is checked
    res = execute(arthropod, "bee-vs-fly")
    res.results[0]["witnesses"]["hypothetical"] = {"S": "yes"}
    rep = replay(arthropod, "bee-vs-fly", res)
    assert not rep.ok


def test_large_queries_fall_back_to_replay(arthropod):
    rep = replay(arthropod, "bee-vs-fly", execute(arthropod, "bee-vs-fly"))
    assert rep.ok and not rep.complete and any("certificates replayed only" in line for line in rep.lines)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(ALL_KINDS))
def test_random_instances_agree(seed, kind):
    b, q = random_instance(seed, kind)
    try:
        res = execute(b, q)
    except PreconditionError:
        return
    rep = replay(b, q, res)
    assert rep.ok, rep.lines


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(ALL_KINDS))
def test_random_dropped_results_are_detected(seed, kind):
    b, q = random_instance(seed, kind)
    try:
        res = execute(b, q)
    except PreconditionError:
        return
    if not res.results:
        return
    res.results = res.results[:-1]
    rep = replay(b, q, res)
    assert not rep.ok or not rep.complete
