"""Replay engine results against the brute-force oracle on the corpus and on random bundles."""
import argparse
import random
from pathlib import Path

from contrastive.causes import PreconditionError
from contrastive.cli import execute
from contrastive.dsl import parse_bundle
from contrastive.generate import random_bundle
from contrastive.oracle import replay

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def cases(n):
    for path in sorted(CORPUS.glob("*.scm")):
        if path.name != "broken-cycle.scm":
            b = parse_bundle(path.read_text(encoding="utf-8"))
            for q in sorted(b.queries):
                yield path.name, b, q
    for seed in range(n):
        b = random_bundle(random.Random(seed))
        for q in sorted(b.queries):
            yield f"seed {seed}", b, q


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=50)
    args = ap.parse_args()
    total = bad = partial = skipped = 0
    for where, b, q in cases(args.seeds):
        try:
            res = execute(b, q)
        except PreconditionError:
            skipped += 1
            continue
        rep = replay(b, q, res)
        total += 1
        partial += not rep.complete
        if not rep.ok:
            bad += 1
            print(f"{where} {q}: MISMATCH")
            for line in rep.lines:
                print("   ", line)
    print(f"{total} replayed, {bad} mismatches, {partial} certificate-only, {skipped} precondition failures")
    raise SystemExit(1 if bad else 0)
