"""Run every query in the example corpus and print the text rendering."""
import sys
from pathlib import Path

from contrastive.cli import main

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

if __name__ == "__main__":
    code = 0
    for path in sorted(CORPUS.glob("*.scm")):
        if path.name == "broken-cycle.scm":
            continue
        print(f"== {path.name}")
        code = max(code, main(["run", str(path)]))
    sys.exit(code)
