"""Run every problem file under a directory and print a verdict table."""
import argparse
import sys
from pathlib import Path

from tangentcert.cli import run_corpus

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("dir", nargs="?", default=str(ROOT / "corpus"))
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    results = run_corpus(args.dir, args.jobs)
    width = max(len(r["file"]) for r in results)
    print(f"{'file':<{width}}  {'verdict':<10} {'expect':<10} {'bound':<24} ok")
    for r in results:
        if "error" in r:
            print(f"{r['file']:<{width}}  input error: {r['error']}")
            continue
        mark = "yes" if r["as_expected"] else "NO"
        print(f"{r['file']:<{width}}  {r['verdict']:<10} {r['expect']:<10} {str(r['bound']):<24} {mark}")
    bad = [r["file"] for r in results if not r["as_expected"]]
    print(f"{len(results) - len(bad)}/{len(results)} as expected")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
