"""Command line: check, corpus, replay, plot.

Exit codes: 0 proved, 1 disproved, 2 unknown, 3 input error.  ``corpus``
exits 0 when every file meets its ``expect`` line and 1 otherwise.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .certify import canonical_json
from .pipeline import plot_csv, plot_data, replay_bundle, run_problem
from .problem import ProblemFileError, load_problem

INPUT_ERROR = 3


def _load(path: str):
    try:
        return load_problem(path)
    except OSError as exc:
        raise ProblemFileError(f"{path}: {exc.strerror}") from None
    except ProblemFileError as exc:
        raise ProblemFileError(f"{path}: {exc}") from None


def cmd_check(args) -> int:
    pf = _load(args.file)
    rep, bundle = run_problem(pf, args.strategy)
    if args.cert:
        if bundle is None:
            print(f"no certificate: verdict is {rep.verdict}", file=sys.stderr)
        else:
            Path(args.cert).write_text(canonical_json(bundle) + "\n", encoding="utf-8")
    print(rep.to_json() if args.json else rep.to_text())
    return rep.exit_code


def _run_one(path: str) -> dict:
    try:
        pf = load_problem(path)
    except (OSError, ProblemFileError) as exc:
        return {"file": path, "error": str(exc), "as_expected": False}
    rep, _ = run_problem(pf)
    d = rep.to_dict()
    d["file"] = path
    return d


def run_corpus(directory: str, jobs: int = 1) -> list[dict]:
    root = Path(directory)
    files = sorted(str(p.relative_to(root)) for p in root.rglob("*.ineq"))
    paths = [str(root / f) for f in files]
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_one, paths))
    else:
        results = [_run_one(p) for p in paths]
    for r, f in zip(results, files):
        r["file"] = f
    return results


def cmd_corpus(args) -> int:
    if not Path(args.dir).is_dir():
        raise ProblemFileError(f"{args.dir}: not a directory")
    results = run_corpus(args.dir, args.jobs)
    ok = all(r["as_expected"] for r in results)
    if args.json:
        print(canonical_json({"results": results, "all_as_expected": ok}))
    else:
        for r in results:
            if "error" in r:
                print(f"{r['file']}: input error: {r['error']}")
                continue
            tag = "ok" if r["as_expected"] else "MISMATCH"
            print(f"{r['file']}: {r['verdict']} (expected {r['expect']}) bound {r['bound']} [{tag}]")
        print(f"{sum(r['as_expected'] for r in results)}/{len(results)} as expected")
    return 0 if ok else 1


def cmd_replay(args) -> int:
    pf = _load(args.file)
    try:
        bundle = json.loads(Path(args.cert).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ProblemFileError(f"{args.cert}: {exc.strerror}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ProblemFileError(f"{args.cert}: not JSON: {exc}") from None
    ok, why = replay_bundle(bundle, pf)
    print(f"{'accepted' if ok else 'rejected'}: {why}")
    return 0 if ok else 1


def cmd_plot(args) -> int:
    if args.samples < 2:
        raise ProblemFileError("--samples must be at least 2")
    pf = _load(args.file)
    sys.stdout.write(plot_csv(plot_data(pf, args.samples)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tangentcert", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    c = sub.add_parser("check", help="prove one problem file")
    c.add_argument("file")
    c.add_argument("--strategy", choices=("auto", "symbolic", "interval"), default=None)
    c.add_argument("--json", action="store_true")
    c.add_argument("--cert", metavar="PATH", help="write the certificate bundle here")
    c.set_defaults(func=cmd_check)
    c = sub.add_parser("corpus", help="run every *.ineq file below a directory")
    c.add_argument("dir")
    c.add_argument("--json", action="store_true")
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_corpus)
    c = sub.add_parser("replay", help="check a certificate bundle against a problem")
    c.add_argument("cert")
    c.add_argument("file")
    c.set_defaults(func=cmd_replay)
    c = sub.add_parser("plot", help="CSV of f and g across the domain")
    c.add_argument("file")
    c.add_argument("--samples", type=int, required=True)
    c.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else 0
    try:
        return args.func(args)
    except ProblemFileError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
