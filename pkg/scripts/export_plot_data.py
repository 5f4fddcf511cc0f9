"""Write one plot-data CSV (x, f, g) per corpus example into an output directory."""
import argparse
import sys
from pathlib import Path

from tangentcert.pipeline import plot_csv, plot_data
from tangentcert.problem import load_problem

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", nargs="?", default="plot_data")
    ap.add_argument("--samples", type=int, default=201)
    ap.add_argument("--corpus", default=str(ROOT / "corpus"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for path in sorted(Path(args.corpus).glob("ex*.ineq")):
        data = plot_data(load_problem(path), args.samples)
        target = out / f"{path.stem}.csv"
        target.write_text(plot_csv(data), encoding="utf-8")
        print(f"{target}: {len(data.rows)} rows")
    return 0


if __name__ == "__main__":
    sys.exit(main())
