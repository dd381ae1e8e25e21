"""Run the default suite twice and confirm the reports are byte-identical."""
import argparse
import filecmp
import sys
import tempfile
from pathlib import Path

from oproots.harness import run_suite

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=HERE / "default_suite.json")
    ap.add_argument("--out", default="suite_out")
    args = ap.parse_args()
    report = run_suite(str(args.config), args.out)
    with tempfile.TemporaryDirectory() as tmp:
        run_suite(str(args.config), tmp)
        same = filecmp.cmp(Path(args.out) / "report.json", Path(tmp) / "report.json", shallow=False)
    s = report.summary
    print(f"runs={s['runs']} states={s['states']} bound_violations={s['bound_violations']} identical={same}")
    for name, m in s["methods"].items():
        fit = m["order_fit"]
        order = "" if fit is None else f" order=[{fit['min']:.2f}, {fit['max']:.2f}]"
        print(f"  {name:16s} certified={m['certified']:3d}/{m['runs']:3d} max_residual={m['max_residual']:.1e}{order}")
    return 0 if same and not report.has_errors else 1


if __name__ == "__main__":
    sys.exit(main())
