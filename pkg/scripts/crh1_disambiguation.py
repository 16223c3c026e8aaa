"""Settle the CRH1 coefficient question numerically.

Two candidate forms of the mixed upper bound on the horizontal Ricci probe
differ only in the coefficient kappa multiplying (c - 1) |C X|^2: either
kappa = 3/4 or kappa = 3/8.  The scan below evaluates both variants on a
large admissible sample of the vertical-Reeb example and reports which
survive with zero violations.  The output is whatever the run finds, not a
preset answer.
"""

import argparse
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from oneill_lab.cli import cli_parse, run  # noqa: E402


def cli(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=300)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--probe", default="all", help="first | all | random:<k>")
    args = ap.parse_args(argv)
    if args.points < 200:
        ap.error("use at least 200 points for a meaningful tally")

    cfg = cli_parse(
        ["theorems", "--model", "vertical-xi", "--points", str(args.points),
         "--seed", str(args.seed), "--theorems", "CRH1", "--probe", args.probe,
         "--no-timestamp"]
    )
    entry = run(cfg).theorems["CRH1"]
    print(f"points checked : {entry['points_checked']}")
    print(f"records        : {entry['records']}")
    for name, tally in entry["variants"].items():
        print(
            f"  {name:11s} violations {tally['violations']:4d}   "
            f"equalities {tally['equalities']:4d}   min slack {tally['min_slack']:.3e}"
        )
    surviving = entry["surviving_variants"]
    print(f"surviving      : {', '.join(surviving) if surviving else 'none'}")
    return 0 if surviving else 1


if __name__ == "__main__":
    raise SystemExit(cli())
