"""Run the full verification pipeline over every bundled model.

Writes one JSON report per model into --out-dir and checks that each run
lands on its expected verdict: the vertical-Reeb example and the custom
fiber-Reeb model should pass clean, the horizontal-Reeb diagnostic example
should pass with its registered flags, and the plain space form should pass
its structure suite.  Exits 1 on any surprise.
"""

import argparse
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from oneill_lab.cli import main  # noqa: E402

EXPECTED = [
    ("vertical-xi", "report", 0),
    ("horizontal-xi", "report", 3),
    # clean structure and identities; the combined lower bound fails on the
    # Reeb probe there, which is a registered flag
    (str(REPO / "models" / "reeb_fiber.json"), "report", 3),
    ("r2m1:3", "verify", 0),
]


def run_one(model, command, out_dir, points, seed):
    slug = Path(model).stem.replace(":", "-")
    out = out_dir / f"{slug}.json"
    argv = [
        command, "--model", model, "--points", str(points), "--seed", str(seed),
        "--out", str(out),
    ]
    code = main(argv)
    return code, out


def cli(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default=str(REPO / "reports"))
    ap.add_argument("--points", type=int, default=100)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args(argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for model, command, expected in EXPECTED:
        code, out = run_one(model, command, out_dir, args.points, args.seed)
        status = "ok" if code == expected else f"UNEXPECTED (wanted {expected})"
        print(f"{model:45s} exit {code}  {status}  -> {out}")
        failures += code != expected
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(cli())
