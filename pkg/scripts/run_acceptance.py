#!/usr/bin/env python3
"""Run the full acceptance scenario twice and compare the CSV outputs byte for byte."""
import argparse
import filecmp
import sys
from pathlib import Path

from dbar_neumann.cli import main as cli_main

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(ROOT / "configs" / "acceptance.toml"))
    ap.add_argument("--out", default=str(ROOT / "results" / "acceptance"))
    args = ap.parse_args()
    out = Path(args.out)
    codes = [cli_main(["run", args.config, "--out", str(out / d)]) for d in ("run1", "run2")]
    names = sorted(p.name for p in (out / "run1").glob("*.csv"))
    _, mismatch, errors = filecmp.cmpfiles(out / "run1", out / "run2", names, shallow=False)
    print(f"exit codes {codes}; {len(names)} CSVs; mismatched {mismatch + errors}")
    return 0 if codes == [0, 0] and not mismatch and not errors else 1


if __name__ == "__main__":
    sys.exit(main())
