"""Rewrite fixtures/golden/ from the current CLI output.

Run after a deliberate change to a report format; review the diff before
committing. Each instance gets an ``analyze`` report (with its splitting,
when the fixtures ship one) and an ``enumerate`` report.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from gavekit.cli import run

ROOT = Path(__file__).resolve().parents[1] / "fixtures"


def golden_jobs(root: Path = ROOT):
    """(output name, argv) pairs, shared with the golden tests."""
    jobs = []
    for inst in sorted(root.glob("*.json")):
        name = inst.stem
        argv = ["analyze", str(inst)]
        split = root / "splittings" / f"{name}.json"
        if split.exists():
            argv += ["--splitting", str(split)]
        jobs.append((f"{name}.analyze.json", argv))
        jobs.append((f"{name}.enumerate.json", ["enumerate", str(inst)]))
    return jobs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=ROOT / "golden")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, argv in golden_jobs():
        code = run(argv + ["-o", str(args.out / name)])
        print(f"{code}  {name}")


if __name__ == "__main__":
    main()
