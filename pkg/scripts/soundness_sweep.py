"""Audit every checker verdict on the {-1,0,1} grid against the enumerator.

The grid for m = 2, n <= 4 has 3^10 + 3^14 + 3^18 instances, far more than
one process can cover quickly; the sweep is therefore sharded and resumable.
Each shard appends one JSON line per violation and a final summary line.

    python scripts/soundness_sweep.py --n 3 --shards 64 --shard 5 --out sweep/
"""

from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

from gavekit.audit import audit, grid_instance, grid_size


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--n", type=int, required=True)
    ap.add_argument("--shards", type=int, default=1)
    ap.add_argument("--shard", type=int, default=0)
    ap.add_argument("--limit", type=int, help="stop after this many instances")
    ap.add_argument("--out", type=Path, default=Path("sweep"))
    args = ap.parse_args()

    total = grid_size(args.m, args.n)
    args.out.mkdir(parents=True, exist_ok=True)
    log = args.out / f"m{args.m}n{args.n}_shard{args.shard}of{args.shards}.jsonl"
    start = 0
    if log.exists():
        # resume after the last checkpoint line
        for line in log.read_text().splitlines():
            rec = json.loads(line)
            if rec.get("kind") == "checkpoint":
                start = rec["next"]
    t0 = time.monotonic()
    done = violations = 0
    with log.open("a") as fh:
        for idx in range(start * args.shards + args.shard, total, args.shards):
            res = audit(grid_instance(args.m, args.n, idx))
            if not res.sound:
                violations += 1
                fh.write(json.dumps({"kind": "violation", "index": idx,
                                     "messages": list(res.violations)}) + "\n")
            done += 1
            if done % 1000 == 0:
                fh.write(json.dumps({"kind": "checkpoint", "next": start + done}) + "\n")
                fh.flush()
                rate = done / (time.monotonic() - t0)
                print(f"{start + done} instances, {violations} violations, {rate:.0f}/s", flush=True)
            if args.limit and done >= args.limit:
                break
        fh.write(json.dumps({"kind": "checkpoint", "next": start + done}) + "\n")
    shard_total = len(range(args.shard, total, args.shards))
    print(json.dumps({"m": args.m, "n": args.n, "shard": args.shard, "audited": start + done,
                      "shard_size": shard_total, "violations": violations}))


if __name__ == "__main__":
    main()
