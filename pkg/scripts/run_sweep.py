"""Run the type-(6,10) matrix sweep, checkpointed and resumable.

Reads fn6.nlt, fn10.nlt and fn10.ams from the artifact directory (build them
with scripts/build_tables.py).  Completed shards are recorded in
<checkpoint-dir>/sweep610.json and skipped on re-invocation, so the sweep
can be interrupted freely.  --stride 100 runs the deterministic 1% proxy.

Usage:
    python scripts/run_sweep.py --artifacts artifacts --checkpoint-dir ck
"""

import argparse
import os
import sys
import time

from rmcover.nonlin import NlTable
from rmcover.orbit import MatrixSet
from rmcover.verify import sweep_610


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--artifacts", default="artifacts")
    ap.add_argument("--checkpoint-dir", default="sweep-checkpoints")
    ap.add_argument("--stride", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    t6 = NlTable.load(os.path.join(args.artifacts, "fn6.nlt"))
    t10 = NlTable.load(os.path.join(args.artifacts, "fn10.nlt"))
    mset = MatrixSet.load(os.path.join(args.artifacts, "fn10.ams"))

    t0 = time.time()

    def progress(shard, total, matrices):
        print(f"  shard {shard + 1}/{total}: {matrices} matrices done "
              f"({time.time()-t0:.0f}s)", flush=True)

    verdict = sweep_610(mset, t6, t10, stride=args.stride,
                        checkpoint_dir=args.checkpoint_dir,
                        workers=args.workers, progress=progress)
    print(f"[{verdict.outcome}] " +
          " ".join(f"{k}={v}" for k, v in verdict.counters.items()))
    if verdict.counterexample is not None:
        print(f"counterexample: {verdict.counterexample}")
    return 0 if verdict.passed else 1


if __name__ == "__main__":
    sys.exit(main())
