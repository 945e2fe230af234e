#!/usr/bin/env python3
"""Indexing-time scaling experiment over generated repositories.

Generates repositories at several file counts, times a full index build
(parse through serialize) for each, and reports the least-squares log-log
slope; a slope near 1 means linear scaling in file count.

Example:
    python scripts/bench_scaling.py --sizes 250,500,1000 --lines-per-file 160
"""

from __future__ import annotations

import argparse
import math
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from uniast.graph import serialize_index  # noqa: E402
from uniast.indexer import IndexOptions, build_index  # noqa: E402
from uniast.synth import SynthConfig, generate_and_write  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="250,500,1000", help="comma-separated file counts")
    parser.add_argument("--lines-per-file", type=int, default=160)
    parser.add_argument("--seed", type=int, default=99)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s]

    times: list[float] = []
    for n_files in sizes:
        with tempfile.TemporaryDirectory() as td:
            root = Path(td)
            lines = generate_and_write(
                SynthConfig(n_files=n_files, target_lines_per_file=args.lines_per_file, seed=args.seed),
                root,
            )
            started = time.perf_counter()
            result = build_index(root, IndexOptions(jobs=args.jobs))
            data = serialize_index(result.index)
            elapsed = time.perf_counter() - started
        times.append(elapsed)
        print(
            f"files={n_files:5d} lines={lines:7d} entities={result.stats.entities:6d} "
            f"edges={result.stats.dependency_edges:6d} index_bytes={len(data):9d} time={elapsed:7.2f}s"
        )

    if len(sizes) >= 2:
        xs = [math.log(n) for n in sizes]
        ys = [math.log(t) for t in times]
        mean_x = sum(xs) / len(xs)
        mean_y = sum(ys) / len(ys)
        slope = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys)) / sum(
            (x - mean_x) ** 2 for x in xs
        )
        print(f"log-log slope: {slope:.3f} (1.0 = linear, 2.0 = quadratic)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
