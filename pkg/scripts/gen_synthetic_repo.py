#!/usr/bin/env python3
"""Generate a synthetic repository in the supported language subset.

Example:
    python scripts/gen_synthetic_repo.py /tmp/synth --files 250 --lines-per-file 160 --seed 7
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from uniast.synth import SynthConfig, generate_and_write  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("dest", help="output directory")
    parser.add_argument("--files", type=int, default=100)
    parser.add_argument("--entities-min", type=int, default=1)
    parser.add_argument("--entities-max", type=int, default=10)
    parser.add_argument("--reexport-depth", type=int, default=4)
    parser.add_argument("--lines-per-file", type=int, default=0, help="pad bodies to roughly this many lines")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    config = SynthConfig(
        n_files=args.files,
        min_entities_per_file=args.entities_min,
        max_entities_per_file=args.entities_max,
        reexport_depth=args.reexport_depth,
        target_lines_per_file=args.lines_per_file,
        seed=args.seed,
    )
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    lines = generate_and_write(config, dest)
    print(f"wrote {args.files} files, {lines} source lines to {dest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
