"""``report`` entry point: render harness CSVs into figures + index.

Exit status: 0 if at least one input rendered (skipping garbled files
with a warning), 2 if every input failed or none were found.
"""

from __future__ import annotations

import argparse
import os
import sys

from .render import render_experiment, write_index
from .schema import SchemaError, discover, read_experiment_csv

__all__ = ["main"]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="report",
        description="render verification-harness CSV outputs into "
                    "comparison figures and a Markdown index")
    ap.add_argument("--in", dest="in_dir", required=True,
                    help="directory with <experiment>.csv (+ verdict JSON)")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--format", choices=("svg", "png"), default="svg")
    args = ap.parse_args(argv)

    paths = discover(args.in_dir)
    if not paths:
        sys.stderr.write(f"no experiment CSVs found in {args.in_dir}\n")
        return 2

    os.makedirs(args.out, exist_ok=True)
    entries, skipped = [], []
    for path in paths:
        try:
            data = read_experiment_csv(path)
            fig = render_experiment(data, args.out, args.format)
        except (SchemaError, OSError) as exc:
            sys.stderr.write(f"warning: skipping {path}: {exc}\n")
            skipped.append((path, str(exc)))
            continue
        entries.append((data, fig))
    write_index(entries, skipped, args.out)
    if not entries:
        sys.stderr.write("all inputs failed to parse\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
