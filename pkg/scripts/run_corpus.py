#!/usr/bin/env python3
"""Run the built-in verification corpus and write the report.

Thin driver around steinlab.reports; equivalent to `steinlab corpus` but
convenient to hack on when adding experiments.
"""

import argparse
import sys

from steinlab.reports import run_corpus, to_csv, to_json, to_markdown

FORMATS = {"md": to_markdown, "json": to_json, "csv": to_csv}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tolerance", type=float, default=1e-8)
    ap.add_argument("--format", choices=sorted(FORMATS), default="md")
    ap.add_argument("--out", default=None, help="write here instead of stdout")
    args = ap.parse_args(argv)

    reports = run_corpus(seed=args.seed, tolerance=args.tolerance)
    text = FORMATS[args.format](reports)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)

    failed = [r.label for r in reports if not r.passed]
    for label in failed:
        print(f"FAILED: {label}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
