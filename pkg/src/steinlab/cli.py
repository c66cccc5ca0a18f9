"""Command line front end.

Three subcommands:

  steinlab run <spec.json>      run checks from an experiment spec file
  steinlab corpus               run the built-in experiment battery
  steinlab dim <algebra.json>   derivation-space dimension of one algebra

The exit code is 0 exactly when every executed check passed. The default
tolerance is 1e-8, overridable by the STEINLAB_TOL environment variable
and then by --tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import reports
from .derivations import derivation_space
from .errors import SteinlabError
from .reports import ExperimentSpec, parse_algebra
from .vndim import as_fraction, phi_x, vn_dimension

_FORMATS = {"json": reports.to_json, "csv": reports.to_csv, "md": reports.to_markdown}


def _default_tolerance() -> float:
    env = os.environ.get("STEINLAB_TOL")
    if env is None:
        return 1e-8
    try:
        return float(env)
    except ValueError:
        raise SteinlabError(f"STEINLAB_TOL={env!r} is not a number") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tolerance", type=float, default=None,
                   help="pass/fail tolerance (default 1e-8, or STEINLAB_TOL)")
    p.add_argument("--format", choices=sorted(_FORMATS), default="md",
                   help="report format (default md)")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for the randomized probes")
    p.add_argument("--out", default=None, help="write the report to this file")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _finish(reps: list, fmt: str, out: str | None) -> int:
    _emit(_FORMATS[fmt](reps), out)
    return 0 if all(rep.passed for rep in reps) else 1


def _cmd_run(args) -> int:
    with open(args.spec) as fh:
        payload = json.load(fh)
    if isinstance(payload, dict) and "experiments" in payload:
        objs = payload["experiments"]
    elif isinstance(payload, list):
        objs = payload
    else:
        objs = [payload]
    default_tol = _default_tolerance()
    specs = []
    for obj in objs:
        if not isinstance(obj, dict):
            raise SteinlabError("each experiment must be a JSON object")
        obj = dict(obj)
        if args.tolerance is not None:
            obj["tolerance"] = args.tolerance
        elif "tolerance" not in obj:
            obj["tolerance"] = default_tol
        if args.seed is not None:
            obj["seed"] = args.seed
        specs.append(ExperimentSpec.from_json(obj))
    reps = [reports.run(spec) for spec in specs]
    return _finish(reps, args.format, args.out)


def _cmd_corpus(args) -> int:
    tol = args.tolerance if args.tolerance is not None else _default_tolerance()
    seed = args.seed if args.seed is not None else 0
    reps = reports.run_corpus(seed=seed, tolerance=tol)
    return _finish(reps, args.format, args.out)


def _cmd_dim(args) -> int:
    with open(args.algebra) as fh:
        payload = json.load(fh)
    if isinstance(payload, dict) and "algebra" in payload:
        payload = payload["algebra"]
    alg, blocks = parse_algebra(payload)
    tol = args.tolerance if args.tolerance is not None else _default_tolerance()
    space = derivation_space(alg)
    result = vn_dimension(phi_x(space), tol)
    max_den = alg.dim * alg.dim
    if blocks is not None:
        max_den = 1
        for n, _ in blocks:
            max_den *= n * n
    frac = as_fraction(result.value, max(max_den, 2))
    if args.format == "json":
        text = json.dumps(
            {
                "label": alg.label,
                "dimension": result.value,
                "fraction": None if frac is None else str(frac),
                "rank": result.rank,
            },
            indent=2,
        )
    else:
        shown = f" (= {frac})" if frac is not None else ""
        text = f"dim Der({alg.label or 'A'}) = {result.value:.12g}{shown}"
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steinlab",
        description="derivation spaces, module dimensions, and crossed-product "
                    "dimension formulas for finite-dimensional tracial *-algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the checks from an experiment spec file")
    p_run.add_argument("spec", help="path to the experiment spec (JSON)")
    _add_common(p_run)
    p_run.set_defaults(fn=_cmd_run)

    p_corpus = sub.add_parser("corpus", help="run the built-in experiment battery")
    _add_common(p_corpus)
    p_corpus.set_defaults(fn=_cmd_corpus)

    p_dim = sub.add_parser("dim", help="derivation-space dimension of one algebra")
    p_dim.add_argument("algebra", help="path to the algebra description (JSON)")
    _add_common(p_dim)
    p_dim.set_defaults(fn=_cmd_dim)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SteinlabError as exc:
        print(f"steinlab: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"steinlab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
