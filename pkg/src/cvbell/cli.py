"""Command-line front end: ``cvbell table1 | fig N | criticals | thresholds | sweep | verify``."""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from . import oracle, reproduce
from .specfun import ConvergenceError, SeriesControl

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_CONVERGENCE = 0, 1, 2, 3

DEFAULT_OPS = ((0, 0), (1, 0), (2, 0), (3, 0), (2, 1), (-1, 0), (-2, -1))
DEFAULT_XS = (0.1, 0.25, 0.5, 0.8)


def _overrides(pairs):
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _global_flags(parser, suppress: bool):
    # flags are accepted before or after the subcommand; the subcommand copy
    # must not reset values given before it
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--tol", type=float, default=dflt(None), help="series tolerance")
    parser.add_argument("--out", type=Path, default=dflt(None), help="write output here")
    parser.add_argument("--format", choices=("csv", "json"), default=dflt(None))
    parser.add_argument("--check", action="store_true", default=dflt(False),
                        help="compare against the shipped golden output")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    p = argparse.ArgumentParser(prog="cvbell",
                                description="Bell violation of photon-added and -subtracted squeezed states")
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("table1", parents=[common], help="gain table for single-mode addition")

    f = sub.add_parser("fig", parents=[common], help="figure dataset")
    f.add_argument("id", type=int, choices=range(1, 7), metavar="{1-6}")
    f.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")

    sub.add_parser("criticals", parents=[common], help="critical squeezing values")

    t = sub.add_parser("thresholds", parents=[common], help="critical mixing probabilities")
    t.add_argument("--model", choices=("thermal", "gaussian", "correlated"), default="thermal")
    t.add_argument("--r", type=float, default=1.25)
    t.add_argument("--beta1", type=float, default=3.0)
    t.add_argument("--beta2", type=float, default=5.0)
    t.add_argument("--sigma1", type=float, default=1.0)
    t.add_argument("--sigma2", type=float, default=1.0)
    t.add_argument("--k", type=int, default=0)

    s = sub.add_parser("sweep", parents=[common], help="grid evaluation from a config file")
    s.add_argument("--config", type=Path, required=True)
    s.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")

    v = sub.add_parser("verify", parents=[common], help="closed form vs brute-force oracle")
    v.add_argument("--x", type=float, nargs="+", default=None)
    v.add_argument("--op", type=int, nargs=2, action="append", metavar=("K", "L"))
    v.add_argument("--cutoff", type=int, default=200, help="Fock cutoff (fixed unless --auto)")
    v.add_argument("--auto", action="store_true", help="double the cutoff until the tail is small")
    v.add_argument("--agree", type=float, default=1e-6, help="agreement tolerance")
    return p


def _emit(text: str, args) -> None:
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)


def _golden(name: str) -> str:
    return resources.files("cvbell.golden").joinpath(name).read_text()


def _finish(text: str, golden_name: str | None, args) -> int:
    _emit(text, args)
    if args.check:
        if golden_name is None:
            print("no golden file for this command", file=sys.stderr)
            return EXIT_INPUT
        if text != _golden(golden_name):
            print(f"output differs from golden {golden_name}", file=sys.stderr)
            return EXIT_VERIFY
        print(f"matches golden {golden_name}", file=sys.stderr)
    return EXIT_OK


def _verify(args, ctrl) -> int:
    xs = args.x or DEFAULT_XS
    ops = [tuple(o) for o in args.op] if args.op else DEFAULT_OPS
    ds = reproduce.Dataset(["x", "op1", "op2", "cutoff", "tail", "closed", "numeric",
                            "eigen", "status"])
    failed = False
    for x in xs:
        for k, l in ops:
            try:
                d = oracle.verify_point(x, k, l, args.cutoff, args.auto)
            except oracle.TruncationError as exc:
                failed = True
                print(f"x={x} op=({k},{l}): {exc}", file=sys.stderr)
                ds.add(x, k, l, exc.cutoff, exc.tail, float("nan"), float("nan"),
                       float("nan"), "truncated")
                continue
            ok = (abs(d["numeric"] - d["closed"]) < args.agree
                  and abs(d["eigen"] - d["closed"]) < args.agree)
            if not ok:
                failed = True
                print(f"x={x} op=({k},{l}): closed={d['closed']!r} numeric={d['numeric']!r} "
                      f"eigen={d['eigen']!r}", file=sys.stderr)
            ds.add(x, k, l, d["cutoff"], d["tail"], d["closed"], d["numeric"], d["eigen"],
                   "pass" if ok else "fail")
    text = reproduce.to_json(ds) if args.format == "json" else reproduce.to_csv(ds)
    _emit(text, args)
    print("verify: " + ("FAIL" if failed else "pass"), file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def run(args) -> int:
    ctrl = SeriesControl(tolerance=args.tol) if args.tol is not None else SeriesControl()
    fmt = args.format
    if args.command == "table1":
        ds = reproduce.table1(ctrl)
        if fmt == "json":
            return _finish(reproduce.to_json(ds), "table1.json", args)
        return _finish(reproduce.to_csv(ds), "table1.csv", args)
    if args.command == "fig":
        ds = reproduce.figure(args.id, _overrides(args.set), ctrl)
        golden = None if args.set else f"fig{args.id}.{fmt or 'csv'}"
        text = reproduce.to_json(ds) if fmt == "json" else reproduce.to_csv(ds)
        return _finish(text, golden, args)
    if args.command == "criticals":
        if fmt == "csv":
            raise ValueError("criticals are reported as JSON only")
        return _finish(reproduce.to_json(reproduce.criticals(ctrl)), "criticals.json", args)
    if args.command == "thresholds":
        if fmt == "csv":
            raise ValueError("thresholds are reported as JSON only")
        rep = reproduce.thresholds(args.model, args.r, args.beta1, args.beta2,
                                   args.sigma1, args.sigma2, args.k, ctrl)
        defaults = (args.model, args.r, args.beta1, args.beta2, args.k) == ("thermal", 1.25, 3.0, 5.0, 0)
        return _finish(reproduce.to_json(rep), "thresholds.json" if defaults else None, args)
    if args.command == "sweep":
        ds = reproduce.sweep(args.config.read_text(), _overrides(args.set), ctrl)
        text = reproduce.to_json(ds) if fmt == "json" else reproduce.to_csv(ds)
        return _finish(text, None, args)
    if args.command == "verify":
        return _verify(args, ctrl)
    raise ValueError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return run(args)
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ValueError, TypeError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
