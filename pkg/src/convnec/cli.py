"""Command-line entry point: ``convnec {transfer,analyze,construct,simulate,bounds}``.

Exit status is 0 on success, 1 on domain errors and 2 on usage or parse
errors.  ``--format json`` prints one JSON object per line, one per result.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .convcode import analyze
from .errors import NecError, ParseError
from .formats import format_phi, parse_phi, resolve_generator, resolve_network, write_generator
from .galois import FieldSpec, field_of_order
from .nec import (
    SearchParams,
    bnecc_field_bound,
    bound_field_size,
    bound_singleton,
    bound_tdfree,
    construct,
)
from .network import NetworkSpec, build_transfer
from .sim import run_exhaustive, run_trials


class UsageError(Exception):
    pass


def _field(text: str) -> FieldSpec:
    try:
        return field_of_order(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(args, record: dict, lines: list[str]):
    if args.format == "json":
        print(json.dumps(record, sort_keys=True))
    else:
        print("\n".join(lines))


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    fmt = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()  # noqa: E731
    return [fmt(headers), fmt(["-" * w for w in widths])] + [fmt(r) for r in rows]


def _load_network(args) -> NetworkSpec:
    spec = resolve_network(args.network)
    if getattr(args, "field", None) is not None:
        spec = dataclasses.replace(spec, field=args.field)
        spec.validate()
    return spec


def _report(args):
    spec = _load_network(args)
    phi = parse_phi(args.phi, spec.num_edges)
    code = resolve_generator(args.code, spec.field) if args.code else None
    report = construct(spec, phi, code, SearchParams(delta_max=args.delta_max))
    if args.write_code:
        Path(args.write_code).write_text(write_generator(report.code), encoding="utf-8")
    return report


# -- subcommands ------------------------------------------------------------


def cmd_transfer(args) -> int:
    spec = _load_network(args)
    ts = build_transfer(spec)
    if args.format == "json":
        for t in ts.sinks:
            print(json.dumps({
                "sink": str(t),
                "F_T": ts.F_T[t].tolist(),
                "M_T": ts.M_T[t].tolist(),
                "M_T_inv": ts.M_T_inv[t].tolist(),
            }, sort_keys=True))
        return 0
    lines = [f"field {ts.field}, n = {ts.num_inputs}, |E| = {ts.num_edges}", f"A = {ts.A}", f"K = {ts.K}", f"F = {ts.F}"]
    for t in ts.sinks:
        lines += [f"sink {t}", f"  F_T = {ts.F_T[t]}", f"  M_T = {ts.M_T[t]}", f"  M_T^-1 = {ts.M_T_inv[t]}"]
    print("\n".join(lines))
    return 0


def cmd_analyze(args) -> int:
    g = resolve_generator(args.code, args.field)
    m = analyze(g)
    k, n = g.shape
    singleton = bound_singleton(n, k, m.degree) if k < n else None
    record = {"code": str(g), "field": str(args.field), **m.as_dict(), "singleton_bound": singleton}
    lines = [f"code            {g} over {args.field}", f"degree          {m.degree}",
             f"row degrees     {', '.join(map(str, m.row_degrees))}",
             f"catastrophic    {'yes' if m.catastrophic else 'no'}"]
    if not m.catastrophic:
        lines += [f"dfree           {m.dfree}", f"T_dfree         {m.tdfree}"]
    if singleton is not None:
        lines.append(f"Singleton bound {singleton}")
    _emit(args, record, lines)
    return 0


def cmd_construct(args) -> int:
    report = _report(args)
    rows = [
        [str(p.sink), str(report.output_codes[p.sink]), f"{p.output_dfree},{p.output_tdfree}", p.trellis_name]
        for p in report.plans
    ]
    lines = [
        f"Phi = {format_phi(report.phi)}",
        f"|W_Phi| = {report.w_phi.shape[0]}, |W_s| = {report.w_s.shape[0]}, t_s = {report.t_s}",
        f"input code {report.code}: dfree {report.metrics.dfree}, T_dfree {report.metrics.tdfree} "
        f"(need dfree >= {report.required_dfree})",
        "",
        *_table(["Sink", "Output code", "dfree,T_dfree", "Decoding"], rows),
    ]
    _emit(args, report.as_dict(), lines)
    return 0


def cmd_simulate(args) -> int:
    report = _report(args)
    spacing = args.spacing if args.spacing is not None else report.metrics.tdfree
    if args.exhaustive:
        summary = run_exhaustive(report, args.length, spacing, args.messages, args.seed, args.exhaustive,
                                 method=args.decoder)
    else:
        summary = run_trials(report, args.trials, args.length, spacing, args.seed, args.decoder)
    if args.format == "json":
        base = {k: v for k, v in summary.as_dict().items() if k != "sinks"}
        for t, rec in summary.as_dict()["sinks"].items():
            print(json.dumps({**base, "decoder": args.decoder, "sink": t, **rec}, sort_keys=True))
        return 0
    rows = [[str(t), str(summary.trials[t]), str(summary.failures[t])] for t in summary.trials]
    print(f"{summary.mode} simulation, spacing {spacing}, message length {args.length}, "
          f"decoder {args.decoder}, seed {args.seed}")
    print("\n".join(_table(["Sink", "Trials", "Failures"], rows)))
    return 0


def cmd_bounds(args) -> int:
    n, k, delta = args.n, args.k, args.delta
    if not 0 < k < n:
        raise UsageError(f"need 0 < k < n, got k={k}, n={n}")
    singleton = bound_singleton(n, k, delta)
    dfree = args.dfree if args.dfree is not None else singleton
    general = bound_tdfree(dfree, delta).general
    mds = bound_tdfree(dfree, delta, n, k, is_mds=True).mds if delta == 2 * k else None
    record = {
        "n": n, "k": k, "delta": delta, "sinks": args.sinks,
        "singleton": singleton,
        "field_size": bound_field_size(n, k, args.sinks),
        "tdfree_dfree": dfree,
        "tdfree_cap": general,
        "tdfree_mds_cap": mds,
    }
    lines = [
        f"Singleton bound on dfree          {singleton}",
        f"smallest admissible field size    {record['field_size']}",
        f"T_dfree cap at dfree {dfree:<2}          {general}",
    ]
    if mds is not None:
        lines.append(f"T_dfree cap for an MDS code       {mds}")
    extra = (args.j, args.edges, args.t)
    if any(v is not None for v in extra):
        if any(v is None for v in extra):
            raise UsageError("--J, --edges and --t must be given together")
        record["bnecc_field_bound"] = bnecc_field_bound(args.j, args.edges, args.t, args.sinks)
        lines.append(f"block-code field requirement      q > {record['bnecc_field_bound']}")
    _emit(args, record, lines)
    return 0


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="convnec", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, network=True):
        p.add_argument("--format", choices=("table", "json"), default="table")
        if network:
            p.add_argument("network", help="network file, or builtin:butterfly | builtin:butterfly-f3 | builtin:4c2")
            p.add_argument("--field", type=_field, help="override the field declared in the network file (order q)")

    def code_source(p):
        p.add_argument("--phi", default="single-edges",
                       help="single-edges, upto-K-edges, or explicit patterns like '1,2;3' (1-based)")
        p.add_argument("--code", help="generator matrix text or file; searched for when omitted")
        p.add_argument("--delta-max", type=int, default=2, help="largest degree tried by the code search")
        p.add_argument("--write-code", metavar="PATH", help="write the input generator to PATH")

    p = sub.add_parser("transfer", help="transfer matrices of a network code")
    common(p)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("analyze", help="free distance, T_dfree and degrees of a generator")
    common(p, network=False)
    p.add_argument("code", help="generator matrix text or file, e.g. '1+z^2, 1+z+z^2'")
    p.add_argument("--field", type=_field, default=_field("2"), help="field order q (default 2)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("construct", help="build a network-error-correcting code and decoding plan")
    common(p)
    code_source(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", help="inject edge errors and decode at every sink")
    common(p)
    code_source(p)
    p.add_argument("--spacing", type=int, help="minimum gap between erroneous network uses (default T_dfree)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--length", type=int, default=20, help="message length in blocks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", choices=("single", "paired", "same-use"),
                   help="enumerate error placements instead of random trials")
    p.add_argument("--messages", type=int, default=20, help="messages per exhaustive run")
    p.add_argument("--decoder", choices=("window", "ml"), default="window",
                   help="sliding-window decoder with depth T_dfree, or full-sequence ML")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="Singleton, field-size and T_dfree bounds")
    common(p, network=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--sinks", type=int, required=True)
    p.add_argument("--dfree", type=int, help="free distance for the T_dfree cap (default: Singleton bound)")
    p.add_argument("--J", dest="j", type=int, help="network uses of the block-code comparison")
    p.add_argument("--edges", type=int)
    p.add_argument("--t", type=int, help="errors corrected by the block code")
    p.set_defaults(func=cmd_bounds)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, UsageError, KeyError, FileNotFoundError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"convnec: error: {msg}", file=sys.stderr)
        return 2
    except (NecError, ValueError) as exc:
        print(f"convnec: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
