"""Command-line entry point.

Every invocation ends with a ``status=<ok|error> code=<n>`` line on stdout.
Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import glob
import os
import sys
from math import comb

from . import kernels
from .codec import ObjectData, decode, encode, object_digest, read_piece, write_piece
from .errors import SpreadCodeError
from .layout import derive_params, build_layout, parse_layout, verify_spread
from .repair import pair_partner, plan_min_download, plan_pair_repair
from .resilience import (
    DEFAULT_GRID,
    ENUMERATION_BUDGET,
    availability_csv,
    bandwidth_csv,
    compare_bandwidth,
    rho_exhaustive,
    rho_sampled,
    rho_table,
    rho_table_sampled,
)
from .sim import parse_scenario, sim_init, sim_report, sim_retrieve, sim_step, sim_summary


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _ids(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _layout(args):
    return build_layout(derive_params(args.B, args.alpha, _poly(args)))


def _poly(args):
    return int(args.poly, 16) if getattr(args, "poly", None) else "default"


def _emit(args, text):
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_params(args):
    p = derive_params(args.B, args.alpha, _poly(args))
    print(f"B={p.B} alpha={p.alpha} b={p.b} n={p.n} k={p.k} poly={p.poly:#x}")


def cmd_layout(args):
    _emit(args, _layout(args).to_text())


def cmd_verify(args):
    with open(args.layout, encoding="utf-8") as fh:
        layout = parse_layout(fh.read())
    report = verify_spread(layout)
    print(report)
    if not report.ok:
        raise SpreadCodeError(f"{len(report.violations)} spread violation(s)")


def cmd_encode(args):
    layout = _layout(args)
    with open(args.input, "rb") as fh:
        data = fh.read()
    obj = ObjectData.from_bytes(data, layout.B)
    digest = object_digest(data)
    count = 0
    for held in encode(layout, obj):
        node_dir = os.path.join(args.out, f"N{held.node_id}")
        os.makedirs(node_dir, exist_ok=True)
        for piece in held.pieces:
            write_piece(os.path.join(node_dir, f"piece{piece.index}.piece"),
                        piece, digest, len(data), layout.B)
            count += 1
    print(f"object={digest} size={len(data)} fragment_len={obj.fragment_len} "
          f"nodes={layout.n} pieces={count}")


def cmd_decode(args):
    paths = sorted(glob.glob(os.path.join(args.pieces, "N*", "*.piece")))
    if args.nodes:
        keep = {f"N{n}" for n in args.nodes}
        paths = [p for p in paths if os.path.basename(os.path.dirname(p)) in keep]
    if not paths:
        raise SpreadCodeError(f"no piece files under {args.pieces}")
    pieces = []
    metas = []
    for path in paths:
        piece, meta = read_piece(path)
        pieces.append(piece)
        metas.append(meta)
    digests = {m["object"] for m in metas}
    if len(digests) != 1:
        raise SpreadCodeError("piece files belong to different objects")
    widths = {m["width"] for m in metas}
    if len(widths) != 1:
        raise SpreadCodeError("piece files disagree on B")
    size = int(metas[0]["size"])
    obj = decode(pieces, widths.pop(), size)
    data = obj.to_bytes()
    if object_digest(data) != digests.pop():
        raise SpreadCodeError("decoded object does not match recorded digest")
    with open(args.out, "wb") as fh:
        fh.write(data)
    print(f"decoded size={size} pieces_used={len(pieces)}")


def cmd_repair_plan(args):
    layout = _layout(args)
    if args.pair:
        if len(args.pair) != 2:
            raise UsageError("--pair needs exactly two node ids")
        plan = plan_pair_repair(layout, args.failed, tuple(args.pair))
    else:
        live = set(range(1, layout.n + 1)) - set(args.dead or ()) - {args.failed}
        plan = plan_min_download(layout, args.failed, args.d, live)
    print(plan.format(layout.B))
    if not plan.optimal:
        print("optimal=unknown")


def cmd_partners(args):
    layout = _layout(args)
    print(" ".join(f"N_{j}" for j in pair_partner(layout, args.failed, args.first)))


def cmd_rho(args):
    layout = _layout(args)
    if args.samples is not None and args.seed is None:
        raise UsageError("--samples requires --seed")
    if args.x is not None:
        if args.samples is not None:
            est = rho_sampled(layout, args.x, args.samples, args.seed)
            print(f"x={args.x} samples={est.samples} deficient={est.deficient} "
                  f"rho={est.estimate!r} ci=[{est.ci_low!r},{est.ci_high!r}] method={est.method}")
        else:
            deficient, rho = rho_exhaustive(layout, args.x, args.budget, args.workers)
            print(f"x={args.x} deficient={deficient} total={comb(layout.n, args.x)} rho={rho!r}")
        return
    if args.samples is not None:
        table = rho_table_sampled(layout, args.samples, args.seed)
    else:
        table = rho_table(layout, args.budget, args.workers)
    _emit(args, table.to_csv())


def cmd_availability(args):
    layout = _layout(args)
    if args.samples is not None:
        if args.seed is None:
            raise UsageError("--samples requires --seed")
        table = rho_table_sampled(layout, args.samples, args.seed)
    else:
        table = rho_table(layout, args.budget, args.workers)
    steps = round(1 / args.step)
    grid = DEFAULT_GRID if args.step == 0.01 else tuple(i / steps for i in range(steps + 1))
    _emit(args, availability_csv(table, grid))


def cmd_bandwidth(args):
    layout = _layout(args)
    _emit(args, bandwidth_csv(compare_bandwidth(layout, args.d, args.failed)))


def cmd_simulate(args):
    with open(args.scenario, encoding="utf-8") as fh:
        text = fh.read()
    if args.seed is not None:
        text += f"\nseed={args.seed}\n"
    config = parse_scenario(text)
    state = sim_init(config)
    for _ in range(config.epochs):
        sim_step(state)
    for _ in range(args.retrievals):
        sim_retrieve(state, args.strategy)
    _emit(args, sim_report(state))
    print(sim_summary(state))


def build_parser():
    parser = _Parser(prog="spreadcode", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s ({kernels.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_params(p):
        p.add_argument("--B", type=int, required=True, help="object dimension (fragments)")
        p.add_argument("--alpha", type=int, required=True, help="pieces per node")
        p.add_argument("--poly", help="primitive polynomial for GF(2^B), hex")
        return p

    p = with_params(sub.add_parser("params", help="derive n and k"))
    p.set_defaults(func=cmd_params)

    p = with_params(sub.add_parser("layout", help="print the node basis layout"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("verify", help="check a layout file is a spread")
    p.add_argument("--layout", required=True)
    p.set_defaults(func=cmd_verify)

    p = with_params(sub.add_parser("encode", help="encode a file into per-node piece files"))
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="rebuild a file from piece files")
    p.add_argument("--pieces", required=True, help="directory written by encode")
    p.add_argument("--nodes", type=_ids, help="only use these node ids")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode)

    p = with_params(sub.add_parser("repair-plan", help="plan the repair of one node"))
    p.add_argument("--failed", type=int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--pair", type=_ids, help="two partner nodes, e.g. 3,4")
    group.add_argument("--d", type=int, default=2, help="max source nodes (min-download search)")
    p.add_argument("--dead", type=_ids, help="other unavailable nodes")
    p.set_defaults(func=cmd_repair_plan)

    p = with_params(sub.add_parser("partners", help="repair partners for a first contact"))
    p.add_argument("--failed", type=int, required=True)
    p.add_argument("--first", type=int, required=True)
    p.set_defaults(func=cmd_partners)

    for name, func, helptext in (("rho", cmd_rho, "retrievability per subset size"),
                                 ("availability", cmd_availability, "static resilience curve")):
        p = with_params(sub.add_parser(name, help=helptext))
        if name == "rho":
            p.add_argument("--x", type=int)
        else:
            p.add_argument("--step", type=float, default=0.01)
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--budget", type=int, default=ENUMERATION_BUDGET)
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = with_params(sub.add_parser("bandwidth", help="PSRC vs MSR repair download"))
    p.add_argument("--d", type=_ids, default=[2, 3, 4])
    p.add_argument("--failed", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bandwidth)

    p = sub.add_parser("simulate", help="run a scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, help="overrides the scenario seed")
    p.add_argument("--retrievals", type=int, default=0)
    p.add_argument("--strategy", choices=("random-k", "systematic", "all-live"), default="random-k")
    p.add_argument("--out", help="report CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)
    return parser


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except SystemExit as exc:  # --help / --version
        if exc.code not in (0, None):
            raise
        print("status=ok code=0")
        return 0
    except UsageError as exc:
        print(exc, file=sys.stderr)
        print("status=error code=2")
        return 2
    except (SpreadCodeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("status=error code=1")
        return 1
    print("status=ok code=0")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
