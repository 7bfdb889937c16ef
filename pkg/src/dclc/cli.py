"""Command-line entry point: ``dclc <subcommand> ...``.

Exit status is 0 on success, 1 on usage or I/O errors and 2 when a
delay-constrained instance is infeasible.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence, TextIO

from . import experiments as ex
from .adh import adh_tree
from .dcadh import dcadh
from .graph import GraphError, MulticastRequest, Network, read_graph, tree_cost, validate_tree, write_graph
from .oracle import BudgetExceeded, exact_dclc, exact_steiner
from .shortest_paths import Metric, dijkstra
from .topology import GenerationError, WaxmanConfig, generate

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2

log = logging.getLogger("dclc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _ids(text: str) -> list[int]:
    try:
        ids = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated node ids, got {text!r}") from None
    if not ids:
        raise argparse.ArgumentTypeError("empty node id list")
    return ids


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _load(path: str) -> Network:
    with open(path) as fh:
        return read_graph(fh)


def _request(args, net: Network) -> MulticastRequest:
    req = MulticastRequest(args.source, frozenset(args.dest), args.delay_bound)
    req.check(net)
    return req


def _print_tree(parent, net: Network, out: TextIO) -> None:
    for v, p in sorted(parent.items()):
        a = net.edge(p, v)
        out.write(f"edge {p} {v} {a.cost!r} {a.delay!r}\n")


def cmd_gen(args, out: TextIO) -> int:
    cfg = WaxmanConfig(
        n=args.n, alpha=args.alpha, beta=args.beta,
        area_width_km=args.width_km, area_height_km=args.height_km,
        cost_min=args.cost_min, cost_max=args.cost_max, seed=args.seed,
    )
    net = generate(cfg)
    if args.out in (None, "-"):
        write_graph(net, out)
    else:
        with open(args.out, "w") as fh:
            write_graph(net, fh)
        log.info("wrote %r to %s", net, args.out)
    return EXIT_OK


def cmd_spt(args, out: TextIO) -> int:
    net = _load(args.graph)
    spt = dijkstra(net, args.root, Metric(args.metric))
    out.write("node dist parent\n")
    for v in sorted(spt.dist):
        out.write(f"{v} {spt.dist[v]!r} {spt.parent.get(v, '-')}\n")
    return EXIT_OK


def cmd_adh(args, out: TextIO) -> int:
    net = _load(args.graph)
    for t in args.terminals:
        if not 0 <= t < net.n:
            raise GraphError(f"terminal {t} not in network")
    tree = adh_tree(net, args.terminals)
    for u, v in sorted(tree.edges):
        out.write(f"edge {u} {v} {net.edge(u, v).cost!r}\n")
    out.write(f"cost {tree.cost(net)!r}\n")
    return EXIT_OK


def cmd_solve(args, out: TextIO) -> int:
    net = _load(args.graph)
    req = _request(args, net)
    res = dcadh(net, req)
    if res.tree is None:
        out.write("INFEASIBLE\n")
        return EXIT_INFEASIBLE
    _print_tree(res.tree.parent, net, out)
    out.write(f"cost {tree_cost(res.tree, net)!r}\n")
    out.write(f"max_delay {max(res.tree.node_delay[d] for d in req.destinations)!r}\n")
    log.info("repair passes=%d merged paths=%d loop repairs=%d",
             res.stats.iterations, res.stats.merged_paths, res.stats.loop_repairs)
    return EXIT_OK


def cmd_oracle(args, out: TextIO) -> int:
    net = _load(args.graph)
    if args.delay_bound is None:
        terms = {args.source, *args.dest}
        best = exact_steiner(net, terms)
        for u, v in sorted(best.edges):
            out.write(f"edge {u} {v} {net.edge(u, v).cost!r}\n")
        out.write(f"cost {best.cost!r}\n")
        return EXIT_OK
    req = _request(args, net)
    best = exact_dclc(net, req)
    if best is None:
        out.write("INFEASIBLE\n")
        return EXIT_INFEASIBLE
    _print_tree(best.parent, net, out)
    out.write(f"cost {best.cost!r}\n")
    return EXIT_OK


def cmd_experiment(args, out: TextIO) -> int:
    spec = ex.preset(
        args.preset, args.scale,
        base_seed=args.seed, n=args.n, m=args.m, delay_bound=args.delay_bound,
        topologies=args.topologies, trials=args.trials, alpha=args.alpha, beta=args.beta,
        values=args.values,
    )
    if args.values is not None and spec.sweep != "delay_bound":
        spec = ex.replace(spec, values=tuple(int(v) for v in spec.values))
    records = ex.run_experiment(spec, jobs=args.jobs, deterministic=args.deterministic)
    aggs = ex.aggregate(records)
    res = ex.emit(records, aggs, args.out, sweep=spec.sweep, figures=not args.no_figures)
    for a in aggs:
        mean = "-" if a.mean_cost is None else f"{a.mean_cost:.3f}"
        out.write(f"{a.algorithm:6s} {a.sweep!r:>8} feasible {a.feasible}/{a.records} mean_cost {mean}\n")
    log.info("wrote %s, %s, %s", res.raw, res.summary, res.script)
    return EXIT_OK


def cmd_validate(args, out: TextIO) -> int:
    net = _load(args.graph)
    out.write(f"graph ok: {net.n} nodes, {net.num_edges} edges, connected\n")
    if args.source is None:
        return EXIT_OK
    if args.dest is None or args.delay_bound is None:
        raise UsageError("validate: --source requires --dest and --delay-bound")
    req = _request(args, net)
    res = dcadh(net, req)
    if res.tree is None:
        out.write("INFEASIBLE\n")
        return EXIT_INFEASIBLE
    rep = validate_tree(res.tree, net, req)
    for flag in rep.FLAGS:
        out.write(f"{flag} {'pass' if getattr(rep, flag) else 'FAIL'}\n")
    for p in rep.problems:
        print(p, file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dclc", description="Delay-constrained least-cost multicast routing.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    g = sub.add_parser("gen", help="generate a connected Waxman network")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--alpha", type=float, default=0.3)
    g.add_argument("--beta", type=float, default=0.3)
    g.add_argument("--width-km", type=float, default=2400.0)
    g.add_argument("--height-km", type=float, default=3000.0)
    g.add_argument("--cost-min", type=int, default=1)
    g.add_argument("--cost-max", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="graph file (default: stdout)")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("spt", help="Dijkstra distances from a root")
    s.add_argument("--graph", required=True)
    s.add_argument("--root", type=int, required=True)
    s.add_argument("--metric", choices=[m.value for m in Metric], default="delay")
    s.set_defaults(func=cmd_spt)

    a = sub.add_parser("adh", help="least-cost tree over terminals (no delay bound)")
    a.add_argument("--graph", required=True)
    a.add_argument("--terminals", type=_ids, required=True)
    a.set_defaults(func=cmd_adh)

    def request_flags(sp, bound_required=True):
        sp.add_argument("--graph", required=True)
        sp.add_argument("--source", type=int, required=bound_required)
        sp.add_argument("--dest", type=_ids, required=bound_required)
        sp.add_argument("--delay-bound", type=float, required=bound_required, metavar="SECONDS")

    sv = sub.add_parser("solve", help="delay-constrained tree via DCADH")
    request_flags(sv)
    sv.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exact optimum by enumeration (small graphs)")
    o.add_argument("--graph", required=True)
    o.add_argument("--source", type=int, required=True)
    o.add_argument("--dest", type=_ids, required=True)
    o.add_argument("--delay-bound", type=float, metavar="SECONDS",
                   help="omit for the unconstrained Steiner optimum")
    o.add_argument("--exact", action="store_true", help="exhaustive search (the only mode)")
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("experiment", help="run a simulation sweep, write CSV and figures")
    e.add_argument("--preset", choices=["exp1", "exp2", "exp3"], required=True)
    e.add_argument("--scale", choices=["paper", "desk"], default="desk")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", required=True, help="output directory")
    e.add_argument("--n", type=int)
    e.add_argument("--m", type=int)
    e.add_argument("--delay-bound", type=float, metavar="SECONDS")
    e.add_argument("--topologies", type=int)
    e.add_argument("--trials", type=int)
    e.add_argument("--alpha", type=float)
    e.add_argument("--beta", type=float)
    e.add_argument("--values", type=_floats, help="comma-separated sweep values")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--deterministic", action="store_true", help="zero the runtime column")
    e.add_argument("--no-figures", action="store_true")
    e.set_defaults(func=cmd_experiment)

    val = sub.add_parser("validate", help="check a graph file, optionally a solved tree")
    request_flags(val, bound_required=False)
    val.set_defaults(func=cmd_validate)
    return p


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_ERROR
        logging.basicConfig(
            level=logging.WARNING - 10 * min(args.verbose, 2),
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        return args.func(args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except (GraphError, GenerationError, BudgetExceeded, ValueError, OSError) as exc:
        print(f"dclc: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
