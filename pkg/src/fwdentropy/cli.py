"""Command line interface.

Subcommands::

    fwdentropy deltas       --corr m.csv | --data raw.csv   [--universe all|a,b,c]
    fwdentropy table-deltas --counts table.csv
    fwdentropy scan         --graph g.edges (--corr m.csv | --data raw.csv)
                            [--max-order 3] [--threshold 15] [--dot out.dot]
    fwdentropy correlate    --data raw.csv --out m.csv

Exit status is 0 on success, 2 for input errors and 3 for numeric
failures (for example a correlation submatrix that is not positive
definite, which is named on stderr).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .entropy import GaussianOracle, CategoricalOracle, default_zero_tol, to_millibits
from .exceptions import InputError, NumericalError
from .forward_diff import forward_differences
from .graph_scan import cluster_scan, colour_synergies, to_dot
from .io import (
    build_report,
    empirical_correlation,
    file_fingerprint,
    normal_scores,
    read_correlation_csv,
    read_counts_csv,
    read_data_csv,
    read_edge_list,
    write_correlation_csv,
    write_ecdf_csv,
)
from .sets import VariableSet

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, threshold=True):
    p.add_argument("--zero-tol", type=float, default=None,
                   help="mbits treated as zero (default 1e-6 for matrices/tables, 1.0 for raw data)")
    if threshold:
        p.add_argument("--threshold", type=float, default=0.0, help="report synergies with delta < -threshold (mbits)")
    p.add_argument("--units", choices=("mbits", "nats"), default="mbits")
    p.add_argument("--seed", type=int, default=0, help="seed for normal-score tie breaking")
    p.add_argument("--json", metavar="PATH", help="write the JSON report here")
    p.add_argument("--text", metavar="PATH", help="write the text report here instead of stdout")


def _source(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--corr", metavar="CSV", help="correlation matrix CSV")
    src.add_argument("--data", metavar="CSV", help="raw data CSV (normal scores, then correlation)")
    p.add_argument("--no-normal-scores", action="store_true", help="correlate raw data without ranking")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fwdentropy", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("deltas", help="all forward differences of a Gaussian universe")
    _source(d)
    d.add_argument("--universe", default="all", help="'all' or comma-separated variable names")
    _common(d)

    t = sub.add_parser("table-deltas", help="entropies and forward differences of a counts table")
    t.add_argument("--counts", required=True, metavar="CSV")
    _common(t)

    s = sub.add_parser("scan", help="node-cluster scan of a graph")
    _source(s)
    s.add_argument("--graph", required=True, metavar="EDGES")
    direction = s.add_mutually_exclusive_group()
    direction.add_argument("--moralize", action="store_true", help="moralize directed arcs")
    direction.add_argument("--skeleton", action="store_true", help="drop arc directions")
    s.add_argument("--max-order", type=int, default=3)
    s.add_argument("--response", help="response variable name, for typing suppression")
    s.add_argument("--dot", metavar="PATH", help="write the coloured graph as Graphviz DOT")
    s.add_argument("--ecdf", metavar="PATH", help="write the ECDF of third-order cluster differences as CSV")
    _common(s)

    c = sub.add_parser("correlate", help="normal-score correlation matrix of raw data")
    c.add_argument("--data", required=True, metavar="CSV")
    c.add_argument("--out", required=True, metavar="CSV")
    c.add_argument("--no-normal-scores", action="store_true")
    c.add_argument("--seed", type=int, default=0)
    return parser


def _gaussian_oracle(args):
    if args.corr:
        return GaussianOracle(read_correlation_csv(args.corr)), args.corr
    data = read_data_csv(args.data)
    if data.n_dropped:
        print(f"dropped {data.n_dropped} incomplete row(s) from {args.data}", file=sys.stderr)
    if not args.no_normal_scores:
        data = normal_scores(data, args.seed)
    return GaussianOracle(empirical_correlation(data), data_derived=True), args.data


def _metadata(args, path, oracle, **extra):
    meta = {
        "command": args.command,
        "input": Path(path).name,
        "input_fingerprint": file_fingerprint(path),
        "tool_version": __version__,
        "zero_tol": args.zero_tol if args.zero_tol is not None else default_zero_tol(oracle),
        "seed": args.seed,
    }
    meta.update(extra)
    return meta


def _emit(args, doc):
    text = doc.to_text()
    if args.json:
        doc.write(args.json)
    if args.text:
        Path(args.text).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_deltas(args):
    oracle, path = _gaussian_oracle(args)
    if args.universe == "all":
        universe = oracle.universe
    else:
        index = {n: i for i, n in enumerate(oracle.names)}
        wanted = [s.strip() for s in args.universe.split(",") if s.strip()]
        missing = [w for w in wanted if w not in index]
        if missing:
            raise InputError(f"unknown variable(s) in --universe: {', '.join(missing)}")
        universe = VariableSet(index[w] for w in wanted)
    deltas = forward_differences(oracle, universe)
    meta = _metadata(args, path, oracle, threshold=args.threshold)
    doc = build_report(meta, deltas, units=args.units)
    _emit(args, doc)


def _cmd_table_deltas(args):
    table = read_counts_csv(args.counts)
    oracle = CategoricalOracle(table)
    deltas = forward_differences(oracle)
    entropies = {A: to_millibits(oracle.entropy(A)) for A in deltas if A}
    meta = _metadata(args, args.counts, oracle, threshold=args.threshold)
    doc = build_report(meta, deltas, min_order=1, entropies=entropies, units=args.units)
    _emit(args, doc)


def _cmd_scan(args):
    oracle, path = _gaussian_oracle(args)
    mode = "moralize" if args.moralize else "skeleton" if args.skeleton else None
    g = read_edge_list(args.graph, oracle.names, mode)
    response = None
    if args.response:
        if args.response not in oracle.names:
            raise InputError(f"unknown response {args.response!r}")
        response = oracle.names.index(args.response)
    result = cluster_scan(g, oracle, args.max_order, args.threshold, args.zero_tol, response)
    meta = _metadata(args, path, oracle, threshold=args.threshold, max_order=args.max_order,
                     graph_fingerprint=file_fingerprint(args.graph), n_clusters=len(result.clusters))
    doc = build_report(meta, result.deltas, result.findings, sets=result.clusters, units=args.units)
    if args.dot:
        Path(args.dot).write_text(to_dot(colour_synergies(g, result.findings)))
    if args.ecdf:
        write_ecdf_csv([v for _, v in result.cluster_deltas(3)], args.ecdf)
    _emit(args, doc)


def _cmd_correlate(args):
    data = read_data_csv(args.data)
    if not args.no_normal_scores:
        data = normal_scores(data, args.seed)
    write_correlation_csv(empirical_correlation(data), args.out)


COMMANDS = {
    "deltas": _cmd_deltas,
    "table-deltas": _cmd_table_deltas,
    "scan": _cmd_scan,
    "correlate": _cmd_correlate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"fwdentropy: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, OSError) as exc:
        print(f"fwdentropy: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
