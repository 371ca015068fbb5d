"""Command-line interface: every subcommand wraps one library operation.

Reports go to standard output (CSV or markdown), diagnostics to standard
error.  Exit status: 0 success, 1 validation/input error, 2 solver
failure.  Output is deterministic: rows follow dataset order and scores
are printed rounded (4 decimals for scale-size scores, 3 for
efficiencies) while all computation happens at full precision; ``--raw``
switches printing to full precision.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass

from .chain import (
    ChainWeights,
    chain_efficiency,
    chain_mpss,
    intermediate_targets,
)
from .data import load_dataset, parse_data_csv, summarize
from .errors import SolverError, ValidationError
from .network import blackbox_mpss, evaluate_stages, network_mpss_radial, network_mpss_variable
from .rank_tests import kruskal_wallis
from .tandem import decompose

MPSS_DECIMALS = 4
EFF_DECIMALS = 3


@dataclass(frozen=True)
class ReportTable:
    """Rectangular report; ``precisions`` gives decimals per column (None = text)."""

    title: str
    headers: tuple
    rows: tuple
    precisions: tuple
    raw: bool = False

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.headers):
                raise ValidationError("report rows must match the header width")
        if len(self.precisions) != len(self.headers):
            raise ValidationError("one precision entry per column required")


def _cell(value, precision, raw) -> str:
    if precision is None or isinstance(value, str):
        return str(value)
    v = float(value)
    if raw:
        return repr(v)
    text = f"{v:.{precision}f}"
    if float(text) == 0.0:  # avoid a stray "-0.0000"
        text = text.replace("-", "", 1)
    return text


def render(table: ReportTable, format: str = "markdown") -> str:
    """Render to CSV (load-compatible) or a markdown pipe table."""
    cells = [
        [_cell(v, p, table.raw) for v, p in zip(row, table.precisions)]
        for row in table.rows
    ]
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(table.headers)
        writer.writerows(cells)
        return out.getvalue()
    if format == "markdown":
        lines = [f"### {table.title}", ""] if table.title else []
        lines.append("| " + " | ".join(table.headers) + " |")
        lines.append("| " + " | ".join("---" for _ in table.headers) + " |")
        lines.extend("| " + " | ".join(row) + " |" for row in cells)
        return "\n".join(lines) + "\n"
    raise ValidationError(f"unknown output format {format!r}")


# -- argument plumbing ------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse that reports one-line errors and exits with status 1."""

    def error(self, message):
        raise ValidationError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="dea-mpss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name, help_text, *, data=True, topo=True):
        p = sub.add_parser(name, help=help_text)
        if data:
            p.add_argument("--data", required=True, help="CSV file: dmu column then measures")
        if topo:
            p.add_argument("--topology", required=True, help="JSON process/link structure")
        p.add_argument("--format", choices=("csv", "markdown"), default="markdown")
        p.add_argument("--raw", action="store_true", help="print full precision")
        if data:
            p.add_argument("--min-epsilon", type=float, default=None,
                           help="replace nonpositive cells by this value")
            p.add_argument("--dmu", default=None, help="evaluate a single DMU")
        return p

    add("validate", "check a data/topology pair and report its shape")
    add("summary", "descriptive statistics per measure", topo=False)
    add("blackbox-mpss", "scale-size scores ignoring internal structure")
    p = add("network-mpss", "two-stage system scale-size scores")
    p.add_argument("--intermediates", choices=("variable", "radial"), default="variable")
    p.add_argument("--stages", action="store_true",
                   help="also pin the radial system score and split it by stage")
    p = add("decompose", "split process scores into stage and tandem scores",
            data=False, topo=False)
    p.add_argument("--scores", default=None,
                   help="CSV with process1,process2 columns (else use --data/--topology)")
    p.add_argument("--data", default=None)
    p.add_argument("--topology", default=None)
    p.add_argument("--min-epsilon", type=float, default=None)
    p.add_argument("--dmu", default=None)
    p.add_argument("--omega1", type=float, default=0.5, help="stage-1 real-process weight")
    p.add_argument("--omega2", type=float, default=0.5, help="stage-2 real-process weight")
    p = add("chain-eff", "value-chain efficiencies (one solve per DMU)")
    _add_chain_weights(p)
    p = add("chain-mpss", "value-chain scale-size scores")
    _add_chain_weights(p)
    p.add_argument("--targets", action="store_true",
                   help="also report appropriate intermediate levels and strategies")
    p = sub.add_parser("kruskal-wallis", help="rank consistency across score files")
    p.add_argument("--groups", required=True,
                   help="comma-separated CSV files, one group of values each")
    p.add_argument("--no-tie-correction", action="store_true")
    p.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    p.add_argument("--raw", action="store_true")
    return parser


def _add_chain_weights(p) -> None:
    p.add_argument("--w1", type=float, default=1.0)
    p.add_argument("--w2", type=float, default=1.0)
    p.add_argument("--w3", type=float, default=1.0)


def _load(args):
    return load_dataset(args.data, args.topology, min_epsilon=args.min_epsilon)


def _pick_dmus(dataset, args):
    if args.dmu is None:
        return dataset.dmu_ids
    dataset.index_of(args.dmu)
    return (args.dmu,)


def _emit(table: ReportTable, args) -> None:
    sys.stdout.write(render(table, args.format))


# -- subcommand bodies ------------------------------------------------------


def _cmd_validate(args) -> None:
    dataset, topology = _load(args)
    rows = (
        ("dmus", str(dataset.n_dmus)),
        ("measures", str(len(dataset.measure_names))),
        ("shape", topology.shape_tag),
        ("processes", str(len(topology.processes))),
        ("links", str(len(topology.links))),
        ("status", "ok"),
    )
    _emit(ReportTable("validation", ("check", "value"), rows, (None, None)), args)


def _cmd_summary(args) -> None:
    with open(args.data, encoding="utf-8", newline="") as fh:
        dataset = parse_data_csv(fh.read(), min_epsilon=args.min_epsilon)
    stats = summarize(dataset)
    rows = tuple(
        (r.name, r.mean, r.sd, r.minimum, r.maximum) for r in stats.per_measure
    )
    table = ReportTable(
        "descriptive statistics", ("measure", "mean", "sd", "min", "max"),
        rows, (None, 4, 4, 4, 4), raw=args.raw,
    )
    _emit(table, args)


def _cmd_blackbox(args) -> None:
    dataset, topology = _load(args)
    rows = []
    for dmu in _pick_dmus(dataset, args):
        res = blackbox_mpss(dataset, dmu, topology=topology)
        rows.append((dmu, res.score, res.scale_factors["inputs"],
                     res.scale_factors["outputs"], "yes" if res.is_mpss() else "no"))
    table = ReportTable(
        "black-box scale size",
        ("dmu", "score", "input_factor", "output_factor", "mpss"),
        tuple(rows), (None, MPSS_DECIMALS, MPSS_DECIMALS, MPSS_DECIMALS, None),
        raw=args.raw,
    )
    _emit(table, args)


def _cmd_network(args) -> None:
    dataset, topology = _load(args)
    solve = network_mpss_variable if args.intermediates == "variable" else network_mpss_radial
    headers = ["dmu", "score", "stage1_inputs", "stage1_outputs",
               "stage2_inputs", "stage2_outputs", "mpss"]
    precisions = [None] + [MPSS_DECIMALS] * 5 + [None]
    if args.stages:
        headers += ["stage1_score", "stage2_score"]
        precisions += [MPSS_DECIMALS, MPSS_DECIMALS]
    rows = []
    for dmu in _pick_dmus(dataset, args):
        res = solve(dataset, topology, dmu)
        f = res.scale_factors
        row = [dmu, res.score, f["stage1_inputs"], f["stage1_outputs"],
               f["stage2_inputs"], f["stage2_outputs"], "yes" if res.is_mpss() else "no"]
        if args.stages:
            _, st1, st2 = evaluate_stages(dataset, topology, dmu)
            row += [st1.score, st2.score]
        rows.append(tuple(row))
    table = ReportTable(
        f"network scale size ({args.intermediates} intermediates)",
        tuple(headers), tuple(rows), tuple(precisions), raw=args.raw,
    )
    _emit(table, args)


def _read_score_rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"process1", "process2"} <= set(reader.fieldnames):
            raise ValidationError("scores CSV needs process1 and process2 columns")
        label_col = "dmu" if "dmu" in reader.fieldnames else None
        for k, row in enumerate(reader, start=1):
            label = row[label_col] if label_col else str(k)
            try:
                yield label, float(row["process1"]), float(row["process2"])
            except ValueError:
                raise ValidationError(f"scores row {k}: non-numeric process score") from None


def _cmd_decompose(args) -> None:
    weights = (args.omega1, args.omega2)
    rows = []
    if args.scores is not None:
        headers = ("dmu", "process1", "process2", "stage1", "stage2", "tandem")
        for label, p1, p2 in _read_score_rows(args.scores):
            rep = decompose((p1, p2), weights)
            rows.append((label, *rep.process_scores, *rep.stage_scores, rep.tandem_score))
    elif args.data and args.topology:
        headers = ("dmu", "process1", "process2", "stage1", "stage2", "tandem", "system")
        dataset, topology = _load(args)
        for dmu in _pick_dmus(dataset, args):
            system, st1, st2 = evaluate_stages(dataset, topology, dmu)
            rep = decompose((st1.score, st2.score), weights)
            rows.append((dmu, *rep.process_scores, *rep.stage_scores,
                         rep.tandem_score, system.score))
    else:
        raise ValidationError("decompose needs --scores or a --data/--topology pair")
    precisions = (None,) + (MPSS_DECIMALS,) * (len(headers) - 1)
    _emit(ReportTable("scale-size decomposition", headers, tuple(rows), precisions,
                      raw=args.raw), args)


def _cmd_chain_eff(args) -> None:
    dataset, topology = _load(args)
    weights = ChainWeights(args.w1, args.w2, args.w3)
    rows = []
    for dmu in _pick_dmus(dataset, args):
        res = chain_efficiency(dataset, topology, dmu, weights)
        rows.append((dmu, res.objective, res.theta_operation, res.theta_rd,
                     res.marketability, "yes" if res.is_efficient() else "no"))
    table = ReportTable(
        "chain efficiency",
        ("dmu", "objective", "operation", "rd", "marketability", "efficient"),
        tuple(rows), (None,) + (EFF_DECIMALS,) * 4 + (None,), raw=args.raw,
    )
    _emit(table, args)


def _cmd_chain_mpss(args) -> None:
    dataset, topology = _load(args)
    weights = ChainWeights(args.w1, args.w2, args.w3)
    rows = []
    for dmu in _pick_dmus(dataset, args):
        res = chain_mpss(dataset, topology, dmu, weights)
        rows.append((dmu, res.score, res.theta_operation, res.theta_rd,
                     res.theta_market, "yes" if res.is_mpss() else "no"))
    table = ReportTable(
        "chain scale size",
        ("dmu", "score", "theta_operation", "theta_rd", "theta_market", "mpss"),
        tuple(rows), (None,) + (MPSS_DECIMALS,) * 4 + (None,), raw=args.raw,
    )
    _emit(table, args)
    if args.targets:
        mids = topology.intermediate_measures()
        headers = ["dmu"]
        for m in mids:
            headers += [f"{m}_current", f"{m}_appropriate", f"{m}_gap"]
        headers.append("strategy")
        target_rows = []
        for dmu in _pick_dmus(dataset, args):
            report = intermediate_targets(dataset, topology, dmu, weights)
            by_measure = {r.measure: r for r in report.rows}
            row = [dmu]
            for m in mids:
                r = by_measure[m]
                row += [r.current, r.appropriate, r.gap]
            row.append(report.strategy)
            target_rows.append(tuple(row))
        precisions = (None,) + (MPSS_DECIMALS,) * (len(headers) - 2) + (None,)
        sys.stdout.write("\n")
        _emit(ReportTable("intermediate targets", tuple(headers), tuple(target_rows),
                          precisions, raw=args.raw), args)


def _read_group(path):
    values = []
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            for row in csv.reader(fh):
                for cell in row:
                    cell = cell.strip()
                    if not cell:
                        continue
                    try:
                        values.append(float(cell))
                    except ValueError:
                        continue  # header or label cell
    except OSError as exc:
        raise ValidationError(f"cannot read group file: {exc}") from None
    if not values:
        raise ValidationError(f"no numeric values in group file {path}")
    return values


def _cmd_kruskal(args) -> None:
    paths = [p for p in args.groups.split(",") if p]
    groups = [_read_group(p) for p in paths]
    res = kruskal_wallis(groups, tie_correction=not args.no_tie_correction)
    table = ReportTable(
        "rank consistency (Kruskal-Wallis)",
        ("groups", "h_statistic", "df", "p_value", "tie_corrected"),
        ((len(groups), res.h_statistic, res.degrees_of_freedom, res.p_value,
          "yes" if res.tie_corrected else "no"),),
        (None, 3, None, 3, None), raw=args.raw,
    )
    _emit(table, args)


_COMMANDS = {
    "validate": _cmd_validate,
    "summary": _cmd_summary,
    "blackbox-mpss": _cmd_blackbox,
    "network-mpss": _cmd_network,
    "decompose": _cmd_decompose,
    "chain-eff": _cmd_chain_eff,
    "chain-mpss": _cmd_chain_mpss,
    "kruskal-wallis": _cmd_kruskal,
}


def run(argv) -> int:
    """Parse and execute; returns the process exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise ValidationError("missing command (try --help)")
        _COMMANDS[args.command](args)
        return 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
