"""Command line front end: solving, artifact builds, simulation,
analysis, and the HTTP server."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analytics import (
    LogValidationError,
    run_pipeline,
    save_scores,
    simulate_cohort,
    synthesize_log,
)
from .cube import COLOR_CHARS, Metric, scramble, sequence_to_notation, state_from_string
from .patterns import GREY_CHAR, white_cross_pattern
from .service import default_data_dir
from .solver import PatternDatabase, build_pdb, solve_optimal
from .subgoals import build_graph, save_graph
from .telemetry import write_log


def _metric(name: str) -> Metric:
    return Metric(name.lower())


def load_or_build_pdb(metric: Metric, data_dir: Path) -> PatternDatabase:
    """Cross distance table, cached on disk per metric."""
    path = data_dir / f"cross-{metric.value}.xpdb"
    if path.exists():
        try:
            pdb = PatternDatabase.load(path)
            if pdb.metric is metric:
                return pdb
        except ValueError:
            pass
    pdb = build_pdb(white_cross_pattern(), metric)
    data_dir.mkdir(parents=True, exist_ok=True)
    pdb.save(path)
    return pdb


def _cmd_solve(args: argparse.Namespace) -> int:
    metric = _metric(args.metric)
    if args.seed is not None:
        state, seq = scramble(args.seed, args.length, metric)
        print(f"scramble: {sequence_to_notation(seq)}")
    elif args.position:
        text = args.position
        if len(text) == 54 and all(c in COLOR_CHARS + GREY_CHAR for c in text):
            state = state_from_string(text)
        else:
            from .cube import SOLVED, apply_sequence, parse_sequence
            seq = parse_sequence(text, metric)
            state = apply_sequence(SOLVED, seq)
            print(f"scramble: {sequence_to_notation(seq)}")
    else:
        print("solve needs a position, a move sequence, or --seed/--length",
              file=sys.stderr)
        return 2
    pdb = load_or_build_pdb(metric, Path(args.data_dir))
    solution = solve_optimal(state, white_cross_pattern(), pdb)
    print(f"solution: {sequence_to_notation(solution.seq) or '(already solved)'}")
    print(f"length: {len(solution)}")
    print(f"nodes expanded: {solution.nodes_expanded}")
    return 0


def _cmd_pdb_build(args: argparse.Namespace) -> int:
    metric = _metric(args.metric)
    pdb = build_pdb(white_cross_pattern(), metric)
    out = Path(args.out) if args.out else Path(args.data_dir) / f"cross-{metric.value}.xpdb"
    out.parent.mkdir(parents=True, exist_ok=True)
    pdb.save(out)
    print(f"wrote {out} (metric={metric.value}, max_depth={pdb.max_depth}, "
          f"entries={len(pdb.table)})")
    return 0


def _cmd_graph_build(args: argparse.Namespace) -> int:
    metric = _metric(args.metric)
    pdb = load_or_build_pdb(metric, Path(args.data_dir))
    graph = build_graph(white_cross_pattern(), args.seed, args.samples, pdb,
                        iteration_cap=args.cap)
    out = Path(args.out) if args.out else Path(args.data_dir) / "cross-graph.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_graph(graph, out)
    print(f"wrote {out} (nodes={len(graph.nodes)}, edges={len(graph.edges)}, "
          f"coverage={graph.coverage:.4f} of {graph.sample_size} samples)")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    matrix, labels, gains = simulate_cohort(args.per_cluster, args.noise, args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / "cohort.log"
    scores_path = out_dir / "scores.csv"
    features_path = out_dir / "features.csv"
    write_log(synthesize_log(matrix), log_path)
    save_scores(matrix.student_ids, gains, scores_path)
    matrix.save(features_path)
    print(f"wrote {log_path}")
    print(f"wrote {scores_path}")
    print(f"wrote {features_path}")
    print(f"students: {matrix.n_rows} in 3 planted clusters")
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.log).parent / "reports"
    try:
        summary = run_pipeline(args.log, out_dir, args.scores, kmax=args.kmax,
                               seed=args.seed, draws=args.draws,
                               restarts=args.restarts)
    except LogValidationError as exc:
        print("log failed validation:", file=sys.stderr)
        for violation in exc.violations:
            print(f"  {violation}", file=sys.stderr)
        return 1
    print(f"students: {summary['n_students']}")
    print(f"clusters: k={summary['k']} " + ", ".join(summary["cluster_names"]))
    for name in summary["files"]:
        print(f"wrote {out_dir / name}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(args.data_dir), host=args.host, port=args.port,
                log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubetutor",
        description="White-cross tutoring: solver, subgoal graphs, "
                    "session service, and cohort analytics.")
    parser.add_argument("--data-dir", default=str(default_data_dir()),
                        help="artifact and log directory (env: CUBETUTOR_DATA)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimally solve the white cross")
    p.add_argument("position", nargs="?",
                   help="54-character state string or a move sequence")
    p.add_argument("--seed", type=int, help="scramble seed instead of a position")
    p.add_argument("--length", type=int, default=8, help="scramble length for --seed")
    p.add_argument("--metric", choices=["qtm", "htm"], default="qtm")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("pdb", help="pattern database commands")
    pdb_sub = p.add_subparsers(dest="pdb_command", required=True)
    b = pdb_sub.add_parser("build", help="build and save the cross distance table")
    b.add_argument("--metric", choices=["qtm", "htm"], default="qtm")
    b.add_argument("--out", help="output file (default: data dir)")
    b.set_defaults(func=_cmd_pdb_build)

    p = sub.add_parser("graph", help="subgoal graph commands")
    graph_sub = p.add_subparsers(dest="graph_command", required=True)
    g = graph_sub.add_parser("build", help="synthesize the cross subgoal graph")
    g.add_argument("--samples", type=int, default=300)
    g.add_argument("--seed", type=int, default=7)
    g.add_argument("--cap", type=int, default=64, help="node budget")
    g.add_argument("--metric", choices=["qtm", "htm"], default="qtm")
    g.add_argument("--out", help="output file (default: data dir)")
    g.set_defaults(func=_cmd_graph_build)

    p = sub.add_parser("simulate", help="generate a synthetic cohort log")
    p.add_argument("--per-cluster", type=int, default=20)
    p.add_argument("--noise", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="cohort-out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="run the cohort analysis pipeline")
    p.add_argument("log", help="event log file")
    p.add_argument("--scores", help="student pre/post scores csv")
    p.add_argument("--out-dir", help="report directory (default: <log dir>/reports)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--draws", type=int, default=10_000)
    p.add_argument("--restarts", type=int, default=25)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
