"""Command-line entry point: ``magic-cd <command> [options]``.

Every option may also come from a flat ``key = value`` file given with
``--config``; options on the command line win.  Keys use the long option
name with dashes or underscores (``max-sweeps = 100``).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .analytics import community_jaccard_study, ic_ec_scores, interaction_edge_ratio
from .exceptions import MagicError
from .graph import Directedness, NodeKind, classify_temporality
from .metrics import evaluate
from .model import FitConfig, Mode, choose_K, fit, sample_network
from .model.sampling import planted_network
from .projection import DEFAULT_STOPWORDS, ProjectionConfig, project

log = logging.getLogger("magic_cd")

METRICS_HEADER = ("metric", "value")
ANALYTICS_HEADER = ("community", "size", "IC", "EC", "IR", "jaccard_mean", "baseline_mean")


def _network_args(p, truth=False):
    p.add_argument("--nodes", required=True, type=Path, help="nodes TSV file")
    p.add_argument("--edges", required=True, type=Path, help="edges TSV file")
    p.add_argument("--undirected", action="store_true", help="read edges as unordered pairs")
    if truth:
        p.add_argument("--truth", required=True, type=Path, help="ground-truth communities TSV")


def _projection_args(p):
    p.add_argument("--no-lowercase", action="store_true")
    p.add_argument("--stopwords", type=Path, help="file with one stopword per line")
    p.add_argument("--min-df", type=int, default=2)
    p.add_argument("--max-df-ratio", type=float, default=0.5)


def _fit_args(p):
    p.add_argument("--mode", choices=[m.value for m in Mode], default="net")
    p.add_argument("--max-sweeps", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--step-init", type=float, default=1.0)
    p.add_argument("--shrink", type=float, default=0.5)
    p.add_argument("--armijo", type=float, default=1e-4)
    p.add_argument("--max-backtracks", type=int, default=10)
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--strict", action="store_true", help="refuse complex networks in timed modes")
    _projection_args(p)


def _seed(p):
    p.add_argument("--seed", type=int, default=0, help="64-bit seed for every random step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magic-cd", description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, help="flat key=value file of option defaults")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network and report its temporality")
    _network_args(p)

    p = sub.add_parser("project", help="add word nodes and word->document edges")
    _network_args(p)
    _projection_args(p)
    p.add_argument("--out-dir", required=True, type=Path)

    p = sub.add_parser("fit", help="fit the model and write a model file")
    _network_args(p)
    _fit_args(p)
    _seed(p)
    p.add_argument("-k", "--k", type=int, required=True, help="number of communities")
    p.add_argument("--out-dir", required=True, type=Path)

    p = sub.add_parser("communities", help="threshold a fitted model into communities")
    p.add_argument("--model", required=True, type=Path)
    p.add_argument("--out-dir", required=True, type=Path)

    p = sub.add_parser("eval", help="score detected communities against ground truth")
    _network_args(p, truth=True)
    p.add_argument("--communities", required=True, type=Path, help="detected communities TSV")
    p.add_argument("--out-dir", type=Path)

    p = sub.add_parser("analyze", help="IC/EC/IR and text-similarity statistics per community")
    _network_args(p, truth=True)
    p.add_argument("--max-pairs", type=int, default=100_000)
    _seed(p)
    p.add_argument("--out-dir", type=Path)

    p = sub.add_parser("choose-k", help="pick K by held-out link prediction")
    _network_args(p)
    _fit_args(p)
    _seed(p)
    p.add_argument("--candidates", required=True, help="comma-separated K values")
    p.add_argument("--holdout", type=float, default=0.2)

    p = sub.add_parser("sample", help="draw a network from a model or a planted partition")
    _seed(p)
    p.add_argument("--model", type=Path, help="model file to sample from")
    p.add_argument("--nodes", type=Path, help="nodes TSV giving timestamps (with --model)")
    p.add_argument("--planted", help="N,K for equal disjoint blocks")
    p.add_argument("--p-in", type=float, default=0.15)
    p.add_argument("--p-out", type=float, default=0.01)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="net")
    p.add_argument("--vocab-size", type=int, default=0, help="private words per block")
    p.add_argument("--out-dir", required=True, type=Path)
    return parser


def read_config(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise io.ParseError(lineno, "expected key = value", path)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(parser, argv):
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    first, rest = pre.parse_known_args(argv)
    command = next((a for a in rest if a in COMMANDS), None)
    if not first.config or command is None:
        return parser.parse_args(argv)
    values = read_config(first.config)
    subparser = parser._subparsers._group_actions[0].choices[command]
    defaults = {}
    for action in subparser._actions:
        if action.dest in values:
            raw = values.pop(action.dest)
            if action.nargs == 0:
                defaults[action.dest] = raw.lower() in ("1", "true", "yes", "on")
            else:
                defaults[action.dest] = action.type(raw) if action.type else raw
            action.required = False
    if values:
        log.warning("ignoring config keys not used by %s: %s", command, ", ".join(sorted(values)))
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _directedness(args):
    return Directedness.UNDIRECTED if args.undirected else Directedness.DIRECTED


def _load(args, truth=False):
    files = io.NetworkFileSet(args.nodes, args.edges, getattr(args, "truth", None) if truth else None)
    return io.parse_network(files, _directedness(args))


def _projection_config(args) -> ProjectionConfig:
    stop = DEFAULT_STOPWORDS
    if args.stopwords:
        stop = frozenset(args.stopwords.read_text(encoding="utf-8").split())
    return ProjectionConfig(lowercase=not args.no_lowercase, stopwords=stop,
                            min_df=args.min_df, max_df_ratio=args.max_df_ratio)


def _fit_config(args, K) -> FitConfig:
    return FitConfig(K=K, mode=Mode(args.mode), max_sweeps=args.max_sweeps, tol=args.tol,
                     step_init=args.step_init, shrink=args.shrink, armijo=args.armijo,
                     max_backtracks=args.max_backtracks, eps=args.eps, seed=args.seed,
                     strict=args.strict)


def _prepare(net, args):
    """Project the network first when fitting in ``all`` mode without word nodes."""
    if Mode(args.mode) is Mode.ALL and not net.word_mask.any():
        net = project(net, _projection_config(args))
        log.info("projected: %d nodes, %d edges", net.n_nodes, net.n_edges)
    return net


def cmd_validate(args):
    net, _ = _load(args)
    print(f"nodes\t{net.n_nodes}\nedges\t{net.n_edges}")
    if not net.directed:
        print("undirected")
        return 0
    report = classify_temporality(net)
    print(report.kind.value)
    for a, b in report.violations[:20]:
        print(f"violation\t{a}\t{b}")
    if len(report.violations) > 20:
        print(f"... {len(report.violations) - 20} more violations")
    return 0


def cmd_project(args):
    net, _ = _load(args)
    projected = project(net, _projection_config(args))
    io.write_network(projected, args.out_dir / "nodes.tsv", args.out_dir / "edges.tsv")
    print(f"word nodes\t{int(projected.word_mask.sum())}")
    print(f"word edges\t{projected.n_edges - net.n_edges}")
    return 0


def cmd_fit(args):
    net, _ = _load(args)
    net = _prepare(net, args)
    model = fit(net, _fit_config(args, args.k))
    io.save_model(args.out_dir / "model.txt", model)
    print(f"loglik\t{model.log_likelihood:.6f}")
    print(f"sweeps\t{model.n_sweeps}")
    print(f"converged\t{int(model.converged)}")
    return 0


def cmd_communities(args):
    model = io.load_model(args.model)
    cover = model.cover()
    io.write_communities(cover, args.out_dir / "communities.tsv")
    if cover.words is not None:
        io.write_communities(cover, args.out_dir / "word_communities.tsv", which="words")
    sizes = [len(c) for c in cover.communities]
    print(f"communities\t{len(sizes)}\nnonempty\t{sum(1 for s in sizes if s)}")
    return 0


def cmd_eval(args):
    net, truth = _load(args, truth=True)
    docs = [node.id for node in net.nodes if node.kind is NodeKind.DOCUMENT]
    detected = io.read_communities(args.communities, net.ids).restrict(docs)
    report = evaluate(net, detected, truth)
    rows = report.rows()
    print("\t".join(METRICS_HEADER))
    for name, value in rows:
        print(f"{name}\t{value:.10g}")
    if args.out_dir:
        io.write_table(args.out_dir / "metrics.tsv", METRICS_HEADER, rows)
    return 0


def cmd_analyze(args):
    net, truth = _load(args, truth=True)
    scores = ic_ec_scores(net, truth)
    jac = community_jaccard_study(net, truth, args.max_pairs, args.seed)
    rows = [(name, row.size, ic, ec, ir, row.mean, row.baseline)
            for name, ic, ec, ir, row in zip(scores.names, scores.IC.tolist(), scores.EC.tolist(),
                                             scores.IR.tolist(), jac)]
    print(f"interaction_edge_ratio\t{interaction_edge_ratio(net, truth):.10g}")
    print("\t".join(ANALYTICS_HEADER))
    for row in rows:
        print("\t".join(io._cell(v) for v in row))
    if args.out_dir:
        io.write_table(args.out_dir / "analytics.tsv", ANALYTICS_HEADER, rows)
    return 0


def cmd_choose_k(args):
    try:
        candidates = [int(k) for k in args.candidates.split(",") if k.strip()]
    except ValueError:
        raise SystemExit(_usage_error(f"bad --candidates {args.candidates!r}"))
    net, _ = _load(args)
    net = _prepare(net, args)
    K, scores = choose_K(net, candidates, args.holdout, args.seed,
                         _fit_config(args, candidates[0]), return_scores=True)
    for k in sorted(scores):
        print(f"auc\t{k}\t{scores[k]:.6f}", file=sys.stderr)
    print(K)
    return 0


def cmd_sample(args):
    out = args.out_dir
    if args.planted:
        try:
            n, k = (int(v) for v in args.planted.split(","))
        except ValueError:
            raise SystemExit(_usage_error("--planted expects N,K"))
        net, truth, _, _ = planted_network(n, k, args.p_in, args.p_out, Mode(args.mode),
                                           args.seed, vocab_size=args.vocab_size)
        io.write_communities(truth, out / "truth.tsv")
    elif args.model and args.nodes:
        model = io.load_model(args.model)
        nodes = {node.id: node for node in io.read_nodes(args.nodes)}
        missing = [i for i in model.node_ids if i not in nodes]
        if missing:
            raise io.UnknownEndpoint(missing[0])
        ts = [nodes[i].timestamp for i in model.node_ids]
        tokens = [nodes[i].tokens for i in model.node_ids]
        net = sample_network(model.F, model.eta, ts, Mode(args.mode), args.seed,
                             ids=model.node_ids, tokens=tokens)
    else:
        raise SystemExit(_usage_error("sample needs --planted N,K or both --model and --nodes"))
    io.write_network(net, out / "nodes.tsv", out / "edges.tsv")
    print(f"nodes\t{net.n_nodes}\nedges\t{net.n_edges}")
    return 0


def _usage_error(msg):
    print(f"magic-cd: error: {msg}", file=sys.stderr)
    return 2


COMMANDS = {
    "validate": cmd_validate, "project": cmd_project, "fit": cmd_fit,
    "communities": cmd_communities, "eval": cmd_eval, "analyze": cmd_analyze,
    "choose-k": cmd_choose_k, "sample": cmd_sample,
}


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, MagicError) as err:
        print(f"magic-cd: {err}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(over="ignore")
    try:
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (MagicError, OSError, ValueError) as err:
        print(f"magic-cd: {err}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
