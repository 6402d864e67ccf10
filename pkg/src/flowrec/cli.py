"""Command-line interface.

Verbs:

* ``train``      mine a corpus and write a model bundle
* ``recommend``  rank API names for a cursor position in a file
* ``evaluate``   k-fold replay evaluation over a corpus
* ``dataflow dump``   print the extracted flow edges of a file
* ``dataflow score``  compare extracted edges against a labeled edge file
* ``ablate``     per-feature contribution study over a corpus

All machine outputs are JSON on stdout; errors go to stderr with the
pipeline stage that raised them, and the exit code is 1 for expected
failures (bad input, empty corpus) and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    TrainConfig,
    load_bundle,
    read_corpus_paths,
    save_bundle,
    train_corpus,
)
from .dataflow import analyze_context, edges_for_dump, score_edge_sets
from .errors import FlowrecError
from .evaluation import ablate, cross_validate
from .features import FEATURE_NAMES
from .frontend import locate_point, parse_context, parse_source
from .recommender import DEFAULT_TOP_K, Recommender


def _add_train(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("train", help="mine a corpus and write a model bundle")
    p.add_argument("corpus", nargs="+", help="python files or directories")
    p.add_argument("-o", "--out", required=True, help="bundle output path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=int, default=TrainConfig.window)
    p.add_argument("--negative-cap", type=int, default=TrainConfig.negative_cap)
    p.add_argument("--trees", type=int, default=TrainConfig.n_trees)
    p.add_argument("--depth", type=int, default=TrainConfig.max_depth)
    p.set_defaults(func=_cmd_train)


def _cmd_train(args: argparse.Namespace) -> int:
    files = read_corpus_paths(args.corpus)
    config = TrainConfig(
        window=args.window,
        negative_cap=args.negative_cap,
        n_trees=args.trees,
        max_depth=args.depth,
        seed=args.seed,
    )
    bundle = train_corpus(files, config)
    save_bundle(bundle, args.out)
    print(
        json.dumps(
            {
                "bundle": args.out,
                "files": bundle.trained_files,
                "training_rows": bundle.training_rows,
                "vocabulary": bundle.ngram.vocab_size,
                "apis": len(bundle.api_frequency),
            }
        )
    )
    return 0


def _add_recommend(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("recommend", help="rank API names at file:line:col")
    p.add_argument("--bundle", required=True)
    p.add_argument("--file", required=True, help="source file containing the point")
    p.add_argument("--line", type=int, required=True, help="1-based line of the dot")
    p.add_argument("--col", type=int, required=True, help="0-based column of the dot")
    p.add_argument("-k", type=int, default=DEFAULT_TOP_K)
    p.add_argument("--json", action="store_true", help="emit the full JSON result")
    p.set_defaults(func=_cmd_recommend)


def _cmd_recommend(args: argparse.Namespace) -> int:
    bundle = load_bundle(args.bundle)
    text = Path(args.file).read_text()
    rec = Recommender(bundle)
    result = rec.recommend(text, args.line, args.col, file_id=args.file, k=args.k)
    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
    else:
        for item in result.items:
            print(f"{item.rank:>3}. {item.name}  ({item.score:.4f}, {item.source})")
    return 0


def _add_evaluate(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("evaluate", help="k-fold replay evaluation over a corpus")
    p.add_argument("corpus", nargs="+", help="python files or directories")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--queries", action="store_true", help="include per-query records")
    p.set_defaults(func=_cmd_evaluate)


def _cmd_evaluate(args: argparse.Namespace) -> int:
    files = read_corpus_paths(args.corpus)
    config = TrainConfig(seed=args.seed)
    report = cross_validate(files, folds=args.folds, config=config)
    out = report.to_dict()
    if args.queries:
        out["overall"] = report.overall.to_dict(include_queries=True)
    print(json.dumps(out, indent=2))
    return 0


def _add_dataflow(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("dataflow", help="inspect or score the flow extraction")
    inner = p.add_subparsers(dest="dataflow_cmd", required=True)

    dump = inner.add_parser("dump", help="print extracted flow edges as JSON")
    dump.add_argument("--file", required=True)
    dump.add_argument(
        "--point",
        help="LINE:COL of a dot to analyze the prefix instead of the whole file",
    )
    dump.set_defaults(func=_cmd_dataflow_dump)

    score = inner.add_parser("score", help="precision/recall against labeled edges")
    score.add_argument("--file", required=True)
    score.add_argument("--labels", required=True, help="JSON array or JSONL of edges")
    score.set_defaults(func=_cmd_dataflow_score)


def _context_for(args: argparse.Namespace):
    text = Path(args.file).read_text()
    if getattr(args, "point", None):
        line_s, _, col_s = args.point.partition(":")
        point = locate_point(text, int(line_s), int(col_s), args.file)
        return parse_context(text, point)
    return parse_source(text, args.file)


def _cmd_dataflow_dump(args: argparse.Namespace) -> int:
    ctx = _context_for(args)
    result = analyze_context(ctx)
    print(json.dumps(edges_for_dump(result), indent=2))
    return 0


def _read_labeled_edges(path: str) -> list[dict]:
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("["):
        return json.loads(text)
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def _cmd_dataflow_score(args: argparse.Namespace) -> int:
    ctx = _context_for(args)
    result = analyze_context(ctx)
    expected = [(e["src"], e["dst"]) for e in _read_labeled_edges(args.labels)]
    pr = score_edge_sets(result.edge_pairs(), expected)
    print(
        json.dumps(
            {
                "file": args.file,
                "precision": round(pr.precision, 4),
                "recall": round(pr.recall, 4),
                "f1": round(pr.f1, 4),
                "tp": pr.tp,
                "fp": pr.fp,
                "fn": pr.fn,
            }
        )
    )
    return 0


def _add_ablate(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("ablate", help="per-feature contribution over a corpus")
    p.add_argument("corpus", nargs="+", help="python files or directories")
    p.add_argument(
        "--seeds", default="0,1,2", help="comma-separated list of split seeds"
    )
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.set_defaults(func=_cmd_ablate)


def _cmd_ablate(args: argparse.Namespace) -> int:
    files = read_corpus_paths(args.corpus)
    seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    report = ablate(
        files,
        feature_names=list(FEATURE_NAMES),
        seeds=seeds,
        test_fraction=args.test_fraction,
    )
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowrec",
        description="API method recommendation from data-flow and token features",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_train(sub)
    _add_recommend(sub)
    _add_evaluate(sub)
    _add_dataflow(sub)
    _add_ablate(sub)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FlowrecError as exc:
        print(f"error [{exc.stage}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
