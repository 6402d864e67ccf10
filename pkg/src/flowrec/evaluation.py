"""Offline evaluation: replay mined call sites as recommendation queries.

Every method call in a held-out file becomes one query: the file is
truncated at the call's dot, the recommender runs on the truncated text,
and the actually-written method name is the ground truth.  Reported
metrics are top-k accuracy, mean reciprocal rank (a missing truth counts
as 0), candidate containment, and per-query latency.  Two training-free
baselines rank the same candidate sets alphabetically and by global usage
frequency.
"""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass, field
from random import Random
from typing import Optional, Sequence

from .corpus import ModelBundle, TrainConfig, mine_file, train_corpus
from .errors import EmptyCandidates, EmptyCorpus, FlowrecError, ParseError
from .recommender import FULL_MASK, Recommender

DEFAULT_KS = (1, 2, 3, 4, 5, 10)

BASELINES = ("alphabetical", "frequency")


# ---------------------------------------------------------------------------
# metrics


def rank_of(truth: str, ordered_names: Sequence[str]) -> Optional[int]:
    """1-based rank of truth in a ranking, None when absent."""

    for i, name in enumerate(ordered_names, 1):
        if name == truth:
            return i
    return None


def topk_accuracy(ranks: Sequence[Optional[int]], k: int) -> float:
    """Share of queries whose truth ranked within the first k."""

    if not ranks:
        return 0.0
    hits = sum(1 for r in ranks if r is not None and r <= k)
    return hits / len(ranks)


def mean_reciprocal_rank(ranks: Sequence[Optional[int]]) -> float:
    """Mean of 1/rank; queries whose truth never appeared contribute 0."""

    if not ranks:
        return 0.0
    return sum((1.0 / r) if r is not None else 0.0 for r in ranks) / len(ranks)


def percentile(values: Sequence[float], q: float) -> float:
    """Linear-interpolation percentile (q in [0, 100]) of a sample."""

    if not values:
        return 0.0
    ordered = sorted(values)
    if len(ordered) == 1:
        return ordered[0]
    pos = (q / 100.0) * (len(ordered) - 1)
    lo = int(pos)
    hi = min(lo + 1, len(ordered) - 1)
    frac = pos - lo
    return ordered[lo] * (1 - frac) + ordered[hi] * frac


# ---------------------------------------------------------------------------
# query replay


@dataclass
class QueryRecord:
    file_id: str
    line: int
    col: int
    truth: str
    rank: Optional[int]
    n_candidates: int
    contained: bool
    latency_ms: float
    baseline_ranks: dict[str, Optional[int]] = field(default_factory=dict)


@dataclass
class EvalReport:
    n_files: int
    n_queries: int
    skipped: int
    topk: dict[int, float]
    mrr: float
    containment: float
    latency_median_ms: float
    latency_p95_ms: float
    baselines: dict[str, dict]
    queries: list[QueryRecord] = field(default_factory=list)

    def to_dict(self, include_queries: bool = False) -> dict:
        out = {
            "files": self.n_files,
            "queries": self.n_queries,
            "skipped": self.skipped,
            "topk": {str(k): round(v, 4) for k, v in sorted(self.topk.items())},
            "mrr": round(self.mrr, 4),
            "containment": round(self.containment, 4),
            "latency_median_ms": round(self.latency_median_ms, 2),
            "latency_p95_ms": round(self.latency_p95_ms, 2),
            "baselines": {
                name: {
                    "topk": {str(k): round(v, 4) for k, v in sorted(m["topk"].items())},
                    "mrr": round(m["mrr"], 4),
                }
                for name, m in self.baselines.items()
            },
        }
        if include_queries:
            out["queries"] = [
                {
                    "file": q.file_id,
                    "line": q.line,
                    "col": q.col,
                    "truth": q.truth,
                    "rank": q.rank,
                    "candidates": q.n_candidates,
                    "contained": q.contained,
                    "latency_ms": round(q.latency_ms, 2),
                }
                for q in self.queries
            ]
        return out


def _truncate_at_dot(text: str, line: int, col: int) -> Optional[str]:
    lines = text.splitlines(keepends=True)
    if line < 1 or line > len(lines):
        return None
    row = lines[line - 1]
    if col >= len(row) or row[col] != ".":
        return None
    return "".join(lines[: line - 1]) + row[: col + 1]


def baseline_order(names: Sequence[str], mode: str, frequency: Counter) -> list[str]:
    if mode == "alphabetical":
        return sorted(names)
    if mode == "frequency":
        return sorted(names, key=lambda n: (-frequency[n], n))
    raise ValueError(f"unknown baseline {mode!r}")


def evaluate_recommender(
    recommender: Recommender,
    test_files: Sequence[tuple[str, str]],
    ks: Sequence[int] = DEFAULT_KS,
    mask: Sequence[bool] = FULL_MASK,
    max_queries_per_file: Optional[int] = None,
    with_baselines: bool = True,
) -> EvalReport:
    """Replay every call site in ``test_files`` through the recommender."""

    queries: list[QueryRecord] = []
    skipped = 0
    frequency = recommender.bundle.api_frequency
    for file_id, text in test_files:
        try:
            mined = mine_file(file_id, text, window=recommender.bundle.config.window)
        except ParseError:
            skipped += 1
            continue
        points = mined.points
        if max_queries_per_file is not None:
            points = points[:max_queries_per_file]
        for pt in points:
            prefix = _truncate_at_dot(text, pt.line, pt.col)
            if prefix is None:
                skipped += 1
                continue
            try:
                result = recommender.recommend(
                    prefix, pt.line, pt.col, file_id=file_id, k=None, mask=mask
                )
            except FlowrecError:
                skipped += 1
                continue
            names = [r.name for r in result.items]
            record = QueryRecord(
                file_id=file_id,
                line=pt.line,
                col=pt.col,
                truth=pt.api,
                rank=rank_of(pt.api, names),
                n_candidates=len(result.candidate_names),
                contained=pt.api in result.candidate_names,
                latency_ms=result.total_ms,
            )
            if with_baselines:
                for mode in BASELINES:
                    ordered = baseline_order(result.candidate_names, mode, frequency)
                    record.baseline_ranks[mode] = rank_of(pt.api, ordered)
            queries.append(record)

    ranks = [q.rank for q in queries]
    latencies = [q.latency_ms for q in queries]
    baselines = {}
    if with_baselines:
        for mode in BASELINES:
            b_ranks = [q.baseline_ranks.get(mode) for q in queries]
            baselines[mode] = {
                "topk": {k: topk_accuracy(b_ranks, k) for k in ks},
                "mrr": mean_reciprocal_rank(b_ranks),
            }
    return EvalReport(
        n_files=len(test_files),
        n_queries=len(queries),
        skipped=skipped,
        topk={k: topk_accuracy(ranks, k) for k in ks},
        mrr=mean_reciprocal_rank(ranks),
        containment=(
            sum(1 for q in queries if q.contained) / len(queries) if queries else 0.0
        ),
        latency_median_ms=statistics.median(latencies) if latencies else 0.0,
        latency_p95_ms=percentile(latencies, 95),
        baselines=baselines,
        queries=queries,
    )


# ---------------------------------------------------------------------------
# cross validation


def kfold_split(
    files: Sequence[tuple[str, str]], folds: int, seed: int = 0
) -> list[list[tuple[str, str]]]:
    """Deterministic file-level folds: seeded shuffle, round-robin deal."""

    if folds < 2:
        raise ValueError("need at least 2 folds")
    items = sorted(files, key=lambda f: f[0])
    Random(seed).shuffle(items)
    out: list[list[tuple[str, str]]] = [[] for _ in range(folds)]
    for i, item in enumerate(items):
        out[i % folds].append(item)
    return [fold for fold in out if fold]


@dataclass
class CrossValReport:
    folds: int
    overall: EvalReport
    per_fold: list[EvalReport]

    def to_dict(self) -> dict:
        return {
            "folds": self.folds,
            "overall": self.overall.to_dict(),
            "per_fold": [r.to_dict() for r in self.per_fold],
        }


def cross_validate(
    files: Sequence[tuple[str, str]],
    folds: int = 10,
    config: Optional[TrainConfig] = None,
    ks: Sequence[int] = DEFAULT_KS,
    stdlib_index: Optional[dict] = None,
) -> CrossValReport:
    """k-fold evaluation with file-level splits inside one project."""

    config = config or TrainConfig()
    parts = kfold_split(files, folds, seed=config.seed)
    per_fold: list[EvalReport] = []
    all_queries: list[QueryRecord] = []
    skipped = 0
    for i, test_fold in enumerate(parts):
        train_files = [f for j, part in enumerate(parts) if j != i for f in part]
        try:
            bundle = train_corpus(train_files, config, stdlib_index=stdlib_index)
        except (EmptyCorpus, EmptyCandidates):
            skipped += len(test_fold)
            continue
        rec = Recommender(bundle, stdlib_index=stdlib_index)
        report = evaluate_recommender(rec, test_fold, ks=ks)
        per_fold.append(report)
        all_queries.extend(report.queries)
        skipped += report.skipped

    ranks = [q.rank for q in all_queries]
    latencies = [q.latency_ms for q in all_queries]
    baselines = {}
    for mode in BASELINES:
        b_ranks = [q.baseline_ranks.get(mode) for q in all_queries]
        baselines[mode] = {
            "topk": {k: topk_accuracy(b_ranks, k) for k in ks},
            "mrr": mean_reciprocal_rank(b_ranks),
        }
    overall = EvalReport(
        n_files=len(files),
        n_queries=len(all_queries),
        skipped=skipped,
        topk={k: topk_accuracy(ranks, k) for k in ks},
        mrr=mean_reciprocal_rank(ranks),
        containment=(
            sum(1 for q in all_queries if q.contained) / len(all_queries)
            if all_queries
            else 0.0
        ),
        latency_median_ms=statistics.median(latencies) if latencies else 0.0,
        latency_p95_ms=percentile(latencies, 95),
        baselines=baselines,
        queries=all_queries,
    )
    return CrossValReport(folds=len(parts), overall=overall, per_fold=per_fold)


# ---------------------------------------------------------------------------
# ablation


@dataclass
class AblationReport:
    seeds: list[int]
    full: dict[int, dict]  # seed -> metrics
    ablated: dict[str, dict[int, dict]]  # feature -> seed -> metrics
    deltas: dict[str, dict[str, float]]  # feature -> metric -> mean delta

    def to_dict(self) -> dict:
        return {
            "seeds": self.seeds,
            "full": {str(s): m for s, m in self.full.items()},
            "ablated": {
                f: {str(s): m for s, m in per_seed.items()}
                for f, per_seed in self.ablated.items()
            },
            "deltas": {
                f: {m: round(v, 4) for m, v in metrics.items()}
                for f, metrics in self.deltas.items()
            },
        }


def _metrics_of(report: EvalReport, ks: Sequence[int]) -> dict:
    out = {f"top{k}": report.topk[k] for k in ks}
    out["mrr"] = report.mrr
    return out


def ablate(
    files: Sequence[tuple[str, str]],
    feature_names: Sequence[str],
    seeds: Sequence[int] = (0, 1, 2),
    config: Optional[TrainConfig] = None,
    ks: Sequence[int] = (1, 10),
    test_fraction: float = 0.2,
    stdlib_index: Optional[dict] = None,
) -> AblationReport:
    """Zero one feature at a time (train and test) and measure the drop.

    For each seed the file list is reshuffled into a train/test split, the
    full model and one model per disabled feature are trained on identical
    splits, and the per-feature delta is full minus ablated, averaged over
    seeds.  Positive deltas mean the feature helps.
    """

    if len(feature_names) != 4:
        raise ValueError("expected exactly four feature names")
    config = config or TrainConfig()
    full_metrics: dict[int, dict] = {}
    ablated: dict[str, dict[int, dict]] = {name: {} for name in feature_names}
    for seed in seeds:
        items = sorted(files, key=lambda f: f[0])
        Random(seed).shuffle(items)
        n_test = max(1, int(len(items) * test_fraction))
        test_files = items[:n_test]
        train_files = items[n_test:]
        base_cfg = TrainConfig(
            window=config.window,
            ngram_order=config.ngram_order,
            negative_cap=config.negative_cap,
            n_trees=config.n_trees,
            max_depth=config.max_depth,
            max_features=config.max_features,
            seed=seed,
        )
        bundle = train_corpus(train_files, base_cfg, stdlib_index=stdlib_index)
        rec = Recommender(bundle, stdlib_index=stdlib_index)
        full_metrics[seed] = _metrics_of(
            evaluate_recommender(rec, test_files, ks=ks, with_baselines=False), ks
        )
        for i, name in enumerate(feature_names):
            mask = tuple(j != i for j in range(4))
            cfg = TrainConfig(
                window=config.window,
                ngram_order=config.ngram_order,
                negative_cap=config.negative_cap,
                n_trees=config.n_trees,
                max_depth=config.max_depth,
                max_features=config.max_features,
                seed=seed,
                feature_mask=mask,
            )
            a_bundle = train_corpus(train_files, cfg, stdlib_index=stdlib_index)
            a_rec = Recommender(a_bundle, stdlib_index=stdlib_index)
            ablated[name][seed] = _metrics_of(
                evaluate_recommender(
                    a_rec, test_files, ks=ks, mask=mask, with_baselines=False
                ),
                ks,
            )

    deltas: dict[str, dict[str, float]] = {}
    metric_keys = [f"top{k}" for k in ks] + ["mrr"]
    for name in feature_names:
        deltas[name] = {}
        for key in metric_keys:
            diffs = [
                full_metrics[s][key] - ablated[name][s][key] for s in seeds
            ]
            deltas[name][key] = sum(diffs) / len(diffs)
    return AblationReport(
        seeds=list(seeds), full=full_metrics, ablated=ablated, deltas=deltas
    )
