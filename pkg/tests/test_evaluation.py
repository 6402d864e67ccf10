"""Metric oracles, fold splitting, replay evaluation, and ablation."""

from __future__ import annotations

import random

import pytest

from flowrec.corpus import TrainConfig
from flowrec.evaluation import (
    BASELINES,
    baseline_order,
    cross_validate,
    evaluate_recommender,
    kfold_split,
    mean_reciprocal_rank,
    percentile,
    rank_of,
    topk_accuracy,
    _truncate_at_dot,
)
from flowrec.features import FEATURE_NAMES
from flowrec.evaluation import ablate
from flowrec.recommender import Recommender
from collections import Counter


# ---------------------------------------------------------------------------
# metric primitives, checked against independent recomputation


def brute_topk(ranks, k):
    if not ranks:
        return 0.0
    hits = 0
    for r in ranks:
        if r is not None and r <= k:
            hits += 1
    return hits / len(ranks)


def brute_mrr(ranks):
    if not ranks:
        return 0.0
    total = 0.0
    for r in ranks:
        total += 0.0 if r is None else 1.0 / r
    return total / len(ranks)


class TestMetricOracles:
    def test_rank_of(self):
        assert rank_of("b", ["a", "b", "c"]) == 2
        assert rank_of("z", ["a", "b", "c"]) is None
        assert rank_of("a", []) is None

    def test_frozen_mrr_value(self):
        # (1/1 + 1/2 + 1/4) / 3
        assert mean_reciprocal_rank([1, 2, 4]) == pytest.approx(
            0.5833333333333334, abs=1e-9
        )

    def test_empty_inputs(self):
        assert topk_accuracy([], 5) == 0.0
        assert mean_reciprocal_rank([]) == 0.0
        assert percentile([], 95) == 0.0

    def test_agreement_on_randomized_lists(self):
        rng = random.Random(5)
        for _ in range(1000):
            n = rng.randint(0, 30)
            ranks = [
                None if rng.random() < 0.3 else rng.randint(1, 50) for _ in range(n)
            ]
            k = rng.randint(1, 20)
            assert topk_accuracy(ranks, k) == brute_topk(ranks, k)
            assert mean_reciprocal_rank(ranks) == pytest.approx(
                brute_mrr(ranks), abs=1e-12
            )

    def test_percentile_linear_interpolation(self):
        values = [10.0, 20.0, 30.0, 40.0]
        assert percentile(values, 0) == 10.0
        assert percentile(values, 100) == 40.0
        assert percentile(values, 50) == 25.0
        # pos = 0.95 * 3 = 2.85 between 30 and 40
        assert percentile(values, 95) == pytest.approx(38.5)

    def test_percentile_single_value(self):
        assert percentile([7.0], 95) == 7.0


# ---------------------------------------------------------------------------
# truncation


class TestTruncateAtDot:
    SRC = "a = 1\nb = a.\nc = 2\n"

    def test_keeps_text_through_the_dot(self):
        assert _truncate_at_dot(self.SRC, 2, 5) == "a = 1\nb = a."

    def test_rejects_non_dot(self):
        assert _truncate_at_dot(self.SRC, 1, 0) is None

    def test_rejects_out_of_range(self):
        assert _truncate_at_dot(self.SRC, 9, 0) is None
        assert _truncate_at_dot(self.SRC, 2, 99) is None


# ---------------------------------------------------------------------------
# baselines


class TestBaselineOrder:
    def test_alphabetical(self):
        assert baseline_order(["c", "a", "b"], "alphabetical", Counter()) == [
            "a",
            "b",
            "c",
        ]

    def test_frequency_breaks_ties_alphabetically(self):
        freq = Counter({"push": 5, "pop": 5, "peek": 1})
        assert baseline_order(["peek", "push", "pop"], "frequency", freq) == [
            "pop",
            "push",
            "peek",
        ]

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            baseline_order(["a"], "magic", Counter())


# ---------------------------------------------------------------------------
# fold splitting


class TestKfoldSplit:
    FILES = [(f"f{i:02d}.py", "x = 1\n") for i in range(11)]

    def test_partition_covers_everything_once(self):
        folds = kfold_split(self.FILES, 4, seed=2)
        seen = [f for fold in folds for f in fold]
        assert sorted(seen) == sorted(self.FILES)

    def test_balanced_sizes(self):
        folds = kfold_split(self.FILES, 4, seed=2)
        sizes = sorted(len(f) for f in folds)
        assert sizes == [2, 3, 3, 3]

    def test_deterministic_per_seed(self):
        assert kfold_split(self.FILES, 4, seed=2) == kfold_split(self.FILES, 4, seed=2)
        assert kfold_split(self.FILES, 4, seed=2) != kfold_split(self.FILES, 4, seed=3)

    def test_insensitive_to_input_order(self):
        shuffled = list(reversed(self.FILES))
        assert kfold_split(self.FILES, 4, seed=2) == kfold_split(shuffled, 4, seed=2)

    def test_more_folds_than_files_drops_empties(self):
        folds = kfold_split(self.FILES[:3], 10, seed=0)
        assert len(folds) == 3
        assert all(fold for fold in folds)

    def test_rejects_single_fold(self):
        with pytest.raises(ValueError):
            kfold_split(self.FILES, 1, seed=0)


# ---------------------------------------------------------------------------
# replay evaluation


class TestEvaluateRecommender:
    def test_report_on_held_out_file(self, small_bundle, alpha_files):
        rec = Recommender(small_bundle)
        report = evaluate_recommender(rec, alpha_files[:2])
        assert report.n_files == 2
        assert report.n_queries > 0
        assert 0.0 <= report.mrr <= 1.0
        assert set(report.baselines) == set(BASELINES)
        for k in (1, 2, 3, 4, 5, 10):
            assert 0.0 <= report.topk[k] <= 1.0

    def test_topk_monotone_in_k(self, small_bundle, alpha_files):
        rec = Recommender(small_bundle)
        report = evaluate_recommender(rec, alpha_files[:3])
        ks = sorted(report.topk)
        values = [report.topk[k] for k in ks]
        assert values == sorted(values)

    def test_metrics_recomputable_from_queries(self, small_bundle, alpha_files):
        rec = Recommender(small_bundle)
        report = evaluate_recommender(rec, alpha_files[:3])
        ranks = [q.rank for q in report.queries]
        assert report.mrr == pytest.approx(brute_mrr(ranks), abs=1e-12)
        for k, v in report.topk.items():
            assert v == pytest.approx(brute_topk(ranks, k), abs=1e-12)

    def test_max_queries_per_file(self, small_bundle, alpha_files):
        rec = Recommender(small_bundle)
        report = evaluate_recommender(rec, alpha_files[:3], max_queries_per_file=2)
        per_file = Counter(q.file_id for q in report.queries)
        assert all(v <= 2 for v in per_file.values())

    def test_unparsable_test_file_is_skipped(self, small_bundle):
        rec = Recommender(small_bundle)
        report = evaluate_recommender(rec, [("bad.py", "def broken(:::\n")])
        assert report.n_queries == 0
        assert report.skipped == 1

    def test_include_queries_serialization(self, small_bundle, alpha_files):
        rec = Recommender(small_bundle)
        report = evaluate_recommender(rec, alpha_files[:1])
        data = report.to_dict(include_queries=True)
        assert len(data["queries"]) == report.n_queries
        assert {"file", "line", "col", "truth", "rank"} <= set(data["queries"][0])


# ---------------------------------------------------------------------------
# cross validation and ablation (small configs keep these fast)


QUICK = TrainConfig(n_trees=8, max_depth=6, seed=5)


class TestCrossValidate:
    def test_fold_reports_aggregate(self, alpha_files):
        report = cross_validate(alpha_files[:6], folds=3, config=QUICK)
        assert report.folds == 3
        total = sum(r.n_queries for r in report.per_fold)
        assert report.overall.n_queries == total
        data = report.to_dict()
        assert set(data) == {"folds", "overall", "per_fold"}

    def test_every_file_tested_exactly_once(self, alpha_files):
        files = alpha_files[:6]
        report = cross_validate(files, folds=3, config=QUICK)
        tested = {q.file_id for q in report.overall.queries}
        assert tested == {f for f, _ in files}


class TestAblate:
    def test_structure_and_seed_coverage(self, alpha_files):
        seeds = (0, 1, 2)
        report = ablate(
            alpha_files[:6],
            feature_names=list(FEATURE_NAMES),
            seeds=seeds,
            config=QUICK,
        )
        assert report.seeds == list(seeds)
        assert set(report.deltas) == set(FEATURE_NAMES)
        for name in FEATURE_NAMES:
            assert set(report.ablated[name]) == set(seeds)
            assert {"top1", "top10", "mrr"} <= set(report.deltas[name])
        data = report.to_dict()
        assert set(data) == {"seeds", "full", "ablated", "deltas"}

    def test_requires_four_names(self, alpha_files):
        with pytest.raises(ValueError):
            ablate(alpha_files[:4], feature_names=["only", "three", "names"])
