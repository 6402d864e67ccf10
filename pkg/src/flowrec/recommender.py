"""End-to-end recommendation: from source text and cursor to ranked names.

The pipeline is parse -> flow -> candidates -> features -> rank.  Each
stage's wall time is reported per call so latency regressions can be
attributed.  A recommendation degrades instead of failing when the flow
analysis comes up empty (token features still apply); it raises only for
the documented error conditions (unparseable context, no candidates).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .candidates import Candidate, collect_candidates, load_stdlib_index
from .corpus import ModelBundle
from .dataflow import analyze_context, hole_paths
from .errors import EmptyFlow
from .features import PointContext, bag_pairs, render_paths
from .frontend import collect_token_bag, locate_point, parse_context

DEFAULT_TOP_K = 10

FULL_MASK = (True, True, True, True)


@dataclass(frozen=True)
class Recommendation:
    rank: int
    name: str
    score: float
    source: str
    detail: str


@dataclass
class RecommendationResult:
    file_id: str
    line: int
    column: int
    receiver_expr: str
    receiver: Optional[str]
    flow_path: list[str]
    items: list[Recommendation]
    candidate_names: list[str]
    timings_ms: dict[str, float] = field(default_factory=dict)

    @property
    def total_ms(self) -> float:
        return sum(self.timings_ms.values())

    def to_dict(self) -> dict:
        return {
            "file": self.file_id,
            "line": self.line,
            "column": self.column,
            "receiver": self.receiver_expr,
            "flow_path": self.flow_path,
            "recommendations": [
                {
                    "rank": r.rank,
                    "name": r.name,
                    "score": round(r.score, 6),
                    "source": r.source,
                    "detail": r.detail,
                }
                for r in self.items
            ],
            "candidates": len(self.candidate_names),
            "timings_ms": {k: round(v, 3) for k, v in self.timings_ms.items()},
        }


class Recommender:
    """Serves ranked API names from a trained model bundle."""

    def __init__(
        self,
        bundle: ModelBundle,
        stdlib_index: Optional[dict] = None,
        inference=None,
    ):
        self.bundle = bundle
        self.stdlib_index = (
            stdlib_index if stdlib_index is not None else load_stdlib_index()
        )
        self.inference = inference
        self._extractor = bundle.extractor()

    def recommend(
        self,
        text: str,
        line: int,
        column: int,
        file_id: str = "<memory>",
        k: Optional[int] = DEFAULT_TOP_K,
        mask: Sequence[bool] = FULL_MASK,
    ) -> RecommendationResult:
        """Rank candidate APIs for the dot at (line, column) in ``text``."""

        timings: dict[str, float] = {}
        t0 = time.perf_counter()
        point = locate_point(text, line, column, file_id)
        ctx = parse_context(text, point, window=self.bundle.config.window)
        t1 = time.perf_counter()
        timings["parse"] = (t1 - t0) * 1000.0

        flow = analyze_context(ctx)
        try:
            paths = render_paths(hole_paths(ctx, flow))
        except EmptyFlow:
            paths = []
        bag = bag_pairs(collect_token_bag(ctx, point, self.bundle.config.window))
        t2 = time.perf_counter()
        timings["flow"] = (t2 - t1) * 1000.0

        cands = collect_candidates(
            ctx,
            point,
            project_index=self.bundle.project_index,
            stdlib_index=self.stdlib_index,
            inference=self.inference,
        )
        names = [c.name for c in cands]
        by_name = {c.name: c for c in cands}
        t3 = time.perf_counter()
        timings["candidates"] = (t3 - t2) * 1000.0

        receiver = ctx.receiver.name if ctx.receiver is not None else None
        point_ctx = PointContext(
            receiver=receiver,
            hole_paths=paths,
            bag=bag,
            field_mask=tuple(mask),
        )
        X = self._extractor.matrix(point_ctx, names)
        t4 = time.perf_counter()
        timings["features"] = (t4 - t3) * 1000.0

        scores = self.bundle.forest.predict_proba(X)
        order = sorted(range(len(names)), key=lambda i: (-scores[i], names[i]))
        if k is not None and k > 0:
            order = order[:k]
        items = [
            Recommendation(
                rank=pos + 1,
                name=names[i],
                score=float(scores[i]),
                source=by_name[names[i]].source,
                detail=by_name[names[i]].detail,
            )
            for pos, i in enumerate(order)
        ]
        t5 = time.perf_counter()
        timings["rank"] = (t5 - t4) * 1000.0

        best_path = list(paths[0][:-1]) if paths else []
        return RecommendationResult(
            file_id=file_id,
            line=line,
            column=column,
            receiver_expr=point.receiver_expr,
            receiver=receiver,
            flow_path=best_path,
            items=items,
            candidate_names=names,
            timings_ms=timings,
        )

    def rank_all(
        self,
        text: str,
        line: int,
        column: int,
        file_id: str = "<memory>",
        mask: Sequence[bool] = FULL_MASK,
    ) -> RecommendationResult:
        """Full ranking over every candidate (k unlimited)."""

        return self.recommend(text, line, column, file_id, k=None, mask=mask)
