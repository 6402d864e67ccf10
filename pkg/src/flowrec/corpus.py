"""Corpus mining and model persistence.

Mining parses complete project files, runs the flow analysis once per file,
and harvests three things in the same pass: flow token sequences for the
N-gram model, receiver/API and file-level co-occurrence counts, and usage
points (real method calls) that become training examples.  Each usage point
contributes one positive row and up to ``negative_cap`` sampled negatives
drawn from the candidate set the recommender would have seen at that spot.

Trained state is persisted as a single JSON bundle with a format version
and a checksum over the canonical payload.
"""

from __future__ import annotations

import hashlib
import json
import random
import zlib
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Optional, Sequence

import numpy as np

from . import candidates as candidates_mod
from .dataflow import analyze_context
from .errors import CorruptBundle, EmptyCorpus, VersionMismatch
from .features import (
    CooccurrenceModel,
    FeatureExtractor,
    NgramModel,
    PointContext,
    bag_pairs,
)
from .frontend import (
    DEFAULT_TOKEN_WINDOW,
    HOLE,
    RecommendationPoint,
    SourceContext,
    Token,
    parse_source,
)
from .errors import ParseError
from .forest import (
    DEFAULT_MAX_DEPTH,
    DEFAULT_MAX_FEATURES,
    DEFAULT_TREES,
    RandomForest,
)

BUNDLE_FORMAT = 1


@dataclass(frozen=True)
class TrainConfig:
    window: int = DEFAULT_TOKEN_WINDOW
    ngram_order: int = 3
    negative_cap: int = 20
    n_trees: int = DEFAULT_TREES
    max_depth: int = DEFAULT_MAX_DEPTH
    max_features: int = DEFAULT_MAX_FEATURES
    seed: int = 0
    #: Feature columns kept active; zeroed columns support ablation runs.
    feature_mask: tuple[bool, bool, bool, bool] = (True, True, True, True)


@dataclass
class UsagePoint:
    """One mined method call: the ground truth for a training example."""

    file_id: str
    line: int
    col: int
    api: str
    receiver: Optional[str]
    hole_paths: list[tuple[str, ...]]
    bag: list[tuple[str, int]]

    @property
    def point_id(self) -> str:
        return f"{self.file_id}:{self.line}:{self.col}"


@dataclass
class MinedFile:
    ctx: SourceContext
    sequences: list[tuple[str, ...]]
    points: list[UsagePoint]
    apis: list[str]  # call occurrences, with repeats
    invocations: list[tuple[str, str]]  # (receiver, api) occurrences


def _bag_at(tokens: Sequence[Token], cut: tuple[int, int], window: int) -> list[tuple[str, int]]:
    before = [t for t in tokens if t.position < cut]
    tail = before[-window:]
    n = len(tail)
    return [(tok.text, n - i) for i, tok in enumerate(tail)]


def mine_file(file_id: str, text: str, window: int = DEFAULT_TOKEN_WINDOW) -> MinedFile:
    """Parse and analyze one complete file; raises ParseError if unusable."""

    ctx = parse_source(text, file_id)
    points: list[UsagePoint] = []
    apis: list[str] = []
    invocations: list[tuple[str, str]] = []
    call_sequences: dict[tuple[str, ...], None] = {}

    def on_call(unit, paths):
        api = unit.dst.name
        if api == HOLE:
            return
        apis.append(api)
        receiver = unit.srcs[0].name if unit.srcs else None
        if receiver is not None:
            invocations.append((receiver, api))
        rendered = []
        for p in paths:
            names = tuple(n.name for n in p)
            call_sequences[names] = None
            rendered.append(names[:-1] + (HOLE,))
        rendered.sort(key=lambda p: (-len(p), p))
        points.append(
            UsagePoint(
                file_id,
                unit.line,
                unit.col,
                api,
                receiver,
                rendered,
                _bag_at(ctx.token_bag, (unit.line, unit.col), window),
            )
        )

    flow = analyze_context(ctx, on_call=on_call)
    sequences: dict[tuple[str, ...], None] = dict(call_sequences)
    for holder in flow._state.values():
        for path in holder.paths():
            names = tuple(n.name for n in path)
            if len(names) >= 2:
                sequences[names] = None
    return MinedFile(ctx, sorted(sequences), points, apis, invocations)


# ---------------------------------------------------------------------------
# training


@dataclass
class ModelBundle:
    """Everything needed to serve recommendations, as one value."""

    config: TrainConfig
    ngram: NgramModel
    cooccur: CooccurrenceModel
    forest: RandomForest
    project_index: dict
    api_frequency: Counter
    trained_files: int
    training_rows: int = 0

    def extractor(self) -> FeatureExtractor:
        return FeatureExtractor(self.ngram, self.cooccur, self.config.window)


def _negative_rng(seed: int, point_id: str) -> random.Random:
    return random.Random(seed ^ zlib.crc32(point_id.encode("utf-8")))


def sample_negatives(
    names: Sequence[str], truth: str, cap: int, seed: int, point_id: str
) -> list[str]:
    """Seeded, point-stable draw of non-truth candidate names."""

    pool = sorted(set(names) - {truth})
    if not pool:
        return []
    if cap <= 0 or len(pool) <= cap:
        return pool
    return _negative_rng(seed, point_id).sample(pool, cap)


def _fit_models(
    mined: Sequence[MinedFile], order: int
) -> tuple[NgramModel, CooccurrenceModel]:
    """Build the statistical models from already-mined files."""

    ngram = NgramModel(n=order)
    ngram.train([seq for mf in mined for seq in mf.sequences])
    cooccur = CooccurrenceModel()
    for mf in mined:
        for receiver, api in mf.invocations:
            cooccur.record_invocation(receiver, api)
        cooccur.record_file((t.text for t in mf.ctx.token_bag), mf.apis)
    return ngram, cooccur


def train_corpus(
    files: Sequence[tuple[str, str]],
    config: Optional[TrainConfig] = None,
    stdlib_index: Optional[dict] = None,
    inference=None,
) -> ModelBundle:
    """Mine ``(file_id, text)`` pairs and fit the full model stack."""

    config = config or TrainConfig()
    if stdlib_index is None:
        stdlib_index = candidates_mod.load_stdlib_index()

    mined: list[MinedFile] = []
    for file_id, text in files:
        try:
            mined.append(mine_file(file_id, text, window=config.window))
        except ParseError:
            continue
    if not mined:
        raise EmptyCorpus("no file in the corpus could be parsed")

    ngram, cooccur = _fit_models(mined, config.ngram_order)
    api_frequency: Counter = Counter()
    for mf in mined:
        api_frequency.update(mf.apis)

    project_index = candidates_mod.build_project_index(mf.ctx for mf in mined)
    extractor = FeatureExtractor(ngram, cooccur, config.window)

    rows: list[np.ndarray] = []
    labels: list[int] = []
    for mf in mined:
        # Rank training mirrors serving: score each file's call sites with
        # models that never saw that file, so the forest cannot lean on a
        # feature that only looks strong because the answer was counted in.
        others = [m for m in mined if m is not mf]
        try:
            held_out = FeatureExtractor(
                *_fit_models(others, config.ngram_order), config.window
            )
        except EmptyCorpus:
            held_out = extractor
        for pt in mf.points:
            synthetic = RecommendationPoint(
                pt.file_id, pt.line, pt.col, pt.receiver or ""
            )
            try:
                cands = candidates_mod.collect_candidates(
                    mf.ctx,
                    synthetic,
                    project_index=project_index,
                    stdlib_index=stdlib_index,
                    inference=inference,
                )
                names = [c.name for c in cands]
            except candidates_mod.EmptyCandidates:
                names = []
            point_ctx = PointContext(
                pt.receiver, pt.hole_paths, pt.bag, config.feature_mask
            )
            rows.append(held_out.vector(point_ctx, pt.api))
            labels.append(1)
            for neg in sample_negatives(
                names, pt.api, config.negative_cap, config.seed, pt.point_id
            ):
                rows.append(held_out.vector(point_ctx, neg))
                labels.append(0)

    if not rows:
        raise EmptyCorpus("corpus contains no method-call usage points")
    X = np.vstack(rows)
    y = np.array(labels, dtype=float)
    forest = RandomForest(
        n_trees=config.n_trees,
        max_depth=config.max_depth,
        max_features=config.max_features,
        seed=config.seed,
    ).fit(X, y)

    return ModelBundle(
        config=config,
        ngram=ngram,
        cooccur=cooccur,
        forest=forest,
        project_index=project_index,
        api_frequency=api_frequency,
        trained_files=len(mined),
        training_rows=len(rows),
    )


# ---------------------------------------------------------------------------
# persistence


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _checksum(payload: dict) -> str:
    return hashlib.sha256(_canonical(payload).encode("utf-8")).hexdigest()


def bundle_to_dict(bundle: ModelBundle) -> dict:
    payload = {
        "config": {
            "window": bundle.config.window,
            "ngram_order": bundle.config.ngram_order,
            "negative_cap": bundle.config.negative_cap,
            "n_trees": bundle.config.n_trees,
            "max_depth": bundle.config.max_depth,
            "max_features": bundle.config.max_features,
            "seed": bundle.config.seed,
            "feature_mask": list(bundle.config.feature_mask),
        },
        "ngram": bundle.ngram.to_dict(),
        "cooccur": bundle.cooccur.to_dict(),
        "forest": bundle.forest.to_dict(),
        "project_index": bundle.project_index,
        "api_frequency": dict(sorted(bundle.api_frequency.items())),
        "trained_files": bundle.trained_files,
        "training_rows": bundle.training_rows,
    }
    return {
        "format": BUNDLE_FORMAT,
        "checksum": _checksum(payload),
        "payload": payload,
    }


def bundle_from_dict(raw: dict) -> ModelBundle:
    if not isinstance(raw, dict) or "format" not in raw:
        raise CorruptBundle("bundle file is not a model bundle")
    if raw["format"] != BUNDLE_FORMAT:
        raise VersionMismatch(raw["format"], BUNDLE_FORMAT)
    try:
        payload = raw["payload"]
        stored = raw["checksum"]
    except KeyError as exc:
        raise CorruptBundle(f"bundle is missing field {exc}") from exc
    if _checksum(payload) != stored:
        raise CorruptBundle("bundle checksum does not match payload")
    try:
        cfg = payload["config"]
        config = TrainConfig(
            window=int(cfg["window"]),
            ngram_order=int(cfg["ngram_order"]),
            negative_cap=int(cfg["negative_cap"]),
            n_trees=int(cfg["n_trees"]),
            max_depth=int(cfg["max_depth"]),
            max_features=int(cfg["max_features"]),
            seed=int(cfg["seed"]),
            feature_mask=tuple(bool(b) for b in cfg["feature_mask"]),
        )
        return ModelBundle(
            config=config,
            ngram=NgramModel.from_dict(payload["ngram"]),
            cooccur=CooccurrenceModel.from_dict(payload["cooccur"]),
            forest=RandomForest.from_dict(payload["forest"]),
            project_index=payload["project_index"],
            api_frequency=Counter(
                {k: int(v) for k, v in payload["api_frequency"].items()}
            ),
            trained_files=int(payload["trained_files"]),
            training_rows=int(payload.get("training_rows", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptBundle(f"bundle payload is malformed: {exc}") from exc


def save_bundle(bundle: ModelBundle, path: str | FsPath) -> None:
    FsPath(path).write_text(json.dumps(bundle_to_dict(bundle), sort_keys=True))


def load_bundle(path: str | FsPath) -> ModelBundle:
    try:
        raw = json.loads(FsPath(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptBundle(f"cannot read bundle {path}: {exc}") from exc
    return bundle_from_dict(raw)


# ---------------------------------------------------------------------------
# corpus loading helpers


def read_corpus_paths(paths: Sequence[str | FsPath]) -> list[tuple[str, str]]:
    """Expand files and directories into (file_id, text) pairs."""

    out: list[tuple[str, str]] = []
    for p in paths:
        p = FsPath(p)
        if p.is_dir():
            for sub in sorted(p.rglob("*.py")):
                out.append((str(sub), sub.read_text()))
        else:
            out.append((str(p), p.read_text()))
    return out
