"""Feature extraction: four real-valued signals per (point, candidate) pair.

* t1: length-normalized log-probability of the candidate completing the
  data-flow token sequence, under a Laplace-smoothed N-gram model with
  context-level backoff.
* t2: mean sub-token similarity between the candidate and the variables
  along the flow path, discounted by flow distance.
* t3: co-occurrence confidence between the receiver object and the
  candidate, counted over usage occurrences.
* t4: distance-weighted confidence between nearby context tokens and the
  candidate, counted over files.

All four are computed without executing or type-checking the subject code.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EmptyCorpus
from .frontend import (
    DEFAULT_TOKEN_WINDOW,
    HOLE,
    ScopedName,
    Token,
    split_identifier,
)

PAD = "<s>"

#: Most hole paths scored per point; they are ordered longest-context first.
MAX_SCORED_PATHS = 8

FEATURE_NAMES = ("flow_ngram", "token_similarity", "object_cooccur", "context_cooccur")


# ---------------------------------------------------------------------------
# sub-token similarity


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length via the classic DP table."""

    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def token_similarity(x: str, api: str, distance: int = 1) -> float:
    """Sub-token similarity between two identifiers, discounted by distance.

    Twice the common-subsequence length over the summed sub-token counts,
    divided by the flow distance; identical names one hop apart score 1.0.
    """

    if distance < 1:
        raise ValueError("distance must be >= 1")
    xs = split_identifier(x)
    ys = split_identifier(api)
    common = lcs_length(xs, ys)
    if common == 0:
        return 0.0
    return 2.0 * common / (distance * (len(xs) + len(ys)))


def path_similarity(path_names: Sequence[str], api: str) -> float:
    """Mean discounted similarity of the names along one flow path.

    The last position is the API slot; each earlier name is discounted by
    its hop distance to that slot.  Sequences with no variables score 0.
    """

    names = [n for n in path_names if n != HOLE]
    if not names:
        return 0.0
    k = len(names)
    total = 0.0
    for i, name in enumerate(names):
        total += token_similarity(name, api, distance=k - i)
    return total / max(1, k)


# ---------------------------------------------------------------------------
# N-gram model over flow token sequences


class NgramModel:
    """Laplace add-one N-gram with context-level backoff.

    Counts are kept for every context length up to n-1.  Scoring uses the
    longest context that was ever continued in training; within that context
    the conditional distribution is a single Laplace estimate, so it sums to
    exactly 1 over the vocabulary.
    """

    def __init__(self, n: int = 3):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.counts: dict[tuple[str, ...], Counter] = {}
        self.vocab: set[str] = set()

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def train(self, sequences: Iterable[Sequence[str]]) -> "NgramModel":
        trained = 0
        for seq in sequences:
            seq = list(seq)
            if not seq:
                continue
            trained += 1
            self.vocab.update(seq)
            padded = [PAD] * (self.n - 1) + seq
            for i, tok in enumerate(seq):
                end = i + self.n - 1
                for order in range(self.n):
                    context = tuple(padded[end - order : end])
                    self.counts.setdefault(context, Counter())[tok] += 1
        if trained == 0:
            raise EmptyCorpus("no non-empty flow sequences to train on")
        return self

    def _resolve_context(self, context: tuple[str, ...]) -> tuple[str, ...]:
        while context:
            if context in self.counts:
                return context
            context = context[1:]
        return ()

    def conditional(self, token: str, context: Sequence[str]) -> float:
        """P(token | context) after backoff; Laplace-smoothed."""

        if not self.vocab:
            raise EmptyCorpus("model is untrained")
        ctx = self._resolve_context(tuple(context)[-(self.n - 1) :] if self.n > 1 else ())
        counter = self.counts.get(ctx, Counter())
        total = sum(counter.values())
        return (counter[token] + 1) / (total + self.vocab_size)

    def floor_logprob(self) -> float:
        """Log-probability of an unseen token in the empty context."""

        if not self.vocab:
            raise EmptyCorpus("model is untrained")
        total = sum(self.counts.get((), Counter()).values())
        return math.log(1.0 / (total + self.vocab_size))

    def sequence_logprob(self, seq: Sequence[str]) -> float:
        """Mean per-token log-probability of a sequence."""

        seq = list(seq)
        if not seq:
            return self.floor_logprob()
        padded = [PAD] * (self.n - 1) + seq
        total = 0.0
        for i, tok in enumerate(seq):
            context = padded[i : i + self.n - 1]
            total += math.log(self.conditional(tok, context))
        return total / len(seq)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "vocab": sorted(self.vocab),
            "counts": [
                {"context": " ".join(ctx), "next": dict(counter)}
                for ctx, counter in sorted(self.counts.items())
            ],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "NgramModel":
        model = cls(n=int(payload["n"]))
        model.vocab = set(payload["vocab"])
        for row in payload["counts"]:
            context = tuple(row["context"].split(" ")) if row["context"] else ()
            model.counts[context] = Counter(
                {tok: int(cnt) for tok, cnt in row["next"].items()}
            )
        return model


# ---------------------------------------------------------------------------
# co-occurrence tables


class CooccurrenceModel:
    """Object/API and context-token/API co-occurrence statistics.

    The object table counts usage occurrences: each time an object appears
    as a receiver, its row gains one.  The context table counts files: a
    (token, api) cell is the number of files containing both.
    """

    def __init__(self) -> None:
        self.object_counts: dict[str, Counter] = {}
        self.context_counts: dict[str, Counter] = {}
        self.token_files: Counter = Counter()

    def record_invocation(self, obj: str, api: str) -> None:
        self.object_counts.setdefault(obj, Counter())[api] += 1

    def record_file(self, tokens: Iterable[str], apis: Iterable[str]) -> None:
        token_set = set(tokens)
        api_set = set(apis)
        for tok in token_set:
            self.token_files[tok] += 1
            if api_set:
                row = self.context_counts.setdefault(tok, Counter())
                for api in api_set:
                    row[api] += 1

    def object_confidence(self, obj: str, api: str) -> float:
        """Share of obj's receiver occurrences that invoked api."""

        row = self.object_counts.get(obj)
        if not row:
            return 0.0
        total = sum(row.values())
        return row[api] / total if total else 0.0

    def context_confidence(self, token: str, api: str) -> float:
        """Share of files containing token that also use api."""

        seen = self.token_files[token]
        if not seen:
            return 0.0
        row = self.context_counts.get(token)
        return (row[api] / seen) if row else 0.0

    def weighted_context_confidence(
        self, tokens_with_distance: Sequence[tuple[str, int]], api: str
    ) -> float:
        """Mean of context confidences, each divided by token distance."""

        if not tokens_with_distance:
            return 0.0
        total = 0.0
        for token, distance in tokens_with_distance:
            total += self.context_confidence(token, api) / max(1, distance)
        return total / len(tokens_with_distance)

    def to_dict(self) -> dict:
        return {
            "object": {k: dict(v) for k, v in sorted(self.object_counts.items())},
            "context": {k: dict(v) for k, v in sorted(self.context_counts.items())},
            "token_files": dict(self.token_files),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "CooccurrenceModel":
        model = cls()
        for k, row in payload["object"].items():
            model.object_counts[k] = Counter({a: int(c) for a, c in row.items()})
        for k, row in payload["context"].items():
            model.context_counts[k] = Counter({a: int(c) for a, c in row.items()})
        model.token_files = Counter(
            {t: int(c) for t, c in payload["token_files"].items()}
        )
        return model


# ---------------------------------------------------------------------------
# feature assembly


@dataclass
class PointContext:
    """Everything feature extraction needs about one recommendation point."""

    receiver: Optional[str]
    hole_paths: list[tuple[str, ...]]  # rendered names, each ending at the slot
    bag: list[tuple[str, int]]  # (token text, distance), nearest first or any order
    field_mask: tuple[bool, bool, bool, bool] = (True, True, True, True)


class FeatureExtractor:
    """Combine the trained models into per-candidate feature vectors."""

    def __init__(
        self,
        ngram: NgramModel,
        cooccur: CooccurrenceModel,
        window: int = DEFAULT_TOKEN_WINDOW,
    ):
        self.ngram = ngram
        self.cooccur = cooccur
        self.window = window

    def vector(self, point: PointContext, candidate: str) -> np.ndarray:
        paths = point.hole_paths[:MAX_SCORED_PATHS]
        if paths:
            t1 = max(
                self.ngram.sequence_logprob(
                    [n for n in p if n != HOLE] + [candidate]
                )
                for p in paths
            )
            t2 = max(path_similarity(p, candidate) for p in paths)
        else:
            t1 = self.ngram.floor_logprob()
            t2 = (
                token_similarity(point.receiver, candidate)
                if point.receiver
                else 0.0
            )
        t3 = (
            self.cooccur.object_confidence(point.receiver, candidate)
            if point.receiver
            else 0.0
        )
        t4 = self.cooccur.weighted_context_confidence(point.bag, candidate)
        vec = np.array([t1, t2, t3, t4], dtype=float)
        mask = np.array(point.field_mask, dtype=bool)
        vec[~mask] = 0.0
        return vec

    def matrix(self, point: PointContext, candidates: Sequence[str]) -> np.ndarray:
        if not candidates:
            return np.empty((0, 4), dtype=float)
        return np.vstack([self.vector(point, c) for c in candidates])


def bag_pairs(bag: Sequence[tuple[Token, int]]) -> list[tuple[str, int]]:
    """Project a positional token bag to (text, distance) pairs."""

    return [(tok.text, dist) for tok, dist in bag]


def render_paths(paths: Iterable[Sequence[ScopedName]]) -> list[tuple[str, ...]]:
    """Render scoped-name paths to plain text tuples, order preserved."""

    return [tuple(node.name for node in path) for path in paths]
