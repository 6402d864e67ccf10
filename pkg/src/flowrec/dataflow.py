"""Optimistic data-flow over abstract syntax units.

The analysis walks the labeled statements of a ``SourceContext`` in source
order and maintains, per variable, the set of flow paths that currently end
at that variable.  It is optimistic by construction: any unit source may
flow into its destination, aliasing is ignored, and branches contribute the
union of their arms.  Rebinding a variable kills the paths recorded for it,
but paths already extended into other variables keep their history
(snapshot semantics).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import EmptyFlow
from .frontend import AstUnit, ScopedName, SourceContext, Statement

#: Hard cap on nodes in one flow path; longer chains keep their newest nodes.
MAX_PATH_LEN = 8

#: Cap on distinct paths tracked per variable (newest kept).
MAX_PATHS_PER_VAR = 64

Path = tuple[ScopedName, ...]


@dataclass(frozen=True)
class FlowEdge:
    """One direct flow relation, rendered for output."""

    src: str
    dst: str
    line: int
    rule: str

    def to_dict(self) -> dict:
        return {"src": self.src, "dst": self.dst, "line": self.line, "rule": self.rule}


@dataclass(frozen=True)
class PrecisionRecall:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


class _VarPaths:
    """Ordered, deduplicated path entries for one variable."""

    __slots__ = ("entries",)

    def __init__(self) -> None:
        # path -> branch context of the statement that created it
        self.entries: dict[Path, tuple[tuple[int, int], ...]] = {}

    def add(self, path: Path, branch: tuple[tuple[int, int], ...]) -> None:
        if path in self.entries:
            return
        self.entries[path] = branch
        while len(self.entries) > MAX_PATHS_PER_VAR:
            oldest = next(iter(self.entries))
            del self.entries[oldest]

    def kill(self, branch: tuple[tuple[int, int], ...]) -> None:
        depth = len(branch)
        self.entries = {
            p: c for p, c in self.entries.items() if c[:depth] != branch
        }

    def paths(self) -> list[Path]:
        return list(self.entries)


class FlowResult:
    """Outcome of analyzing one context: edges plus per-variable paths."""

    def __init__(self, edges: list[FlowEdge], state: dict[ScopedName, _VarPaths]):
        self.edges = edges
        self._state = state

    def paths_to(self, var: Optional[ScopedName]) -> list[Path]:
        """All flow paths ending at ``var``, longest context first.

        Raises EmptyFlow when the variable has no recorded flow at all.
        """

        if var is None:
            raise EmptyFlow("no flow target at the recommendation point")
        holder = self._state.get(var)
        if holder is None or not holder.entries:
            raise EmptyFlow(f"no data-flow relations reach {var.name!r}")
        return sorted(holder.paths(), key=lambda p: (-len(p), tuple(n.name for n in p)))

    def edge_pairs(self) -> set[tuple[str, str]]:
        return {(e.src, e.dst) for e in self.edges}


def analyze_context(ctx: SourceContext, on_call=None) -> FlowResult:
    """Run the optimistic flow analysis over a parsed context.

    Units inside one statement see the paths created by earlier units of the
    same statement (so chained calls compose), but kills only strike paths
    already in the state before the statement.  ``on_call(unit, paths)``
    fires at every invocation-style Invoke unit with the flow paths ending
    at the invoked name at that moment; miners use it to harvest usage
    points mid-file.
    """

    state: dict[ScopedName, _VarPaths] = {}
    edges: list[FlowEdge] = []
    seen_pairs: set[tuple[ScopedName, ScopedName]] = set()

    def holder(var: ScopedName) -> _VarPaths:
        vp = state.get(var)
        if vp is None:
            vp = state[var] = _VarPaths()
        return vp

    for stmt in ctx.statements:
        pending: dict[ScopedName, dict[Path, None]] = {}

        def lookup(var: ScopedName) -> list[Path]:
            vp = state.get(var)
            base = vp.paths() if vp is not None else []
            extra = list(pending.get(var, ()))
            return base + [p for p in extra if p not in base]

        for unit in stmt.units:
            created: dict[Path, None] = {}
            for src in unit.srcs:
                if src == unit.dst:
                    # Self-reference: the old binding's paths survive the
                    # rebinding unchanged; no edge is recorded.
                    vp = state.get(src)
                    if vp is not None:
                        for path in vp.paths():
                            created[path] = None
                    continue
                if (src, unit.dst) not in seen_pairs:
                    seen_pairs.add((src, unit.dst))
                    edges.append(
                        FlowEdge(src.name, unit.dst.name, unit.line, unit.kind)
                    )
                upstream = lookup(src)
                if upstream:
                    for path in upstream:
                        extended = path + (unit.dst,)
                        if len(extended) > MAX_PATH_LEN:
                            extended = extended[-MAX_PATH_LEN:]
                        created[extended] = None
                else:
                    created[(src, unit.dst)] = None
            if created:
                pending.setdefault(unit.dst, {}).update(created)
            if on_call is not None and unit.call and unit.kind == "Invoke":
                on_call(unit, list(created))
        for var in stmt.kills:
            vp = state.get(var)
            if vp is not None:
                vp.kill(stmt.branch)
        for var, paths in pending.items():
            for path in paths:
                holder(var).add(path, stmt.branch)

    return FlowResult(edges, state)


def edges_for_dump(result: FlowResult) -> list[dict]:
    """Edge list in the stable JSON schema (src, dst, line, rule)."""

    return [e.to_dict() for e in result.edges]


def score_edge_sets(
    predicted: Iterable[tuple[str, str]],
    expected: Iterable[tuple[str, str]],
) -> PrecisionRecall:
    """Set precision/recall/F1 over (src, dst) pairs."""

    pred = set(predicted)
    gold = set(expected)
    tp = len(pred & gold)
    fp = len(pred - gold)
    fn = len(gold - pred)
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if (precision + recall)
        else 0.0
    )
    return PrecisionRecall(precision, recall, f1, tp, fp, fn)


def hole_paths(ctx: SourceContext, result: Optional[FlowResult] = None) -> list[Path]:
    """Flow paths ending at the recommendation point's placeholder.

    Falls back to the bare receiver when the receiver has no upstream flow;
    raises EmptyFlow only when not even a receiver name exists.
    """

    if result is None:
        result = analyze_context(ctx)
    try:
        return result.paths_to(ctx.hole)
    except EmptyFlow:
        if ctx.receiver is not None and ctx.hole is not None:
            return [(ctx.receiver, ctx.hole)]
        raise


def path_names(path: Sequence[ScopedName], drop: str = "") -> list[str]:
    """Render a path as plain identifier texts, optionally dropping one name."""

    return [n.name for n in path if n.name != drop]
