"""Candidate API collection for a recommendation point.

Candidates come from three sources, highest priority first:

* methods whose receiver type the (pluggable) type inference resolved,
* callables defined in the current file and the ingested project files,
* names exported by imported modules, falling back to a frozen index of
  well-known standard-library modules and builtin types.

Duplicates keep their highest-priority source.  Dunder names are excluded
unless the receiver is written as a class name.
"""

from __future__ import annotations

import ast
import builtins
import importlib
import json
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional, Protocol

from .errors import EmptyCandidates
from .frontend import RecommendationPoint, SourceContext

PRIORITY_TYPE = 4
PRIORITY_SCOPE = 3
PRIORITY_IMPORT = 2
PRIORITY_STDLIB = 1

_INDEX_RESOURCE = "stdlib_index.json"

#: Builtin constructor calls whose result type is the constructor itself.
_CONSTRUCTOR_TYPES = {
    "dict": "dict",
    "list": "list",
    "set": "set",
    "frozenset": "frozenset",
    "tuple": "tuple",
    "str": "str",
    "int": "int",
    "float": "float",
    "complex": "complex",
    "bytes": "bytes",
    "bytearray": "bytearray",
    "bool": "bool",
    "open": "file",
    "range": "range",
    "memoryview": "memoryview",
}

_STDLIB_MODULES = (
    "abc", "argparse", "ast", "base64", "bisect", "collections", "contextlib",
    "copy", "csv", "dataclasses", "datetime", "difflib", "enum", "errno",
    "functools", "glob", "hashlib", "heapq", "inspect", "io", "itertools",
    "json", "logging", "math", "operator", "os", "os.path", "pathlib",
    "pickle", "queue", "random", "re", "shutil", "socket", "statistics",
    "string", "struct", "subprocess", "sys", "tempfile", "textwrap",
    "threading", "time", "tokenize", "traceback", "typing", "unicodedata",
    "urllib.parse", "uuid", "warnings", "weakref",
)


@dataclass(frozen=True)
class Candidate:
    name: str
    source: str  # type | scope | import | stdlib
    detail: str  # owning type, class, or module
    priority: int


class TypeInference(Protocol):
    """Resolves the receiver expression at a point to a type name, or None."""

    def infer(self, ctx: SourceContext, point: RecommendationPoint) -> Optional[str]:
        ...


class LiteralTypeInference:
    """Default inference: literals, builtin constructors, imported modules.

    Deliberately shallow; richer engines plug in through the same protocol.
    """

    def infer(self, ctx: SourceContext, point: RecommendationPoint) -> Optional[str]:
        expr = point.receiver_expr
        if not expr:
            return None
        for item in ctx.imports:
            if item.bound_as == expr and item.name is None:
                return f"module:{item.module}"
        try:
            node = ast.parse(expr, mode="eval").body
        except SyntaxError:
            return None
        return self._of_node(node)

    def _of_node(self, node: ast.expr) -> Optional[str]:
        if isinstance(node, ast.Constant):
            value = node.value
            if value is None:
                return "NoneType"
            if isinstance(value, bool):
                return "bool"
            return type(value).__name__
        if isinstance(node, (ast.JoinedStr, ast.FormattedValue)):
            return "str"
        if isinstance(node, ast.List) or isinstance(node, ast.ListComp):
            return "list"
        if isinstance(node, ast.Dict) or isinstance(node, ast.DictComp):
            return "dict"
        if isinstance(node, ast.Set) or isinstance(node, ast.SetComp):
            return "set"
        if isinstance(node, ast.Tuple):
            return "tuple"
        if isinstance(node, ast.GeneratorExp):
            return "generator"
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            return _CONSTRUCTOR_TYPES.get(node.func.id)
        if isinstance(node, ast.BinOp):
            # A chain of +/% on a string literal stays a string.
            left = self._of_node(node.left)
            right = self._of_node(node.right)
            if "str" in (left, right):
                return "str"
        return None


# ---------------------------------------------------------------------------
# frozen standard-library index


def build_stdlib_index() -> dict:
    """Introspect the running interpreter into the index structure.

    Used to (re)generate the committed snapshot; normal operation loads the
    frozen file so results do not drift across interpreter patch levels.
    """

    types: dict[str, list[str]] = {}
    simple = {
        "str": str, "list": list, "dict": dict, "set": set, "tuple": tuple,
        "int": int, "float": float, "complex": complex, "bytes": bytes,
        "bytearray": bytearray, "frozenset": frozenset, "bool": bool,
        "object": object, "range": range, "memoryview": memoryview,
        "Exception": Exception, "NoneType": type(None),
    }
    for name, obj in simple.items():
        types[name] = sorted(dir(obj))
    import io as _io

    types["file"] = sorted(dir(_io.TextIOWrapper))
    types["generator"] = sorted(dir((_ for _ in ())))
    import collections as _collections
    import pathlib as _pathlib
    import re as _re
    import random as _random
    import datetime as _datetime

    types["Counter"] = sorted(dir(_collections.Counter))
    types["defaultdict"] = sorted(dir(_collections.defaultdict))
    types["deque"] = sorted(dir(_collections.deque))
    types["OrderedDict"] = sorted(dir(_collections.OrderedDict))
    types["Path"] = sorted(dir(_pathlib.Path))
    types["Pattern"] = sorted(dir(_re.compile("")))
    types["Match"] = sorted(dir(_re.match("", "")))
    types["Random"] = sorted(dir(_random.Random))
    types["datetime"] = sorted(dir(_datetime.datetime))
    types["date"] = sorted(dir(_datetime.date))
    types["timedelta"] = sorted(dir(_datetime.timedelta))

    modules: dict[str, list[str]] = {}
    for mod_name in _STDLIB_MODULES:
        try:
            mod = importlib.import_module(mod_name)
        except ImportError:
            continue
        modules[mod_name] = sorted(
            attr for attr in dir(mod) if not attr.startswith("_")
        )
    modules["builtins"] = sorted(
        attr for attr in dir(builtins) if not attr.startswith("_")
    )
    return {"format": 1, "types": types, "modules": modules}


def load_stdlib_index() -> dict:
    """Load the committed index snapshot shipped as package data."""

    text = resources.files(__package__).joinpath("data", _INDEX_RESOURCE).read_text()
    return json.loads(text)


# ---------------------------------------------------------------------------
# project index


def build_project_index(contexts: Iterable[SourceContext]) -> dict:
    """Aggregate defs and imports of ingested files for candidate lookup."""

    classes: dict[str, list[str]] = {}
    functions: list[str] = []
    for ctx in contexts:
        for item in ctx.defs:
            if item.owner_class is not None:
                classes.setdefault(item.owner_class, [])
                if item.name not in classes[item.owner_class]:
                    classes[item.owner_class].append(item.name)
            elif item.name not in functions:
                functions.append(item.name)
    # Class names are themselves callable from module scope.
    for cname in classes:
        if cname not in functions:
            functions.append(cname)
    return {"classes": classes, "functions": functions}


# ---------------------------------------------------------------------------
# collection


def _is_dunder(name: str) -> bool:
    return name.startswith("__") and name.endswith("__") and len(name) > 4


def collect_candidates(
    ctx: SourceContext,
    point: RecommendationPoint,
    project_index: Optional[dict] = None,
    stdlib_index: Optional[dict] = None,
    inference: Optional[TypeInference] = None,
) -> list[Candidate]:
    """All candidate API names for the point, deduplicated by priority.

    Raises EmptyCandidates when every source comes up empty.
    """

    stdlib_index = stdlib_index if stdlib_index is not None else load_stdlib_index()
    inference = inference if inference is not None else LiteralTypeInference()
    project_index = project_index or {}

    best: dict[str, Candidate] = {}

    def offer(name: str, source: str, detail: str, priority: int) -> None:
        if not name.isidentifier():
            return
        cur = best.get(name)
        if cur is None or priority > cur.priority:
            best[name] = Candidate(name, source, detail, priority)

    types_table = stdlib_index.get("types", {})
    modules_table = stdlib_index.get("modules", {})
    classes = dict(project_index.get("classes", {}))
    for item in ctx.defs:
        if item.owner_class is not None:
            classes.setdefault(item.owner_class, [])
            if item.name not in classes[item.owner_class]:
                classes[item.owner_class].append(item.name)

    # 1. type-resolved receiver
    resolved = inference.infer(ctx, point)
    if resolved is not None:
        if resolved.startswith("module:"):
            mod = resolved.split(":", 1)[1]
            for name in modules_table.get(mod, []):
                offer(name, "type", mod, PRIORITY_TYPE)
        else:
            for name in types_table.get(resolved, []):
                offer(name, "type", resolved, PRIORITY_TYPE)
    elif point.receiver_expr in classes:
        for name in classes[point.receiver_expr]:
            offer(name, "type", point.receiver_expr, PRIORITY_TYPE)
    elif point.receiver_expr in ("self", "cls"):
        enclosing = ctx.class_at(point.line)
        if enclosing in classes:
            for name in classes[enclosing]:
                offer(name, "type", enclosing, PRIORITY_TYPE)

    # 2. scope chain: current file, then project files
    for item in ctx.defs:
        detail = item.owner_class or ctx.file_id
        offer(item.name, "scope", detail, PRIORITY_SCOPE)
    for cname, methods in project_index.get("classes", {}).items():
        for name in methods:
            offer(name, "scope", cname, PRIORITY_SCOPE)
    for name in project_index.get("functions", []):
        offer(name, "scope", "project", PRIORITY_SCOPE)

    # 3. imported modules, then the frozen standard-library tables
    for item in ctx.imports:
        exported = modules_table.get(item.module)
        if exported:
            for name in exported:
                offer(name, "import", item.module, PRIORITY_IMPORT)
        if item.name is not None:
            offer(item.name, "import", item.module, PRIORITY_IMPORT)
    for tname, methods in types_table.items():
        for name in methods:
            offer(name, "stdlib", tname, PRIORITY_STDLIB)

    receiver_is_class = (
        point.receiver_expr in classes
        or point.receiver_expr in types_table
        or point.receiver_expr in _CONSTRUCTOR_TYPES
    )
    out = [
        c
        for c in best.values()
        if receiver_is_class or not _is_dunder(c.name)
    ]
    out.sort(key=lambda c: (-c.priority, c.name))
    if not out:
        raise EmptyCandidates(
            f"no candidates for {point.receiver_expr!r} at "
            f"{point.file_id}:{point.line}"
        )
    return out
