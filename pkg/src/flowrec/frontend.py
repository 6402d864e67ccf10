"""Parsing frontend: turn (possibly incomplete) Python source into the
abstract syntax units the flow analysis consumes.

The frontend owns four jobs:

* locate and repair a recommendation point ``expr.<cursor>`` so the prefix
  parses (the incomplete call is patched with a placeholder invocation),
* tokenize the prefix into a positional token bag,
* walk the AST and emit the five abstract syntax units
  (Assign, For, Invoke, Access, Para) per statement, with scope-resolved
  identifiers and branch context,
* split identifiers into sub-tokens for similarity scoring.

Everything here is pure: the same (text, point) input always produces the
same ``SourceContext``.
"""

from __future__ import annotations

import ast
import io
import keyword
import re
import tokenize as _tokenize
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional

from .errors import ParseError

HOLE = "__HOLE__"

#: Default number of context tokens kept by :func:`collect_token_bag`.
DEFAULT_TOKEN_WINDOW = 30

UNIT_KINDS = ("Assign", "For", "Invoke", "Access", "Para")


class ScopedName(NamedTuple):
    """An identifier resolved to its binding scope.

    ``scope`` is an opaque integer (0 is always the module scope); ``name``
    is the plain identifier text used for rendering and scoring.
    """

    scope: int
    name: str


@dataclass(frozen=True)
class Token:
    text: str
    kind: str  # identifier | keyword | literal | punct
    position: tuple[int, int]  # (1-based line, 0-based column)


@dataclass(frozen=True)
class RecommendationPoint:
    """The location ``[expression].`` where an API name is wanted.

    ``line`` is 1-based, ``column`` 0-based, and (line, column) addresses the
    dot character itself.
    """

    file_id: str
    line: int
    column: int
    receiver_expr: str


@dataclass(frozen=True)
class AstUnit:
    """One abstract syntax unit occurrence.

    All five unit kinds reduce to "every source flows into dst":
    Assign/For/Access collect the value/iterator/index objects, Invoke pairs
    the object with the accessed attribute, Para pairs argument objects with
    the called function.  ``call`` marks an Invoke whose attribute is
    invoked, i.e. an API usage site.
    """

    kind: str
    label: int
    line: int
    col: int
    dst: ScopedName
    srcs: tuple[ScopedName, ...]
    call: bool = False

    def __post_init__(self):
        if self.kind not in UNIT_KINDS:
            raise ValueError(f"unknown unit kind {self.kind!r}")


@dataclass(frozen=True)
class Statement:
    """All units derived from one labeled statement, plus its kill set.

    ``branch`` is a tuple of (branch-site id, arm index) frames; two
    statements share a branch context iff they execute on the same
    straight-line path.  ``kills`` lists variables rebound here.
    """

    label: int
    line: int
    branch: tuple[tuple[int, int], ...]
    units: tuple[AstUnit, ...]
    kills: tuple[ScopedName, ...]


@dataclass(frozen=True)
class ImportItem:
    module: str  # dotted module path as written
    name: Optional[str]  # for `from module import name`
    bound_as: str  # local binding
    line: int


@dataclass(frozen=True)
class DefItem:
    name: str
    owner_class: Optional[str]
    line: int


@dataclass
class SourceContext:
    """Parsed prefix of one file up to (and including) a recommendation point.

    ``statements`` hold every abstract syntax unit in source order;
    ``token_bag`` the identifier/keyword tokens with positions (strictly
    increasing).  The repair placeholder never appears in ``token_bag``;
    units mentioning it are exempt from the bag-membership invariant.
    """

    file_id: str
    text: str
    statements: list[Statement]
    token_bag: list[Token]
    imports: list[ImportItem] = field(default_factory=list)
    defs: list[DefItem] = field(default_factory=list)
    class_ranges: list[tuple[str, int, int]] = field(default_factory=list)
    point: Optional[RecommendationPoint] = None
    hole: Optional[ScopedName] = None
    receiver: Optional[ScopedName] = None
    dropped_lines: int = 0

    @property
    def units(self) -> list[AstUnit]:
        return [u for stmt in self.statements for u in stmt.units]

    def unit_kinds(self) -> list[str]:
        return [u.kind for u in self.units]

    def class_at(self, line: int) -> Optional[str]:
        """Innermost class whose body spans ``line``, if any."""

        innermost: Optional[tuple[int, str]] = None
        for name, start, end in self.class_ranges:
            if start <= line <= end and (innermost is None or start > innermost[0]):
                innermost = (start, name)
        return innermost[1] if innermost else None

    @property
    def enclosing_class(self) -> Optional[str]:
        if self.point is None:
            return None
        return self.class_at(self.point.line)


# ---------------------------------------------------------------------------
# identifier sub-tokens


_SUBTOKEN_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z0-9]*|[a-z0-9]+|\d+")


def split_identifier(name: str) -> list[str]:
    """Split an identifier on underscores and camelCase, lowercased.

    Acronym runs stay together (``HTTPResponse`` -> [http, response]) and
    digit runs attach to the preceding sub-token.
    """

    if not name:
        raise ValueError("empty identifier")
    parts: list[str] = []
    for chunk in name.split("_"):
        for sub in _SUBTOKEN_RE.findall(chunk):
            if sub.isdigit() and parts:
                parts[-1] += sub
            else:
                parts.append(sub.lower())
    return parts if parts else [name.lower()]


# ---------------------------------------------------------------------------
# tokenization


def _classify_name(text: str) -> str:
    if keyword.iskeyword(text) or keyword.issoftkeyword(text):
        return "keyword"
    return "identifier"


def tokenize_source(text: str) -> list[Token]:
    """Tokenize source into identifier/keyword tokens with positions.

    Comments, strings, numbers and punctuation are dropped, as is the repair
    placeholder.  Tokenization errors on a trailing fragment end the stream
    instead of raising; callers deal in whatever prefix was tokenizable.
    """

    out: list[Token] = []
    reader = io.StringIO(text).readline
    try:
        for tok in _tokenize.generate_tokens(reader):
            if tok.type != _tokenize.NAME or tok.string == HOLE:
                continue
            out.append(Token(tok.string, _classify_name(tok.string), tok.start))
    except (_tokenize.TokenError, IndentationError, SyntaxError):
        pass
    return out


def collect_token_bag(
    ctx: SourceContext,
    point: RecommendationPoint,
    window: int = DEFAULT_TOKEN_WINDOW,
) -> list[tuple[Token, int]]:
    """Last ``window`` identifier/keyword tokens before the point.

    Each token is paired with its 1-based distance counting back from the
    point (nearest token has distance 1).
    """

    if window < 1:
        raise ValueError("window must be >= 1")
    cut = (point.line, point.column)
    before = [t for t in ctx.token_bag if t.position < cut]
    tail = before[-window:]
    n = len(tail)
    return [(tok, n - i) for i, tok in enumerate(tail)]


# ---------------------------------------------------------------------------
# recommendation point location


_STOP_CHARS = set(" \t\r\n,;:+-*/%<>=!&|^~@(,[{")


def _receiver_before_dot(prefix: str) -> str:
    """Lexically scan backward from the dot for the receiver expression."""

    i = len(prefix) - 1
    depth = 0
    while i >= 0:
        c = prefix[i]
        if c in "\"'":
            quote = c
            i -= 1
            while i >= 0 and prefix[i] != quote:
                i -= 1
            i -= 1
            continue
        if c in ")]}":
            depth += 1
        elif c in "([{":
            if depth == 0:
                break
            depth -= 1
        elif depth == 0 and c in _STOP_CHARS:
            break
        i -= 1
    return prefix[i + 1 :].strip()


def locate_point(text: str, line: int, column: int, file_id: str = "<memory>") -> RecommendationPoint:
    """Build a RecommendationPoint for the dot at (line, column)."""

    lines = text.splitlines()
    if not (1 <= line <= len(lines)):
        raise ParseError(f"{file_id}: line {line} outside file")
    row = lines[line - 1]
    if not (0 <= column < len(row)) or row[column] != ".":
        raise ParseError(f"{file_id}: no '.' at {line}:{column}")
    receiver = _receiver_before_dot(row[:column])
    return RecommendationPoint(file_id, line, column, receiver)


# ---------------------------------------------------------------------------
# scope bookkeeping


class _Scope:
    __slots__ = ("id", "kind", "parent", "bound", "globals_", "nonlocals")

    def __init__(self, sid: int, kind: str, parent: Optional["_Scope"]):
        self.id = sid
        self.kind = kind  # module | function | class
        self.parent = parent
        self.bound: set[str] = set()
        self.globals_: set[str] = set()
        self.nonlocals: set[str] = set()

    def resolve(self, name: str) -> ScopedName:
        if name in self.globals_:
            return ScopedName(0, name)
        scope: Optional[_Scope] = self
        skip_current = name in self.nonlocals
        while scope is not None:
            is_current = scope is self
            usable = is_current or scope.kind != "class"
            if usable and not (is_current and skip_current) and name in scope.bound:
                return ScopedName(scope.id, name)
            scope = scope.parent
        return ScopedName(0, name)


def _bound_names(body: list[ast.stmt]) -> tuple[set[str], set[str], set[str]]:
    """Names bound directly in a scope body (not in nested def/class)."""

    bound: set[str] = set()
    globals_: set[str] = set()
    nonlocals: set[str] = set()

    def collect_target(node: ast.expr) -> None:
        if isinstance(node, ast.Name):
            bound.add(node.id)
        elif isinstance(node, (ast.Tuple, ast.List)):
            for elt in node.elts:
                collect_target(elt)
        elif isinstance(node, ast.Starred):
            collect_target(node.value)

    def walk_expr(node: ast.AST) -> None:
        for sub in ast.walk(node):
            if isinstance(sub, ast.NamedExpr):
                collect_target(sub.target)
            elif isinstance(sub, (ast.ListComp, ast.SetComp, ast.DictComp, ast.GeneratorExp)):
                for comp in sub.generators:
                    collect_target(comp.target)

    def walk(stmts: list[ast.stmt]) -> None:
        for stmt in stmts:
            if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                bound.add(stmt.name)
                continue
            if isinstance(stmt, ast.Global):
                globals_.update(stmt.names)
                continue
            if isinstance(stmt, ast.Nonlocal):
                nonlocals.update(stmt.names)
                continue
            if isinstance(stmt, ast.Assign):
                for t in stmt.targets:
                    collect_target(t)
            elif isinstance(stmt, (ast.AnnAssign, ast.AugAssign)):
                collect_target(stmt.target)
            elif isinstance(stmt, (ast.For, ast.AsyncFor)):
                collect_target(stmt.target)
            elif isinstance(stmt, (ast.With, ast.AsyncWith)):
                for item in stmt.items:
                    if item.optional_vars is not None:
                        collect_target(item.optional_vars)
            elif isinstance(stmt, (ast.Import, ast.ImportFrom)):
                for alias in stmt.names:
                    bound.add(alias.asname or alias.name.split(".")[0])
            elif isinstance(stmt, ast.Try):
                for handler in stmt.handlers:
                    if handler.name:
                        bound.add(handler.name)
            for child in ast.iter_child_nodes(stmt):
                if isinstance(child, ast.expr):
                    walk_expr(child)
            for attr in ("body", "orelse", "finalbody", "handlers"):
                sub = getattr(stmt, attr, None)
                if isinstance(sub, list):
                    nested = [
                        s.body if isinstance(s, ast.ExceptHandler) else [s] for s in sub
                    ]
                    walk([s for group in nested for s in group if isinstance(s, ast.stmt)])
    walk(body)
    return bound, globals_, nonlocals


# ---------------------------------------------------------------------------
# unit extraction


class _UnitCollector:
    """Walk an AST and emit labeled Statement records with units."""

    def __init__(self) -> None:
        self.statements: list[Statement] = []
        self.imports: list[ImportItem] = []
        self.defs: list[DefItem] = []
        self.class_ranges: list[tuple[str, int, int]] = []
        self._label = 0
        self._scope_counter = 0
        self._branch_counter = 0
        self._branch: tuple[tuple[int, int], ...] = ()
        self._class_stack: list[str] = []
        # per-statement accumulators
        self._units: list[AstUnit] = []
        self._kills: list[ScopedName] = []

    # -- scope helpers

    def _new_scope(self, kind: str, parent: Optional[_Scope], body: list[ast.stmt]) -> _Scope:
        self._scope_counter += 1 if parent is not None else 0
        sid = 0 if parent is None else self._scope_counter
        scope = _Scope(sid, kind, parent)
        bound, globals_, nonlocals = _bound_names(body)
        scope.bound = bound
        scope.globals_ = globals_
        scope.nonlocals = nonlocals
        return scope

    # -- unit emission

    def _emit(
        self,
        kind: str,
        pos: tuple[int, int],
        dst: ScopedName,
        srcs: list[ScopedName],
        call: bool = False,
    ) -> None:
        # A source equal to dst (x = f(x)) is kept: the old binding's flow
        # continues through the rebinding.
        self._units.append(
            AstUnit(kind, self._label, pos[0], pos[1], dst, tuple(dict.fromkeys(srcs)), call)
        )

    @staticmethod
    def _pos(node: ast.AST) -> tuple[int, int]:
        return (getattr(node, "lineno", 0), getattr(node, "col_offset", 0))

    def _flush(self, line: int) -> None:
        self.statements.append(
            Statement(
                self._label,
                line,
                self._branch,
                tuple(self._units),
                tuple(dict.fromkeys(self._kills)),
            )
        )
        self._units = []
        self._kills = []

    # -- expressions

    def _expr(self, node: Optional[ast.expr], scope: _Scope) -> tuple[list[ScopedName], list[ScopedName]]:
        """Emit units for an expression; return (vm, representatives).

        ``vm`` is every variable/method object in the expression;
        ``representatives`` name the object(s) standing for the expression's
        value when it becomes the base of a further access.
        """

        if node is None:
            return [], []

        if isinstance(node, ast.Name):
            sn = scope.resolve(node.id)
            return [sn], [sn]
        if isinstance(node, ast.Attribute):
            return self._attribute(node, scope, call=False)
        if isinstance(node, ast.Call):
            if isinstance(node.func, ast.Attribute):
                func_vm, func_rep = self._attribute(node.func, scope, call=True)
            else:
                func_vm, func_rep = self._expr(node.func, scope)
            vm = list(func_vm)
            arg_srcs: list[ScopedName] = []
            for arg in list(node.args) + [kw.value for kw in node.keywords]:
                a = arg.value if isinstance(arg, ast.Starred) else arg
                a_vm, _ = self._expr(a, scope)
                vm.extend(a_vm)
                arg_srcs.extend(a_vm)
            if arg_srcs:
                for f in func_rep:
                    self._emit("Para", self._pos(node), f, arg_srcs)
            return vm, func_rep
        if isinstance(node, ast.Subscript):
            base_vm, base_rep = self._expr(node.value, scope)
            idx_vm, _ = self._expr(node.slice, scope)
            for container in base_rep:
                if idx_vm:
                    self._emit("Access", self._pos(node), container, idx_vm)
            return base_vm + idx_vm, base_rep
        if isinstance(node, ast.NamedExpr):
            vm, rep = self._expr(node.value, scope)
            target = scope.resolve(node.target.id)
            self._emit("Assign", self._pos(node), target, vm)
            self._kills.append(target)
            return vm + [target], [target]
        if isinstance(node, ast.Lambda):
            return self._expr(node.body, scope)
        if isinstance(node, (ast.ListComp, ast.SetComp, ast.GeneratorExp, ast.DictComp)):
            vm: list[ScopedName] = []
            for comp in node.generators:
                it_vm, _ = self._expr(comp.iter, scope)
                vm.extend(it_vm)
                for tname in self._target_names(comp.target):
                    sn = scope.resolve(tname)
                    self._emit("For", self._pos(node), sn, it_vm)
                    vm.append(sn)
                for cond in comp.ifs:
                    c_vm, _ = self._expr(cond, scope)
                    vm.extend(c_vm)
            if isinstance(node, ast.DictComp):
                for part in (node.key, node.value):
                    p_vm, _ = self._expr(part, scope)
                    vm.extend(p_vm)
            else:
                e_vm, _ = self._expr(node.elt, scope)
                vm.extend(e_vm)
            return vm, []
        if isinstance(node, ast.Constant):
            return [], []

        # Generic containers / operators: union of children, no representative.
        vm = []
        for child in ast.iter_child_nodes(node):
            if isinstance(child, ast.expr):
                c_vm, _ = self._expr(child, scope)
                vm.extend(c_vm)
        return vm, []

    def _attribute(
        self, node: ast.Attribute, scope: _Scope, call: bool
    ) -> tuple[list[ScopedName], list[ScopedName]]:
        base_vm, base_rep = self._expr(node.value, scope)
        attr = scope.resolve(node.attr)
        # Position the unit at the dot so "tokens before the unit" matches
        # what a developer has typed when asking for a completion here.
        pos = (
            getattr(node.value, "end_lineno", node.lineno),
            getattr(node.value, "end_col_offset", node.col_offset),
        )
        for base in base_rep:
            self._emit("Invoke", pos, attr, [base], call=call)
        if not base_rep:
            self._emit("Invoke", pos, attr, [], call=call)
        return base_vm + [attr], [attr]

    @staticmethod
    def _target_names(node: ast.expr) -> list[str]:
        if isinstance(node, ast.Name):
            return [node.id]
        if isinstance(node, (ast.Tuple, ast.List)):
            out = []
            for elt in node.elts:
                out.extend(_UnitCollector._target_names(elt))
            return out
        if isinstance(node, ast.Starred):
            return _UnitCollector._target_names(node.value)
        return []

    # -- statements

    def run(self, tree: ast.Module) -> None:
        module_scope = self._new_scope("module", None, tree.body)
        self._visit_body(tree.body, module_scope)

    def _begin(self, stmt: ast.stmt) -> None:
        self._label += 1

    def _push_arm(self, site: int, arm: int) -> tuple[tuple[int, int], ...]:
        old = self._branch
        self._branch = old + ((site, arm),)
        return old

    def _visit_body(self, body: list[ast.stmt], scope: _Scope) -> None:
        for stmt in body:
            self._visit_stmt(stmt, scope)

    def _assign_like(self, target: ast.expr, vm: list[ScopedName], scope: _Scope, kill: bool) -> None:
        pos = self._pos(target)
        if isinstance(target, ast.Name):
            sn = scope.resolve(target.id)
            self._emit("Assign", pos, sn, vm)
            if kill:
                self._kills.append(sn)
        elif isinstance(target, (ast.Tuple, ast.List)):
            for elt in target.elts:
                self._assign_like(elt, vm, scope, kill)
        elif isinstance(target, ast.Starred):
            self._assign_like(target.value, vm, scope, kill)
        elif isinstance(target, ast.Attribute):
            # Attribute update feeds the base object; the base keeps its history.
            _, base_rep = self._expr(target.value, scope)
            for base in base_rep:
                self._emit("Assign", pos, base, vm)
        elif isinstance(target, ast.Subscript):
            _, base_rep = self._expr(target.value, scope)
            idx_vm, _ = self._expr(target.slice, scope)
            for base in base_rep:
                if idx_vm:
                    self._emit("Access", pos, base, idx_vm)
                self._emit("Assign", pos, base, vm)

    def _visit_stmt(self, stmt: ast.stmt, scope: _Scope) -> None:
        self._begin(stmt)
        line = stmt.lineno

        if isinstance(stmt, ast.Assign):
            targets = stmt.targets
            paired = (
                len(targets) == 1
                and isinstance(targets[0], (ast.Tuple, ast.List))
                and isinstance(stmt.value, (ast.Tuple, ast.List))
                and len(targets[0].elts) == len(stmt.value.elts)
            )
            if paired:
                for t_elt, v_elt in zip(targets[0].elts, stmt.value.elts):
                    vm, _ = self._expr(v_elt, scope)
                    self._assign_like(t_elt, vm, scope, kill=True)
            else:
                vm, _ = self._expr(stmt.value, scope)
                for target in targets:
                    self._assign_like(target, vm, scope, kill=True)
            self._flush(line)
        elif isinstance(stmt, ast.AnnAssign):
            if stmt.value is not None:
                vm, _ = self._expr(stmt.value, scope)
                self._assign_like(stmt.target, vm, scope, kill=True)
            self._flush(line)
        elif isinstance(stmt, ast.AugAssign):
            # In-place update reads the old value: no kill, no self-edge.
            vm, _ = self._expr(stmt.value, scope)
            self._assign_like(stmt.target, vm, scope, kill=False)
            self._flush(line)
        elif isinstance(stmt, (ast.For, ast.AsyncFor)):
            vm, _ = self._expr(stmt.iter, scope)
            for tname in self._target_names(stmt.target):
                sn = scope.resolve(tname)
                self._emit("For", self._pos(stmt.target), sn, vm)
                self._kills.append(sn)
            self._flush(line)
            site = self._next_site()
            old = self._push_arm(site, 0)
            self._visit_body(stmt.body, scope)
            self._branch = old
            if stmt.orelse:
                old = self._push_arm(site, 1)
                self._visit_body(stmt.orelse, scope)
                self._branch = old
        elif isinstance(stmt, ast.While):
            self._expr(stmt.test, scope)
            self._flush(line)
            site = self._next_site()
            old = self._push_arm(site, 0)
            self._visit_body(stmt.body, scope)
            self._branch = old
            if stmt.orelse:
                old = self._push_arm(site, 1)
                self._visit_body(stmt.orelse, scope)
                self._branch = old
        elif isinstance(stmt, ast.If):
            self._expr(stmt.test, scope)
            self._flush(line)
            site = self._next_site()
            old = self._push_arm(site, 0)
            self._visit_body(stmt.body, scope)
            self._branch = old
            if stmt.orelse:
                old = self._push_arm(site, 1)
                self._visit_body(stmt.orelse, scope)
                self._branch = old
        elif isinstance(stmt, (ast.With, ast.AsyncWith)):
            for item in stmt.items:
                vm, _ = self._expr(item.context_expr, scope)
                if item.optional_vars is not None:
                    self._assign_like(item.optional_vars, vm, scope, kill=True)
            self._flush(line)
            self._visit_body(stmt.body, scope)
        elif isinstance(stmt, ast.Try):
            self._flush(line)
            self._visit_body(stmt.body, scope)
            site = self._next_site()
            for i, handler in enumerate(stmt.handlers):
                old = self._push_arm(site, i + 1)
                self._label += 1
                if handler.name:
                    self._kills.append(scope.resolve(handler.name))
                if handler.type is not None:
                    self._expr(handler.type, scope)
                self._flush(handler.lineno)
                self._visit_body(handler.body, scope)
                self._branch = old
            self._visit_body(stmt.orelse, scope)
            self._visit_body(stmt.finalbody, scope)
        elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            owner = self._class_stack[-1] if self._class_stack else None
            self.defs.append(DefItem(stmt.name, owner, line))
            self._kills.append(scope.resolve(stmt.name))
            for dec in stmt.decorator_list:
                self._expr(dec, scope)
            # Default values evaluate in the enclosing scope at def time.
            for default in stmt.args.defaults + stmt.args.kw_defaults:
                if default is not None:
                    self._expr(default, scope)
            self._flush(line)
            inner = self._new_scope("function", scope, stmt.body)
            for arg in self._all_args(stmt.args):
                inner.bound.add(arg)
            self._visit_body(stmt.body, inner)
        elif isinstance(stmt, ast.ClassDef):
            self.defs.append(DefItem(stmt.name, None, line))
            self.class_ranges.append(
                (stmt.name, stmt.lineno, getattr(stmt, "end_lineno", stmt.lineno))
            )
            self._kills.append(scope.resolve(stmt.name))
            for base in stmt.bases:
                self._expr(base, scope)
            for dec in stmt.decorator_list:
                self._expr(dec, scope)
            self._flush(line)
            inner = self._new_scope("class", scope, stmt.body)
            self._class_stack.append(stmt.name)
            self._visit_body(stmt.body, inner)
            self._class_stack.pop()
        elif isinstance(stmt, ast.Import):
            for alias in stmt.names:
                bound = alias.asname or alias.name.split(".")[0]
                self.imports.append(ImportItem(alias.name, None, bound, line))
                self._kills.append(scope.resolve(bound))
            self._flush(line)
        elif isinstance(stmt, ast.ImportFrom):
            module = stmt.module or ""
            for alias in stmt.names:
                bound = alias.asname or alias.name
                self.imports.append(ImportItem(module, alias.name, bound, line))
                self._kills.append(scope.resolve(bound))
            self._flush(line)
        elif isinstance(stmt, ast.Delete):
            for target in stmt.targets:
                if isinstance(target, ast.Name):
                    self._kills.append(scope.resolve(target.id))
                else:
                    self._expr(target, scope)
            self._flush(line)
        elif isinstance(stmt, (ast.Global, ast.Nonlocal, ast.Pass, ast.Break, ast.Continue)):
            self._flush(line)
        else:
            # Expr, Return, Raise, Assert, Match subjects, ...: plain
            # expression statements; units come from the nested expressions.
            for child in ast.iter_child_nodes(stmt):
                if isinstance(child, ast.expr):
                    self._expr(child, scope)
            self._flush(line)
            for attr in ("body", "orelse", "finalbody"):
                sub = getattr(stmt, attr, None)
                if isinstance(sub, list) and sub and isinstance(sub[0], ast.stmt):
                    self._visit_body(sub, scope)

    def _next_site(self) -> int:
        self._branch_counter += 1
        return self._branch_counter

    @staticmethod
    def _all_args(args: ast.arguments) -> list[str]:
        names = [a.arg for a in args.posonlyargs + args.args + args.kwonlyargs]
        if args.vararg:
            names.append(args.vararg.arg)
        if args.kwarg:
            names.append(args.kwarg.arg)
        return names


# ---------------------------------------------------------------------------
# parsing with repair


def _unbalanced_closers(code: str) -> str:
    """Closers for brackets left open in ``code`` (string-aware, best effort)."""

    pairs = {"(": ")", "[": "]", "{": "}"}
    stack: list[str] = []
    i = 0
    n = len(code)
    while i < n:
        c = code[i]
        if c == "#":
            while i < n and code[i] != "\n":
                i += 1
            continue
        if c in "\"'":
            quote = c
            triple = code[i : i + 3] in ('"""', "'''")
            i += 3 if triple else 1
            closer = quote * 3 if triple else quote
            end = code.find(closer, i)
            i = n if end < 0 else end + len(closer)
            continue
        if c in pairs:
            stack.append(pairs[c])
        elif c in ")]}":
            if stack:
                stack.pop()
        i += 1
    return "".join(reversed(stack))


def _prefix_through(text: str, line: int, column: int) -> str:
    lines = text.splitlines(keepends=True)
    head = "".join(lines[: line - 1])
    return head + lines[line - 1][: column + 1]


def _try_parse(code: str) -> Optional[ast.Module]:
    try:
        return ast.parse(code)
    except (SyntaxError, ValueError, MemoryError):
        return None


def parse_context(
    text: str,
    point: RecommendationPoint,
    window: int = DEFAULT_TOKEN_WINDOW,
) -> SourceContext:
    """Parse the prefix of ``text`` up to ``point`` into a SourceContext.

    The trailing incomplete call is repaired to ``receiver.__HOLE__()``
    (closing any open brackets, and completing a compound-statement header
    with ``: pass`` when needed).  If the repaired prefix still does not
    parse, trailing lines are dropped one at a time; ParseError means no
    prefix was usable at all.
    """

    prefix = _prefix_through(text, point.line, point.column)
    if not prefix.endswith("."):
        raise ParseError(f"{point.file_id}: point {point.line}:{point.column} is not a '.'")

    repaired = prefix + HOLE + "()"
    closers = _unbalanced_closers(repaired)
    # The spaced variant rescues numeric receivers (3.x tokenizes as a
    # decimal literal, "3 .x" does not).
    spaced = prefix[:-1] + " ." + HOLE + "()"
    attempts = [
        repaired + closers,
        repaired + closers + ": pass",
        spaced + closers,
        spaced + closers + ": pass",
    ]
    tree = None
    parsed_text = attempts[0]
    for candidate in attempts:
        tree = _try_parse(candidate)
        if tree is not None:
            parsed_text = candidate
            break

    dropped = 0
    if tree is None:
        kept = prefix.splitlines(keepends=True)[:-1]
        while kept:
            dropped += 1
            candidate = "".join(kept)
            tree = _try_parse(candidate)
            if tree is not None:
                parsed_text = candidate
                break
            kept.pop()
        else:
            candidate = ""
            tree = ast.parse(candidate)
            parsed_text = candidate
            dropped += 1

    collector = _UnitCollector()
    collector.run(tree)
    bag = [t for t in tokenize_source(parsed_text) if t.position <= (point.line, point.column)]

    hole = None
    receiver = None
    for unit in reversed([u for s in collector.statements for u in s.units]):
        if unit.dst.name == HOLE:
            hole = unit.dst
            if unit.kind == "Invoke" and unit.srcs:
                receiver = unit.srcs[0]
            break

    ctx = SourceContext(
        file_id=point.file_id,
        text=prefix,
        statements=collector.statements,
        token_bag=bag,
        imports=collector.imports,
        defs=collector.defs,
        class_ranges=collector.class_ranges,
        point=point,
        hole=hole,
        receiver=receiver,
        dropped_lines=dropped,
    )
    if not ctx.statements and not ctx.token_bag:
        raise ParseError(f"{point.file_id}: no parseable context before {point.line}:{point.column}")
    return ctx


def parse_source(text: str, file_id: str = "<memory>") -> SourceContext:
    """Parse a complete source file (no recommendation point)."""

    tree = _try_parse(text)
    if tree is None:
        raise ParseError(f"{file_id}: file does not parse")
    collector = _UnitCollector()
    collector.run(tree)
    return SourceContext(
        file_id=file_id,
        text=text,
        statements=collector.statements,
        token_bag=tokenize_source(text),
        imports=collector.imports,
        defs=collector.defs,
        class_ranges=collector.class_ranges,
    )
