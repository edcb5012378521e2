"""
Source Model
============
Parses Python source into an immutable, analysis-oriented tree: imports,
functions, classes, call sites, recoverable message text and the
conditional/loop nesting of every statement.
"""

import ast
import io
import re
import tokenize
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .errors import EncodingError, OutOfRange, ParseError
from .logging_config import get_logger

logger = get_logger(__name__)

PLAIN_IMPORT = "plain-import"
FROM_IMPORT = "from-import"

LITERAL = "literal"
PLACEHOLDER = "placeholder"

_INDEX_NODE = getattr(ast, "Index", None)
_MATCH_NODE = getattr(ast, "Match", None)
_TRY_STAR_NODE = getattr(ast, "TryStar", None)

_PERCENT_SPEC = re.compile(
    r"%%|%(?:\([^)]*\))?[#0\- +]*(?:\*|\d+)?(?:\.(?:\*|\d+))?[hlL]?[diouxXeEfFgGcrsa]"
)
_FORMAT_SPEC = re.compile(r"\{\{|\}\}|\{[^{}]*\}")


# =============================================================================
# Domain Types
# =============================================================================

@dataclass(frozen=True)
class ImportBinding:
    """A name bound by an import statement."""
    module_path: str
    bound_name: str
    kind: str
    aliased: bool = False

    @property
    def target(self) -> str:
        """Dotted path the bound name stands for."""
        if self.kind == FROM_IMPORT or self.aliased:
            return self.module_path
        return self.bound_name


@dataclass(frozen=True)
class StringPart:
    kind: str
    text: str


@dataclass(frozen=True)
class DictItem:
    """A literal string key of a dict literal, with the names its value reads."""
    key: str
    line: int
    value_identifiers: Tuple[str, ...] = ()


@dataclass(frozen=True)
class DictBinding:
    """A literal key written into a local dict (assignment, update or subscript store)."""
    name: str
    key: str
    line: int


@dataclass(frozen=True)
class CallSite:
    """One call expression with everything detectors read from it."""
    callee_path: str
    args: Tuple[str, ...]
    kwargs: Tuple[Tuple[str, str], ...]
    line: int
    end_line: int
    text: str
    guard_depth: int
    in_exception_handler: bool
    string_parts: Tuple[StringPart, ...]
    dynamic_message: bool = False
    in_loop: bool = False
    statement: int = -1
    arg_kinds: Tuple[str, ...] = ()
    arg_parts: Tuple[Optional[Tuple[StringPart, ...]], ...] = ()
    arg_identifiers: Tuple[Tuple[str, ...], ...] = ()
    kwarg_identifiers: Tuple[Tuple[str, Tuple[str, ...]], ...] = ()
    nested_calls: Tuple[str, ...] = ()
    dict_items: Tuple[DictItem, ...] = ()
    handler_names: Tuple[str, ...] = ()

    @property
    def kwarg_map(self) -> Dict[str, str]:
        return dict(self.kwargs)

    @property
    def method(self) -> str:
        """Last segment of the callee chain."""
        return self.callee_path.rsplit(".", 1)[-1]

    @property
    def identifiers(self) -> Tuple[str, ...]:
        """Every identifier read by the arguments, in source order, deduplicated."""
        seen = []
        for group in self.arg_identifiers:
            seen.extend(group)
        for _, group in self.kwarg_identifiers:
            seen.extend(group)
        return tuple(dict.fromkeys(seen))

    @property
    def literal_text(self) -> str:
        return " ".join(p.text for p in self.string_parts if p.kind == LITERAL)


@dataclass(frozen=True)
class Statement:
    """A statement of a function body with its position in the nesting structure."""
    index: int
    kind: str
    line: int
    end_line: int
    depth: int
    parent: int
    branch: str
    position: int
    in_loop: bool
    in_exception_handler: bool
    call_names: Tuple[str, ...] = ()
    assigned_names: Tuple[str, ...] = ()
    loaded_names: Tuple[str, ...] = ()


@dataclass(frozen=True)
class SourceFunction:
    name: str
    qualified_name: str
    class_name: Optional[str]
    params: Tuple[str, ...]
    body: Tuple[Statement, ...]
    calls: Tuple[CallSite, ...]
    line_start: int
    line_end: int
    decorators: Tuple[str, ...] = ()
    is_async: bool = False
    string_keys: Tuple[DictItem, ...] = ()
    dict_bindings: Tuple[DictBinding, ...] = ()

    def statement(self, index: int) -> Optional[Statement]:
        if 0 <= index < len(self.body):
            return self.body[index]
        return None

    def children(self, index: int, branch: Optional[str] = None) -> List[Statement]:
        return [
            s for s in self.body
            if s.parent == index and (branch is None or s.branch == branch)
        ]

    def descendants(self, index: int, branch: Optional[str] = None) -> List[Statement]:
        """All statements nested (transitively) under statement `index`."""
        found = []
        frontier = self.children(index, branch)
        while frontier:
            found.extend(frontier)
            frontier = [c for s in frontier for c in self.children(s.index)]
        return sorted(found, key=lambda s: s.index)

    def assigned_names(self) -> Tuple[str, ...]:
        names = []
        for stmt in self.body:
            names.extend(stmt.assigned_names)
        return tuple(dict.fromkeys(names))


@dataclass(frozen=True)
class ClassInfo:
    name: str
    qualified_name: str
    line_start: int
    line_end: int
    methods: Tuple[str, ...] = ()


@dataclass(frozen=True)
class ModuleTree:
    path: str
    imports: Tuple[ImportBinding, ...]
    functions: Tuple[SourceFunction, ...]
    classes: Tuple[ClassInfo, ...]
    raw_text: str
    line_index: Tuple[int, ...]
    star_imports: Tuple[str, ...] = ()
    module_calls: Tuple[CallSite, ...] = ()
    call_assignments: Tuple[Tuple[str, str], ...] = ()

    @property
    def line_count(self) -> int:
        return len(self.line_index)

    def line_text(self, line: int) -> str:
        """Raw text of a 1-based line without its line terminator."""
        if not 1 <= line <= self.line_count:
            raise OutOfRange(f"{self.path}: line {line} outside 1..{self.line_count}")
        start = self.line_index[line - 1]
        if line < self.line_count:
            end = self.line_index[line] - 1
        else:
            end = len(self.raw_text)
            if self.raw_text.endswith("\n"):
                end -= 1
        return self.raw_text[start:end].rstrip("\r")

    def imported_modules(self) -> Tuple[str, ...]:
        modules = [b.module_path for b in self.imports] + list(self.star_imports)
        return tuple(dict.fromkeys(modules))


# =============================================================================
# Expression helpers
# =============================================================================

def dotted_name(node: ast.AST) -> str:
    """Syntactic attribute chain: calls render as `()`, subscripts as `[]`."""
    if isinstance(node, ast.Name):
        return node.id
    if isinstance(node, ast.Attribute):
        return f"{dotted_name(node.value)}.{node.attr}"
    if isinstance(node, ast.Call):
        return f"{dotted_name(node.func)}()"
    if isinstance(node, ast.Subscript):
        return f"{dotted_name(node.value)}[]"
    return "<expr>"


def _subscript_key(node: ast.Subscript) -> Optional[str]:
    sl = node.slice
    if _INDEX_NODE is not None and isinstance(sl, _INDEX_NODE):
        sl = sl.value
    if isinstance(sl, ast.Constant) and isinstance(sl.value, str):
        return sl.value
    return None


def _identifiers(node: ast.AST) -> Tuple[str, ...]:
    names = []
    for sub in _walk_in_order(node):
        if isinstance(sub, ast.Name):
            names.append(sub.id)
        elif isinstance(sub, ast.Attribute):
            names.append(sub.attr)
        elif isinstance(sub, ast.arg):
            names.append(sub.arg)
    return tuple(dict.fromkeys(names))


def _walk_in_order(node: ast.AST) -> List[ast.AST]:
    nodes = list(ast.walk(node))
    nodes.sort(key=lambda n: (getattr(n, "lineno", 0), getattr(n, "col_offset", 0)))
    return nodes


def _target_names(node: ast.AST) -> List[str]:
    if isinstance(node, (ast.Tuple, ast.List)):
        names = []
        for elt in node.elts:
            names.extend(_target_names(elt))
        return names
    if isinstance(node, ast.Starred):
        return _target_names(node.value)
    if isinstance(node, (ast.Name, ast.Attribute)):
        return [dotted_name(node)]
    if isinstance(node, ast.Subscript):
        return [dotted_name(node.value)]
    return []


def _split_literal(text: str, pattern: "re.Pattern") -> List[StringPart]:
    parts = []
    pos = 0
    for match in pattern.finditer(text):
        if match.start() > pos:
            parts.append(StringPart(LITERAL, text[pos:match.start()]))
        token = match.group(0)
        if token in ("%%", "{{", "}}"):
            parts.append(StringPart(LITERAL, token[0]))
        else:
            parts.append(StringPart(PLACEHOLDER, token))
        pos = match.end()
    if pos < len(text):
        parts.append(StringPart(LITERAL, text[pos:]))
    return parts


class _Source:
    """Source text plus segment lookup for expression nodes."""

    def __init__(self, text: str):
        self.text = text

    def segment(self, node: ast.AST) -> str:
        seg = ast.get_source_segment(self.text, node)
        if seg is None and hasattr(ast, "unparse"):
            return ast.unparse(node)
        return seg or ""

    def string_parts(self, node: ast.AST) -> Optional[List[StringPart]]:
        """Literal fragments and placeholders of a string-building expression."""
        if isinstance(node, ast.Constant) and isinstance(node.value, str):
            return [StringPart(LITERAL, node.value)]
        if isinstance(node, ast.JoinedStr):
            parts = []
            for value in node.values:
                if isinstance(value, ast.Constant) and isinstance(value.value, str):
                    parts.append(StringPart(LITERAL, value.value))
                elif isinstance(value, ast.FormattedValue):
                    parts.append(StringPart(PLACEHOLDER, self.segment(value.value)))
            return parts
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Mod):
            if isinstance(node.left, ast.Constant) and isinstance(node.left.value, str):
                return _split_literal(node.left.value, _PERCENT_SPEC)
            return None
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Attribute)
            and node.func.attr == "format"
            and isinstance(node.func.value, ast.Constant)
            and isinstance(node.func.value.value, str)
        ):
            return _split_literal(node.func.value.value, _FORMAT_SPEC)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Add):
            left = self.string_parts(node.left)
            right = self.string_parts(node.right)
            if left is None and right is None:
                return None
            if left is None:
                left = [StringPart(PLACEHOLDER, self.segment(node.left))]
            if right is None:
                right = [StringPart(PLACEHOLDER, self.segment(node.right))]
            return left + right
        return None


def _arg_kind(node: ast.AST) -> str:
    if isinstance(node, ast.Constant):
        return "literal"
    if isinstance(node, ast.Name):
        return "name"
    if isinstance(node, ast.Attribute):
        return "attribute"
    if isinstance(node, ast.JoinedStr):
        return "fstring"
    if isinstance(node, ast.Dict):
        return "dict"
    if isinstance(node, ast.Call):
        if (
            isinstance(node.func, ast.Name)
            and node.func.id in ("str", "repr")
            and len(node.args) == 1
            and isinstance(node.args[0], (ast.Name, ast.Attribute))
        ):
            return "str-of-name"
        return "call"
    if isinstance(node, ast.BinOp):
        return "format"
    return "other"


def _dict_items(node: ast.Dict) -> List[DictItem]:
    items = []
    for key, value in zip(node.keys, node.values):
        if isinstance(key, ast.Constant) and isinstance(key.value, str):
            items.append(DictItem(key.value, key.lineno, _identifiers(value)))
    return items


# =============================================================================
# Body walking
# =============================================================================

class _BodyWalker:
    """Flattens a statement block into Statements and CallSites."""

    def __init__(self, source: _Source):
        self.source = source
        self.statements: List[Optional[Statement]] = []
        self.calls: List[CallSite] = []
        self.string_keys: List[DictItem] = []
        self.dict_bindings: List[DictBinding] = []

    def walk_block(self, stmts, parent=-1, branch="body", depth=0,
                   in_loop=False, handlers: Tuple[str, ...] = (), in_handler=False):
        for position, stmt in enumerate(stmts):
            self._walk_statement(stmt, parent, branch, position, depth,
                                 in_loop, handlers, in_handler)

    def _walk_statement(self, stmt, parent, branch, position, depth,
                        in_loop, handlers, in_handler):
        index = len(self.statements)
        self.statements.append(None)

        own, blocks = self._split(stmt, depth, in_loop, handlers, in_handler)

        call_names = []
        loaded = []
        for expr in own:
            for node in _walk_in_order(expr):
                if isinstance(node, ast.Call):
                    site = self._call_site(node, depth, in_loop, handlers, in_handler, index)
                    self.calls.append(site)
                    call_names.append(site.callee_path)
                elif isinstance(node, ast.Name) and isinstance(node.ctx, ast.Load):
                    loaded.append(node.id)
                elif isinstance(node, ast.Dict):
                    self.string_keys.extend(_dict_items(node))
                elif isinstance(node, ast.Subscript):
                    key = _subscript_key(node)
                    if key is not None:
                        self.string_keys.append(DictItem(key, node.lineno))

        self._track_dict_bindings(stmt)

        self.statements[index] = Statement(
            index=index,
            kind=type(stmt).__name__,
            line=stmt.lineno,
            end_line=getattr(stmt, "end_lineno", None) or stmt.lineno,
            depth=depth,
            parent=parent,
            branch=branch,
            position=position,
            in_loop=in_loop,
            in_exception_handler=in_handler,
            call_names=tuple(call_names),
            assigned_names=tuple(dict.fromkeys(self._assigned(stmt))),
            loaded_names=tuple(dict.fromkeys(loaded)),
        )

        for name, block, b_depth, b_loop, b_handlers, b_in_handler in blocks:
            self.walk_block(block, index, name, b_depth, b_loop, b_handlers, b_in_handler)

    def _split(self, stmt, depth, in_loop, handlers, in_handler):
        """Own expressions of a statement and its child blocks."""
        keep = (handlers, in_handler)
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            own = list(stmt.decorator_list) + list(stmt.args.defaults)
            own += [d for d in stmt.args.kw_defaults if d is not None]
            return own, []
        if isinstance(stmt, ast.ClassDef):
            own = list(stmt.decorator_list) + list(stmt.bases) + [k.value for k in stmt.keywords]
            # attributes and method decorators run at class creation; method bodies do not
            return own, [("body", stmt.body, depth, in_loop) + keep]
        if isinstance(stmt, ast.If):
            return [stmt.test], [
                ("body", stmt.body, depth + 1, in_loop) + keep,
                ("orelse", stmt.orelse, depth + 1, in_loop) + keep,
            ]
        if isinstance(stmt, (ast.For, ast.AsyncFor)):
            return [stmt.target, stmt.iter], [
                ("body", stmt.body, depth + 1, True) + keep,
                ("orelse", stmt.orelse, depth + 1, in_loop) + keep,
            ]
        if isinstance(stmt, ast.While):
            return [stmt.test], [
                ("body", stmt.body, depth + 1, True) + keep,
                ("orelse", stmt.orelse, depth + 1, in_loop) + keep,
            ]
        if isinstance(stmt, ast.Try) or (_TRY_STAR_NODE and isinstance(stmt, _TRY_STAR_NODE)):
            own = [h.type for h in stmt.handlers if h.type is not None]
            blocks = [("body", stmt.body, depth, in_loop) + keep]
            for i, handler in enumerate(stmt.handlers):
                bound = handlers + ((handler.name,) if handler.name else ())
                blocks.append((f"handler{i}", handler.body, depth, in_loop, bound, True))
            blocks.append(("orelse", stmt.orelse, depth, in_loop) + keep)
            blocks.append(("finalbody", stmt.finalbody, depth, in_loop) + keep)
            return own, blocks
        if isinstance(stmt, (ast.With, ast.AsyncWith)):
            own = []
            for item in stmt.items:
                own.append(item.context_expr)
                if item.optional_vars is not None:
                    own.append(item.optional_vars)
            return own, [("body", stmt.body, depth, in_loop) + keep]
        if _MATCH_NODE is not None and isinstance(stmt, _MATCH_NODE):
            own = [stmt.subject] + [c.guard for c in stmt.cases if c.guard is not None]
            blocks = [
                (f"case{i}", case.body, depth + 1, in_loop) + keep
                for i, case in enumerate(stmt.cases)
            ]
            return own, blocks
        return [n for n in ast.iter_child_nodes(stmt) if isinstance(n, ast.expr)], []

    @staticmethod
    def _assigned(stmt) -> List[str]:
        if isinstance(stmt, ast.Assign):
            names = []
            for target in stmt.targets:
                names.extend(_target_names(target))
            return names
        if isinstance(stmt, (ast.AugAssign, ast.AnnAssign)):
            return _target_names(stmt.target)
        if isinstance(stmt, (ast.For, ast.AsyncFor)):
            return _target_names(stmt.target)
        if isinstance(stmt, (ast.With, ast.AsyncWith)):
            names = []
            for item in stmt.items:
                if item.optional_vars is not None:
                    names.extend(_target_names(item.optional_vars))
            return names
        names = []
        for node in ast.walk(stmt) if isinstance(stmt, ast.Expr) else ():
            if isinstance(node, ast.NamedExpr):
                names.extend(_target_names(node.target))
        return names

    def _track_dict_bindings(self, stmt):
        if isinstance(stmt, (ast.Assign, ast.AnnAssign)):
            targets = stmt.targets if isinstance(stmt, ast.Assign) else [stmt.target]
            value = stmt.value
            for target in targets:
                if isinstance(target, ast.Name) and isinstance(value, ast.Dict):
                    for item in _dict_items(value):
                        self.dict_bindings.append(DictBinding(target.id, item.key, item.line))
                elif (
                    isinstance(target, ast.Name)
                    and isinstance(value, ast.Call)
                    and isinstance(value.func, ast.Name)
                    and value.func.id == "dict"
                ):
                    for kw in value.keywords:
                        if kw.arg:
                            self.dict_bindings.append(DictBinding(target.id, kw.arg, kw.value.lineno))
                elif isinstance(target, ast.Subscript) and isinstance(target.value, ast.Name):
                    key = _subscript_key(target)
                    if key is not None:
                        self.dict_bindings.append(DictBinding(target.value.id, key, target.lineno))
        elif isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Call):
            call = stmt.value
            func = call.func
            if (
                isinstance(func, ast.Attribute)
                and func.attr == "update"
                and isinstance(func.value, ast.Name)
            ):
                name = func.value.id
                for arg in call.args:
                    if isinstance(arg, ast.Dict):
                        for item in _dict_items(arg):
                            self.dict_bindings.append(DictBinding(name, item.key, item.line))
                for kw in call.keywords:
                    if kw.arg:
                        self.dict_bindings.append(DictBinding(name, kw.arg, kw.value.lineno))

    def _call_site(self, node: ast.Call, depth, in_loop, handlers, in_handler, index) -> CallSite:
        src = self.source
        arg_parts = []
        arg_idents = []
        nested = []
        dict_items = []
        for arg in node.args:
            parts = src.string_parts(arg)
            arg_parts.append(tuple(parts) if parts is not None else None)
            arg_idents.append(_identifiers(arg))
        kwarg_idents = []
        for kw in node.keywords:
            kwarg_idents.append((kw.arg or "**", _identifiers(kw.value)))
        for expr in list(node.args) + [kw.value for kw in node.keywords]:
            for sub in _walk_in_order(expr):
                if isinstance(sub, ast.Call):
                    nested.append(dotted_name(sub.func))
                elif isinstance(sub, ast.Dict):
                    dict_items.extend(_dict_items(sub))

        string_parts: List[StringPart] = []
        for parts in arg_parts:
            if parts:
                string_parts.extend(parts)
        msg_kw = next((kw for kw in node.keywords if kw.arg == "msg"), None)
        if msg_kw is not None:
            parts = src.string_parts(msg_kw.value)
            if parts:
                string_parts.extend(parts)
        has_payload = bool(node.args) or msg_kw is not None
        has_literal = any(p.kind == LITERAL and p.text.strip() for p in string_parts)

        return CallSite(
            callee_path=dotted_name(node.func),
            args=tuple(src.segment(a) for a in node.args),
            kwargs=tuple((kw.arg or "**", src.segment(kw.value)) for kw in node.keywords),
            line=node.lineno,
            end_line=getattr(node, "end_lineno", None) or node.lineno,
            text=src.segment(node),
            guard_depth=depth,
            in_exception_handler=in_handler,
            string_parts=tuple(string_parts),
            dynamic_message=has_payload and not has_literal,
            in_loop=in_loop,
            statement=index,
            arg_kinds=tuple(_arg_kind(a) for a in node.args),
            arg_parts=tuple(arg_parts),
            arg_identifiers=tuple(arg_idents),
            kwarg_identifiers=tuple(kwarg_idents),
            nested_calls=tuple(nested),
            dict_items=tuple(dict_items),
            handler_names=tuple(handlers),
        )


# =============================================================================
# Module building
# =============================================================================

def _params(args: ast.arguments) -> Tuple[str, ...]:
    names = [a.arg for a in getattr(args, "posonlyargs", [])]
    names += [a.arg for a in args.args]
    if args.vararg:
        names.append(args.vararg.arg)
    names += [a.arg for a in args.kwonlyargs]
    if args.kwarg:
        names.append(args.kwarg.arg)
    return tuple(names)


def _decorator_name(node: ast.AST) -> str:
    if isinstance(node, ast.Call):
        node = node.func
    return dotted_name(node)


class _DefinitionVisitor(ast.NodeVisitor):
    """Collects functions (at any nesting) and classes in source order."""

    def __init__(self, source: _Source):
        self.source = source
        self.stack: List[Tuple[str, str]] = []
        self.functions: List[SourceFunction] = []
        self.classes: List[ClassInfo] = []

    def _qualified(self, name: str) -> str:
        return ".".join([n for _, n in self.stack] + [name])

    def visit_ClassDef(self, node: ast.ClassDef):
        methods = tuple(
            n.name for n in node.body
            if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))
        )
        self.classes.append(ClassInfo(
            name=node.name,
            qualified_name=self._qualified(node.name),
            line_start=node.lineno,
            line_end=node.end_lineno or node.lineno,
            methods=methods,
        ))
        self.stack.append(("class", node.name))
        self.generic_visit(node)
        self.stack.pop()

    def visit_FunctionDef(self, node):
        class_name = self.stack[-1][1] if self.stack and self.stack[-1][0] == "class" else None
        walker = _BodyWalker(self.source)
        walker.walk_block(node.body)
        self.functions.append(SourceFunction(
            name=node.name,
            qualified_name=self._qualified(node.name),
            class_name=class_name,
            params=_params(node.args),
            body=tuple(walker.statements),
            calls=tuple(walker.calls),
            line_start=node.lineno,
            line_end=node.end_lineno or node.lineno,
            decorators=tuple(_decorator_name(d) for d in node.decorator_list),
            is_async=isinstance(node, ast.AsyncFunctionDef),
            string_keys=tuple(walker.string_keys),
            dict_bindings=tuple(walker.dict_bindings),
        ))
        self.stack.append(("function", node.name))
        self.generic_visit(node)
        self.stack.pop()

    visit_AsyncFunctionDef = visit_FunctionDef


def _collect_imports(module: ast.Module) -> Tuple[List[ImportBinding], List[str]]:
    bindings = []
    star = []
    nodes = [n for n in ast.walk(module) if isinstance(n, (ast.Import, ast.ImportFrom))]
    nodes.sort(key=lambda n: (n.lineno, n.col_offset))
    for node in nodes:
        if isinstance(node, ast.Import):
            for alias in node.names:
                if alias.asname:
                    bindings.append(ImportBinding(alias.name, alias.asname, PLAIN_IMPORT, True))
                else:
                    bindings.append(ImportBinding(alias.name, alias.name.split(".")[0], PLAIN_IMPORT))
        elif isinstance(node, ast.ImportFrom):
            base = "." * (node.level or 0) + (node.module or "")
            for alias in node.names:
                if alias.name == "*":
                    star.append(base)
                    continue
                path = f"{base}.{alias.name}" if base and not base.endswith(".") else base + alias.name
                bindings.append(ImportBinding(path, alias.asname or alias.name, FROM_IMPORT))
    return bindings, star


def _collect_call_assignments(module: ast.Module) -> List[Tuple[str, str]]:
    """(target, callee) pairs for `name = call(...)` and `with call(...) as name`."""
    found = []
    for node in ast.walk(module):
        if isinstance(node, (ast.Assign, ast.AnnAssign)) and isinstance(node.value, ast.Call):
            targets = node.targets if isinstance(node, ast.Assign) else [node.target]
            for target in targets:
                if isinstance(target, (ast.Name, ast.Attribute)):
                    found.append((node.lineno, dotted_name(target), dotted_name(node.value.func)))
        elif isinstance(node, (ast.With, ast.AsyncWith)):
            for item in node.items:
                if isinstance(item.context_expr, ast.Call) and isinstance(
                    item.optional_vars, (ast.Name, ast.Attribute)
                ):
                    found.append((node.lineno, dotted_name(item.optional_vars),
                                  dotted_name(item.context_expr.func)))
    found.sort()
    return [(target, callee) for _, target, callee in found]


def _line_offsets(text: str) -> Tuple[int, ...]:
    """Start offset of each line; line 1 starts after a byte order mark."""
    if not text:
        return ()
    offsets = [1 if text.startswith("\ufeff") else 0]
    for match in re.finditer("\n", text):
        if match.end() < len(text):
            offsets.append(match.end())
    return tuple(offsets)


# =============================================================================
# Operations
# =============================================================================

def decode_source(data: bytes, path: str, allow_fallback: bool = True) -> str:
    """
    Decode source bytes: declared/UTF-8 encoding first, latin-1 as fallback.

    A UTF-8 byte order mark is kept in the text so the result re-encodes to
    the original bytes.
    """
    try:
        encoding, _ = tokenize.detect_encoding(io.BytesIO(data).readline)
    except SyntaxError:
        encoding = "utf-8"
    if encoding == "utf-8-sig":
        encoding = "utf-8"
    try:
        return data.decode(encoding)
    except (UnicodeDecodeError, LookupError) as exc:
        if not allow_fallback:
            raise EncodingError(path, str(exc)) from exc
        logger.warning("%s: not valid %s, decoding as latin-1", path, encoding)
        return data.decode("latin-1")


def read_source(path: Path, display_path: Optional[str] = None,
                allow_fallback: bool = True) -> str:
    data = Path(path).read_bytes()
    return decode_source(data, display_path or str(path), allow_fallback)


def parse_module(source_text: str, path: str) -> ModuleTree:
    """
    Parse source text into a ModuleTree.

    Raises:
        ParseError: the text is not valid Python for the running interpreter
    """
    parse_text = source_text[1:] if source_text.startswith("\ufeff") else source_text
    try:
        module = ast.parse(parse_text, filename=path)
    except SyntaxError as exc:
        raise ParseError(path, exc.lineno, exc.msg) from exc
    except (ValueError, RecursionError, MemoryError) as exc:
        raise ParseError(path, None, str(exc) or type(exc).__name__) from exc

    source = _Source(parse_text)
    visitor = _DefinitionVisitor(source)
    visitor.visit(module)

    module_walker = _BodyWalker(source)
    module_walker.walk_block(module.body)

    imports, star = _collect_imports(module)
    return ModuleTree(
        path=path,
        imports=tuple(imports),
        functions=tuple(visitor.functions),
        classes=tuple(visitor.classes),
        raw_text=source_text,
        line_index=_line_offsets(source_text),
        star_imports=tuple(star),
        module_calls=tuple(module_walker.calls),
        call_assignments=tuple(_collect_call_assignments(module)),
    )


def extract_functions(tree: ModuleTree) -> List[SourceFunction]:
    """Module-level functions, methods and nested functions in source order."""
    return sorted(tree.functions, key=lambda f: (f.line_start, f.qualified_name))


def neighbor_lines(tree: ModuleTree, line: int) -> Tuple[Optional[str], Optional[str]]:
    """Raw text of the lines before and after `line`; None at file boundaries."""
    if not 1 <= line <= tree.line_count:
        raise OutOfRange(f"{tree.path}: line {line} outside 1..{tree.line_count}")
    before = tree.line_text(line - 1) if line > 1 else None
    after = tree.line_text(line + 1) if line < tree.line_count else None
    return before, after


def segments(identifier: str) -> List[str]:
    """Lowercase segments of an identifier split on `_`, non-alphanumerics and camelCase."""
    out = []
    for chunk in re.split(r"[^A-Za-z0-9]+", identifier):
        for piece in re.findall(r"[A-Z]+(?![a-z])|[A-Z]?[a-z0-9]+|[0-9]+", chunk):
            out.append(piece.lower())
    return out
