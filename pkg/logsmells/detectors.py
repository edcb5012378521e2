"""
Smell Detectors
===============
Twelve rule engines, one per logging smell. Each maps a classified function
plus its file context to zero or more findings with a rule-assigned
confidence tier. Detection never looks beyond one function and its file.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .logging_model import (
    CHANNEL_GENERAL,
    CHANNEL_PRINT,
    CHANNEL_TRACKER,
    CallResolver,
    ClassifiedFunction,
    FileLibraryProfile,
    LoggingCall,
    ModuleLogging,
)
from .models import Confidence, Evidence, SmellFinding, SmellKind
from .registry import (
    STOPWORDS,
    VERB_PARAM,
    LibraryRegistry,
    Lexicons,
    lexicon_hits,
    split_groups,
)
from .source_model import ModuleTree, segments

FAILURE_WORDS = frozenset({
    "error", "errors", "failed", "fail", "fails", "failure", "exception", "fatal", "crash", "crashed",
})
SUCCESS_WORDS = frozenset({"success", "successful", "successfully", "completed", "ok", "done"})
NEGATION_WORDS = frozenset({
    "not", "no", "never", "without", "unable", "cannot", "couldn", "didn", "wasn", "isn", "doesn", "won",
})
ERROR_VOCABULARY = frozenset({
    "error", "errors", "warning", "warn", "failed", "fail", "failure", "exception", "fatal",
    "critical", "crash", "crashed", "abort", "aborted", "missing", "invalid",
})
SETUP_SEGMENTS = frozenset({
    "setup", "set", "config", "configure", "configuration", "init", "initialize", "logger", "logging", "log",
})
LOGGING_ROUTINE_SEGMENTS = frozenset({"log", "logging", "record", "track", "tracking"})
VALUE_KEYWORDS = ("value", "scalar_value", "data", "val")

PRIORITY: Tuple[SmellKind, ...] = (
    SmellKind.SENSITIVE_DATA,
    SmellKind.METRIC_OVERWRITE,
    SmellKind.MISSING_HYPERPARAMETER,
    SmellKind.MISROUTED_METRIC,
    SmellKind.INCORRECT_LEVEL,
    SmellKind.MISLEADING,
    SmellKind.AMBIGUOUS_METRICS,
    SmellKind.HEAVY_DATA,
    SmellKind.LOG_WITHOUT_CONTEXT,
    SmellKind.PRINT_BASED_METRICS,
    SmellKind.PRINT_LOGGING,
    SmellKind.MISCONFIGURED,
)


@dataclass(frozen=True)
class FileContext:
    """File-level facts shared by every detector run on the file's functions."""
    tree: ModuleTree
    profile: FileLibraryProfile
    lexicons: Lexicons
    registry: LibraryRegistry
    file_calls: Tuple[LoggingCall, ...] = ()
    resolver: Optional[CallResolver] = None

    @property
    def path(self) -> str:
        return self.tree.path

    @classmethod
    def from_module(cls, module: ModuleLogging, registry: LibraryRegistry,
                    lexicons: Lexicons) -> "FileContext":
        resolver = CallResolver(module.tree.imports, registry,
                                module.tree.call_assignments, module.profile)
        return cls(module.tree, module.profile, lexicons, registry,
                   tuple(module.all_calls()), resolver)


# =============================================================================
# Helpers
# =============================================================================

def _finding(kind: SmellKind, confidence: Confidence, fn: ClassifiedFunction, ctx: FileContext,
             line: int, lines: Iterable[int], rationale: str,
             hits: Iterable[str] = ()) -> SmellFinding:
    cited = sorted({n for n in lines if fn.function.line_start <= n <= fn.function.line_end} | {line})
    return SmellFinding(
        kind=kind,
        confidence=confidence,
        function=fn.function.qualified_name,
        file=ctx.path,
        line=line,
        evidence=Evidence(tuple(cited), rationale),
        lexicon_hits=tuple(sorted(set(hits))),
        lexicon_version=ctx.lexicons.version,
    )


def _call_lines(call: LoggingCall) -> range:
    return range(call.site.line, call.site.end_line + 1)


def _is_general_event(call: LoggingCall) -> bool:
    return call.channel == CHANNEL_GENERAL and not call.is_config and call.level is not None


def _last_segment(path: str) -> str:
    return path.rsplit(".", 1)[-1].split("(")[0].split("[")[0]


def _lower(words: Iterable[str]) -> List[str]:
    return [w.lower() for w in words]


def _stem(word: str) -> str:
    word = word.lower()
    for _ in range(2):
        for suffix in ("ing", "ed", "es", "s", "e"):
            if word.endswith(suffix) and len(word) - len(suffix) >= 3:
                word = word[: -len(suffix)]
                break
    return word


def _bare_short_name(call: LoggingCall, index: int = 0) -> Optional[str]:
    site = call.site
    if len(site.arg_kinds) <= index or site.arg_kinds[index] != "name":
        return None
    name = site.args[index]
    if len(name) <= 2 and name not in site.handler_names:
        return name
    return None


# =============================================================================
# ML-LOG-001 Ambiguous metrics logging
# =============================================================================

def _metric_pairs(call: LoggingCall) -> List[Tuple[str, Tuple[str, ...]]]:
    site = call.site
    if site.arg_kinds and site.arg_kinds[0] == "dict":
        return [(item.key, item.value_identifiers) for item in site.dict_items]
    if call.metric_key is None:
        return []
    if len(site.arg_identifiers) >= 2:
        return [(call.metric_key, site.arg_identifiers[1])]
    for name, idents in site.kwarg_identifiers:
        if name in VALUE_KEYWORDS:
            return [(call.metric_key, idents)]
    return []


def detect_ambiguous_metrics(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    findings = []
    for call in fn.calls:
        if call.is_metric:
            contradiction = None
            for key, value_idents in _metric_pairs(call):
                key_groups = split_groups([key])
                value_groups = split_groups(value_idents)
                if key_groups and value_groups and not key_groups & value_groups:
                    contradiction = (key, sorted(key_groups), sorted(value_groups))
                    break
            if contradiction:
                key, kg, vg = contradiction
                findings.append(_finding(
                    SmellKind.AMBIGUOUS_METRICS, Confidence.HIGH, fn, ctx, call.line, _call_lines(call),
                    f"metric key '{key}' names the {'/'.join(kg)} split but the logged value "
                    f"comes from {'/'.join(vg)}",
                ))
                continue
            short_keys = [k for k in call.metric_keys if len(k.strip()) <= 2]
            bare = _bare_short_name(call, 1) if call.metric_key is None else None
            if not call.metric_keys and bare is None:
                bare = _bare_short_name(call, 0)
            if short_keys or bare:
                label = short_keys[0] if short_keys else bare
                findings.append(_finding(
                    SmellKind.AMBIGUOUS_METRICS, Confidence.MEDIUM, fn, ctx, call.line, _call_lines(call),
                    f"metric logged as '{label}' carries no description of what it measures",
                ))
        elif _is_general_event(call) and not call.message_words:
            name = _bare_short_name(call)
            if name:
                findings.append(_finding(
                    SmellKind.AMBIGUOUS_METRICS, Confidence.MEDIUM, fn, ctx, call.line, _call_lines(call),
                    f"logs bare value '{name}' with no label or message",
                ))
    return findings


# =============================================================================
# ML-LOG-002 Misleading logging
# =============================================================================

def _branch_tokens(fn: ClassifiedFunction, statements) -> Dict[str, str]:
    """stem -> 'call' | 'assign' for names used in the given statements."""
    tokens: Dict[str, str] = {}
    for stmt in statements:
        for name in stmt.call_names:
            for seg in segments(_last_segment(name)):
                tokens.setdefault(_stem(seg), "call")
        for name in stmt.assigned_names:
            for seg in segments(_last_segment(name)):
                tokens.setdefault(_stem(seg), "assign")
    return tokens


def detect_misleading(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    findings = []
    source = fn.function
    for call in fn.calls:
        if not _is_general_event(call) or call.site.dynamic_message:
            continue
        stmt = source.statement(call.site.statement)
        if stmt is None or stmt.kind != "Expr":
            continue
        following = [
            s for s in source.body
            if s.parent == stmt.parent and s.branch == stmt.branch and s.position > stmt.position
        ]
        if not following or following[0].kind != "If":
            continue
        conditional = following[0]
        stems = {
            _stem(w) for w in call.message_words
            if w.lower() not in STOPWORDS and len(w) >= 3
        }
        if not stems:
            continue

        branches = {
            "body": fn.function.descendants(conditional.index, "body"),
            "orelse": fn.function.descendants(conditional.index, "orelse"),
        }
        after = []
        for s in following[1:]:
            after.append(s)
            after.extend(source.descendants(s.index))

        for branch, statements in branches.items():
            tokens = _branch_tokens(fn, statements)
            shared = sorted(stems & set(tokens))
            if not shared:
                continue
            other = "orelse" if branch == "body" else "body"
            elsewhere = set(_branch_tokens(fn, branches[other])) | set(_branch_tokens(fn, after))
            exclusive_verbs = [t for t in shared if tokens[t] == "call" and t not in elsewhere]
            confidence = Confidence.MEDIUM if exclusive_verbs else Confidence.LOW
            matched = [s for s in statements if stems & set(_branch_tokens(fn, [s]))]
            lines = [call.line, conditional.line] + [s.line for s in matched]
            findings.append(_finding(
                SmellKind.MISLEADING, confidence, fn, ctx, call.line, lines,
                f"message announces '{', '.join(shared)}' unconditionally, but the matching "
                f"operation only runs inside the conditional at line {conditional.line}",
            ))
            break
    return findings


# =============================================================================
# ML-LOG-003 Heavy data logging
# =============================================================================

def _heavy(paths: Iterable[str], ctx: FileContext) -> List[str]:
    found = []
    for path in paths:
        name = _last_segment(path)
        if lexicon_hits([name], ctx.lexicons.heavy_ops):
            found.append(name)
    return found


def detect_heavy_data(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    findings = []
    heavy_ops = ctx.lexicons.heavy_ops
    for call in fn.library_calls:
        if call.is_config:
            continue
        ops = _heavy(call.site.nested_calls, ctx)
        if not ops:
            continue
        in_loop = call.site.in_loop
        confidence = Confidence.HIGH if len(ops) >= 2 or in_loop else Confidence.MEDIUM
        where = " inside a loop" if in_loop else ""
        findings.append(_finding(
            SmellKind.HEAVY_DATA, confidence, fn, ctx, call.line, _call_lines(call),
            f"logging call computes {len(ops)} heavy operation(s){where}: {', '.join(ops)}",
            lexicon_hits(ops, heavy_ops),
        ))

    name_segments = set(segments(fn.function.name))
    if name_segments & LOGGING_ROUTINE_SEGMENTS:
        logged = {ident for call in fn.event_calls for ident in call.site.identifiers}
        feeding = []
        for stmt in fn.function.body:
            targets = {_last_segment(n) for n in stmt.assigned_names}
            if targets & logged:
                ops = _heavy(stmt.call_names, ctx)
                if ops:
                    feeding.append((stmt, ops))
        total = sum(len(ops) for _, ops in feeding)
        if total >= 3:
            names = [op for _, ops in feeding for op in ops]
            findings.append(_finding(
                SmellKind.HEAVY_DATA, Confidence.MEDIUM, fn, ctx, feeding[0][0].line,
                [s.line for s, _ in feeding],
                f"logging routine '{fn.function.name}' computes {total} heavy values only to log them",
                lexicon_hits(names, heavy_ops),
            ))
    return findings


# =============================================================================
# ML-LOG-004 Misconfigured logging
# =============================================================================

def _is_bare_get_logger(call: LoggingCall) -> bool:
    return _last_segment(call.site.callee_path) in ("getLogger", "get_logger")


def _is_setup_function(fn: ClassifiedFunction) -> bool:
    return bool(set(segments(fn.function.name)) & SETUP_SEGMENTS)


def _has_business_logic(fn: ClassifiedFunction, ctx: FileContext) -> bool:
    logging_sites = {call.site for call in fn.calls}
    for site in fn.function.calls:
        if site in logging_sites:
            continue
        resolved = ctx.resolver.resolve(site.callee_path) if ctx.resolver else None
        if resolved and ctx.registry.library_of(resolved):
            continue
        last = _last_segment(site.callee_path)
        if last.endswith("Handler") or last.endswith("Formatter") or last == "setFormatter":
            continue
        return True
    return False


def detect_misconfigured(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    findings = []
    for call in fn.calls:
        if not call.is_config or _is_bare_get_logger(call):
            continue
        callee = call.site.callee_path
        if call.site.guard_depth > 0:
            findings.append(_finding(
                SmellKind.MISCONFIGURED, Confidence.HIGH, fn, ctx, call.line, _call_lines(call),
                f"'{callee}' configures logging conditionally inside '{fn.function.name}'",
            ))
        elif not _is_setup_function(fn) and _has_business_logic(fn, ctx):
            findings.append(_finding(
                SmellKind.MISCONFIGURED, Confidence.MEDIUM, fn, ctx, call.line, _call_lines(call),
                f"'{callee}' configures logging inside '{fn.function.name}', which also runs program logic",
            ))
    return findings


# =============================================================================
# ML-LOG-005 Misrouted metric logging
# =============================================================================

def detect_misrouted_metric(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    tracked_here = [c for c in fn.calls if c.is_metric]
    tracked_in_file = tracked_here or [c for c in ctx.file_calls if c.is_metric]
    if not tracked_in_file:
        return []
    findings = []
    for call in fn.calls:
        if not (_is_general_event(call) or (call.channel == CHANNEL_PRINT and not call.redirected)):
            continue
        hits = lexicon_hits(list(call.message_words) + list(call.site.identifiers),
                            ctx.lexicons.metric_terms)
        if not hits:
            continue
        channel = "print" if call.channel == CHANNEL_PRINT else "a general-purpose logger"
        if tracked_here:
            findings.append(_finding(
                SmellKind.MISROUTED_METRIC, Confidence.HIGH, fn, ctx, call.line,
                list(_call_lines(call)) + [tracked_here[0].line],
                f"metric(s) {', '.join(hits)} go to {channel} while this function records "
                f"tracker metrics at line {tracked_here[0].line}",
                hits,
            ))
        else:
            findings.append(_finding(
                SmellKind.MISROUTED_METRIC, Confidence.MEDIUM, fn, ctx, call.line, _call_lines(call),
                f"metric(s) {', '.join(hits)} go to {channel} while this file records tracker metrics",
                hits,
            ))
    return findings


# =============================================================================
# ML-LOG-006 Metric overwrite
# =============================================================================

def detect_metric_overwrite(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    findings = []
    metric_calls = [c for c in fn.calls if c.is_metric]
    by_key: Dict[str, List[LoggingCall]] = {}
    for call in metric_calls:
        for key in call.metric_keys:
            if "{}" not in key:
                by_key.setdefault(key, []).append(call)

    overwritten: Set[int] = set()
    for key, calls in sorted(by_key.items()):
        if len(calls) < 2 or any(c.has_step for c in calls):
            continue
        overwritten.update(id(c) for c in calls)
        lines = [n for c in calls for n in _call_lines(c)]
        findings.append(_finding(
            SmellKind.METRIC_OVERWRITE, Confidence.HIGH, fn, ctx, calls[1].line, lines,
            f"metric '{key}' is logged {len(calls)} times without a step; only the last value survives",
        ))

    for call in metric_calls:
        if id(call) in overwritten or call.has_step or not call.site.in_loop:
            continue
        key = call.metric_key or "<dynamic>"
        findings.append(_finding(
            SmellKind.METRIC_OVERWRITE, Confidence.MEDIUM, fn, ctx, call.line, _call_lines(call),
            f"metric '{key}' is logged inside a loop without an explicit step",
        ))
    return findings


# =============================================================================
# ML-LOG-007 Log without context
# =============================================================================

def detect_log_without_context(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    findings = []
    generic = ctx.lexicons.generic_messages
    for call in fn.calls:
        if not _is_general_event(call):
            continue
        site = call.site
        if not site.args and "msg" not in site.kwarg_map:
            continue
        words = _lower(call.message_words)
        if not words:
            kind = site.arg_kinds[0] if site.arg_kinds else "other"
            if kind in ("name", "attribute", "fstring", "str-of-name"):
                payload = site.args[0]
                what = "exception object" if any(h in payload for h in site.handler_names) else "variable"
                findings.append(_finding(
                    SmellKind.LOG_WITHOUT_CONTEXT, Confidence.HIGH, fn, ctx, call.line, _call_lines(call),
                    f"logs bare {what} '{payload}' with no descriptive message",
                ))
            continue
        matched = [w for w in words if w in generic]
        if not matched:
            continue
        others = [w for w in words if w not in generic and w not in STOPWORDS]
        if len(others) < 2:
            findings.append(_finding(
                SmellKind.LOG_WITHOUT_CONTEXT, Confidence.MEDIUM, fn, ctx, call.line, _call_lines(call),
                f"generic message '{call.site.literal_text.strip()}' says nothing about what happened",
                matched,
            ))
    return findings


# =============================================================================
# ML-LOG-008 Missing hyperparameter logging
# =============================================================================

def _logs_params(fn: ClassifiedFunction) -> bool:
    for call in fn.calls:
        if call.channel != CHANNEL_TRACKER:
            continue
        if call.tracker_verb == VERB_PARAM and not call.is_config:
            return True
        if call.is_config and "config" in call.site.kwarg_map:
            return True
    return False


def detect_missing_hyperparam(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    metric_calls = [c for c in fn.calls if c.is_metric]
    if not metric_calls or _logs_params(fn):
        return []
    terms = ctx.lexicons.hyperparam_terms
    first_seen: Dict[str, int] = {}

    def note(identifier: str, line: int):
        for term in lexicon_hits([identifier], terms):
            if term not in first_seen or line < first_seen[term]:
                first_seen[term] = line

    source = fn.function
    for param in source.params:
        note(param, source.line_start)
    for stmt in source.body:
        for name in stmt.assigned_names:
            note(_last_segment(name), stmt.line)
    for item in source.string_keys:
        note(item.key, item.line)

    if len(first_seen) < 2:
        return []
    confidence = Confidence.HIGH if len(first_seen) >= 4 else Confidence.MEDIUM
    hits = sorted(first_seen)
    return [_finding(
        SmellKind.MISSING_HYPERPARAMETER, confidence, fn, ctx, metric_calls[0].line,
        list(first_seen.values()) + [metric_calls[0].line],
        f"function tracks metrics and uses hyperparameters ({', '.join(hits)}) "
        f"but never logs them to the tracker",
        hits,
    )]


# =============================================================================
# ML-LOG-009 Print-based metrics / ML-LOG-010 Print logging
# =============================================================================

def _print_metric_hits(call: LoggingCall, ctx: FileContext) -> Tuple[str, ...]:
    return lexicon_hits(list(call.message_words) + list(call.site.identifiers),
                        ctx.lexicons.metric_terms)


def detect_print_metrics(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    findings = []
    tracker = any(ctx.registry.is_ml(lib) for lib in ctx.profile.libraries_used)
    for call in fn.print_calls:
        hits = _print_metric_hits(call, ctx)
        if not hits:
            continue
        if tracker:
            confidence = Confidence.HIGH
            rationale = f"metric(s) {', '.join(hits)} printed although the file imports an experiment tracker"
        else:
            confidence = Confidence.MEDIUM
            rationale = f"metric(s) {', '.join(hits)} printed instead of tracked"
        findings.append(_finding(
            SmellKind.PRINT_BASED_METRICS, confidence, fn, ctx, call.line, _call_lines(call),
            rationale, hits,
        ))
    return findings


def detect_print_logging(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    if ctx.profile.is_empty:
        return []
    findings = []
    vocabulary = ERROR_VOCABULARY | ctx.lexicons.generic_messages
    for call in fn.print_calls:
        if call.redirected or _print_metric_hits(call, ctx):
            continue
        if call.site.in_exception_handler:
            findings.append(_finding(
                SmellKind.PRINT_LOGGING, Confidence.HIGH, fn, ctx, call.line, _call_lines(call),
                "exception reported with print() in a file that has a logging framework",
            ))
            continue
        matched = sorted({w for w in _lower(call.message_words) if w in vocabulary})
        if matched:
            findings.append(_finding(
                SmellKind.PRINT_LOGGING, Confidence.MEDIUM, fn, ctx, call.line, _call_lines(call),
                f"status message ({', '.join(matched)}) printed instead of logged",
                matched,
            ))
    return findings


# =============================================================================
# ML-LOG-011 Logging sensitive data
# =============================================================================

def detect_sensitive(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    findings = []
    terms = ctx.lexicons.sensitive_terms
    params = set(fn.function.params)

    sensitive_dicts: Dict[str, List[Tuple[str, int]]] = {}
    for binding in fn.function.dict_bindings:
        if lexicon_hits([binding.key], terms):
            sensitive_dicts.setdefault(binding.name, []).append((binding.key, binding.line))

    for call in fn.calls:
        if call.is_config:
            continue
        site = call.site
        high_hits: Set[str] = set()
        medium_hits: Set[str] = set()
        lines = list(_call_lines(call))
        reasons = []

        names = list(site.identifiers) + [k for k, _ in site.kwargs if k != "**"]
        for ident in names:
            hits = lexicon_hits([ident], terms)
            if not hits:
                continue
            if ident in params:
                medium_hits.update(hits)
                reasons.append(f"parameter '{ident}'")
            else:
                high_hits.update(hits)
                reasons.append(f"'{ident}'")
        for item in site.dict_items:
            hits = lexicon_hits([item.key], terms)
            if hits:
                high_hits.update(hits)
                lines.append(item.line)
                reasons.append(f"key '{item.key}'")

        wholesale = set(site.identifiers) if (
            call.tracker_verb == VERB_PARAM or call.channel in (CHANNEL_GENERAL, CHANNEL_PRINT)
        ) else set()
        for name in sorted(wholesale & set(sensitive_dicts)):
            for key, line in sensitive_dicts[name]:
                high_hits.update(lexicon_hits([key], terms))
                lines.append(line)
            keys = ", ".join(k for k, _ in sensitive_dicts[name])
            reasons.append(f"dict '{name}' holding {keys}")

        if not high_hits and not medium_hits:
            continue
        confidence = Confidence.HIGH if high_hits else Confidence.MEDIUM
        findings.append(_finding(
            SmellKind.SENSITIVE_DATA, confidence, fn, ctx, call.line, lines,
            f"sensitive data reaches {call.channel} output: {'; '.join(reasons)}",
            high_hits | medium_hits,
        ))
    return findings


# =============================================================================
# ML-LOG-012 Incorrect log level
# =============================================================================

def detect_incorrect_level(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    findings = []
    for call in fn.calls:
        if not _is_general_event(call):
            continue
        words = set(_lower(call.message_words))
        level = call.level
        if level in ("info", "debug"):
            if call.site.in_exception_handler:
                findings.append(_finding(
                    SmellKind.INCORRECT_LEVEL, Confidence.HIGH, fn, ctx, call.line, _call_lines(call),
                    f"exception handled and reported at {level} level",
                ))
            elif words & FAILURE_WORDS:
                hits = sorted(words & FAILURE_WORDS)
                findings.append(_finding(
                    SmellKind.INCORRECT_LEVEL, Confidence.MEDIUM, fn, ctx, call.line, _call_lines(call),
                    f"failure ({', '.join(hits)}) reported at {level} level",
                    hits,
                ))
        elif level in ("error", "critical", "fatal"):
            if words & SUCCESS_WORDS and not words & NEGATION_WORDS:
                hits = sorted(words & SUCCESS_WORDS)
                findings.append(_finding(
                    SmellKind.INCORRECT_LEVEL, Confidence.LOW, fn, ctx, call.line, _call_lines(call),
                    f"success ({', '.join(hits)}) reported at {level} level",
                    hits,
                ))
    return findings


# =============================================================================
# Orchestration
# =============================================================================

Detector = Callable[[ClassifiedFunction, FileContext], List[SmellFinding]]

DETECTORS: Dict[SmellKind, Detector] = {
    SmellKind.AMBIGUOUS_METRICS: detect_ambiguous_metrics,
    SmellKind.MISLEADING: detect_misleading,
    SmellKind.HEAVY_DATA: detect_heavy_data,
    SmellKind.MISCONFIGURED: detect_misconfigured,
    SmellKind.MISROUTED_METRIC: detect_misrouted_metric,
    SmellKind.METRIC_OVERWRITE: detect_metric_overwrite,
    SmellKind.LOG_WITHOUT_CONTEXT: detect_log_without_context,
    SmellKind.MISSING_HYPERPARAMETER: detect_missing_hyperparam,
    SmellKind.PRINT_BASED_METRICS: detect_print_metrics,
    SmellKind.PRINT_LOGGING: detect_print_logging,
    SmellKind.SENSITIVE_DATA: detect_sensitive,
    SmellKind.INCORRECT_LEVEL: detect_incorrect_level,
}

PRINT_DETECTORS = (SmellKind.PRINT_BASED_METRICS, SmellKind.PRINT_LOGGING)


def applicable_detectors(fn: ClassifiedFunction) -> List[SmellKind]:
    """Kept functions get every rule; print-only functions the print rules; all get config checks."""
    if fn.is_kept:
        return list(SmellKind)
    kinds = [SmellKind.MISCONFIGURED]
    if fn.print_calls:
        kinds = list(PRINT_DETECTORS) + kinds
    return kinds


def run_all(fn: ClassifiedFunction, ctx: FileContext) -> List[SmellFinding]:
    """Union of the applicable detectors, sorted by (file, line, kind)."""
    findings = []
    for kind in applicable_detectors(fn):
        findings.extend(DETECTORS[kind](fn, ctx))
    return sorted(findings, key=SmellFinding.sort_key)


def analyze_module(module: ModuleLogging, registry: LibraryRegistry,
                   lexicons: Lexicons) -> List[SmellFinding]:
    ctx = FileContext.from_module(module, registry, lexicons)
    findings = []
    for fn in module.functions:
        findings.extend(run_all(fn, ctx))
    return sorted(findings, key=SmellFinding.sort_key)


def _priority_key(finding: SmellFinding) -> Tuple:
    return (PRIORITY.index(finding.kind), -finding.confidence.rank, finding.line,
            finding.evidence.lines, finding.evidence.rationale, finding.lexicon_hits)


def primary_label(findings: Sequence[SmellFinding]) -> Optional[SmellFinding]:
    """Single finding by fixed smell priority, then confidence, then lowest line."""
    if not findings:
        return None
    return min(findings, key=_priority_key)


def primary_per_function(findings: Sequence[SmellFinding]) -> List[SmellFinding]:
    grouped: Dict[str, List[SmellFinding]] = {}
    for finding in findings:
        grouped.setdefault(finding.function_id, []).append(finding)
    primaries = [primary_label(group) for group in grouped.values()]
    return sorted((p for p in primaries if p is not None), key=SmellFinding.sort_key)
