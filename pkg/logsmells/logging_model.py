"""
Logging Model
=============
Normalizes call sites into logging events, configuration statements,
experiment-tracker calls and print calls; profiles files by the logging
libraries they import; separates configuration-only functions.
"""

import ast
import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .registry import LibraryRegistry, VERB_METRIC, pattern_matches
from .source_model import CallSite, ImportBinding, LITERAL, ModuleTree, SourceFunction

CHANNEL_GENERAL = "general"
CHANNEL_TRACKER = "tracker"
CHANNEL_PRINT = "print"

GENERAL_PURPOSE = "general-purpose"
ML_SPECIFIC = "ml-specific"
HYBRID = "hybrid"

LEVELS = ("debug", "info", "warning", "warn", "error", "exception", "critical", "fatal")
LEVEL_METHODS = frozenset(LEVELS) | {"log"}

STEP_KEYWORDS = frozenset({"step", "global_step", "timestamp", "walltime", "epoch", "iteration"})
POSITIONAL_STEP_METHODS = {"log_metric": 3, "add_scalar": 3, "add_scalars": 3, "scalar": 3, "log_scalar": 3}
KEY_KEYWORDS = ("key", "name", "tag", "main_tag", "metric_name")

LOGGER_RECEIVERS = frozenset({"logger", "log", "_logger", "_log", "logging", "logs"})

_WORD = re.compile(r"[A-Za-z]+")


def aggregate_level(level: Optional[str]) -> Optional[str]:
    """`warn` counts as `warning` when levels are tallied together."""
    return "warning" if level == "warn" else level


# =============================================================================
# Domain Types
# =============================================================================

@dataclass(frozen=True)
class LoggingCall:
    """A call site normalized to one logging channel."""
    site: CallSite
    channel: str
    level: Optional[str]
    tracker_verb: Optional[str]
    library: str
    metric_key: Optional[str]
    has_step: bool
    message_words: Tuple[str, ...]
    resolved_path: str = ""
    is_config: bool = False
    metric_keys: Tuple[str, ...] = ()
    redirected: bool = False

    @property
    def line(self) -> int:
        return self.site.line

    @property
    def is_event(self) -> bool:
        return not self.is_config

    @property
    def is_metric(self) -> bool:
        return self.channel == CHANNEL_TRACKER and self.tracker_verb == VERB_METRIC and not self.is_config


@dataclass(frozen=True)
class FileLibraryProfile:
    libraries_used: FrozenSet[str]
    library_type: Optional[str]

    @property
    def is_empty(self) -> bool:
        return not self.libraries_used


@dataclass(frozen=True)
class ClassifiedFunction:
    """A SourceFunction paired with its classified logging calls."""
    function: SourceFunction
    calls: Tuple[LoggingCall, ...]

    @property
    def library_calls(self) -> Tuple[LoggingCall, ...]:
        return tuple(c for c in self.calls if c.channel != CHANNEL_PRINT)

    @property
    def event_calls(self) -> Tuple[LoggingCall, ...]:
        return tuple(c for c in self.library_calls if not c.is_config)

    @property
    def print_calls(self) -> Tuple[LoggingCall, ...]:
        return tuple(c for c in self.calls if c.channel == CHANNEL_PRINT)

    @property
    def is_kept(self) -> bool:
        return bool(self.event_calls)


@dataclass(frozen=True)
class ModuleLogging:
    """Everything the logging model knows about one file."""
    tree: ModuleTree
    profile: FileLibraryProfile
    functions: Tuple[ClassifiedFunction, ...]
    module_calls: Tuple[LoggingCall, ...]

    def all_calls(self) -> List[LoggingCall]:
        calls = list(self.module_calls)
        for fn in self.functions:
            calls.extend(fn.calls)
        return sorted(calls, key=lambda c: (c.site.line, c.site.text))


# =============================================================================
# Operations
# =============================================================================

def detect_logging_imports(tree: ModuleTree, reg: LibraryRegistry) -> FileLibraryProfile:
    """Profile a file by the registry libraries it imports."""
    libraries = set()
    for module in tree.imported_modules():
        library = reg.library_of(module)
        if library is not None:
            libraries.add(library)
    general = any(reg.is_general(lib) for lib in libraries)
    ml = any(reg.is_ml(lib) for lib in libraries)
    if general and ml:
        library_type = HYBRID
    elif ml:
        library_type = ML_SPECIFIC
    elif general:
        library_type = GENERAL_PURPOSE
    else:
        library_type = None
    return FileLibraryProfile(frozenset(libraries), library_type)


def is_config_call(call: LoggingCall, reg: LibraryRegistry) -> bool:
    """True iff the resolved callee matches a configuration pattern."""
    if call.channel == CHANNEL_PRINT:
        return False
    path = call.resolved_path or call.site.callee_path
    return any(pattern_matches(p, path) for p in reg.config_call_patterns)


def classify_call(site: CallSite, imports: Sequence[ImportBinding], reg: LibraryRegistry,
                  aliases: Optional[Dict[str, str]] = None) -> Optional[LoggingCall]:
    """Classify one call site given the file's import bindings."""
    return CallResolver(imports, reg, aliases=aliases).classify(site)


def filter_functions(functions: Sequence[ClassifiedFunction],
                     reg: Optional[LibraryRegistry] = None
                     ) -> Tuple[List[ClassifiedFunction], List[ClassifiedFunction]]:
    """
    Split functions into kept (at least one non-config library call) and
    dropped (configuration only, or no logging at all).

    With a registry, configuration calls are re-matched against its patterns;
    without one, the flags set at classification time are used.
    """
    kept = []
    dropped = []
    for fn in functions:
        if reg is None:
            is_kept = fn.is_kept
        else:
            is_kept = any(not is_config_call(c, reg) for c in fn.library_calls)
        (kept if is_kept else dropped).append(fn)
    return kept, dropped


def classify_module(tree: ModuleTree, reg: LibraryRegistry) -> ModuleLogging:
    """Profile a file and classify every call in it."""
    profile = detect_logging_imports(tree, reg)
    resolver = CallResolver(tree.imports, reg, tree.call_assignments, profile)
    functions = tuple(classify_function(fn, resolver) for fn in tree.functions)
    module_calls = tuple(
        call for call in (resolver.classify(site) for site in tree.module_calls) if call is not None
    )
    return ModuleLogging(tree, profile, functions, module_calls)


def classify_function(fn: SourceFunction, resolver: "CallResolver") -> ClassifiedFunction:
    calls = tuple(c for c in (resolver.classify(site) for site in fn.calls) if c is not None)
    return ClassifiedFunction(fn, calls)


# =============================================================================
# Resolution
# =============================================================================

def _split_path(path: str) -> List[str]:
    return path.split(".")


def _bare(segment: str) -> str:
    return segment.split("(")[0].split("[")[0]


def _is_logger_receiver(receiver: str) -> bool:
    last = _bare(receiver.rsplit(".", 1)[-1])
    if receiver.endswith("getLogger()") or receiver.endswith("get_logger()"):
        return True
    lowered = last.lower()
    return lowered in LOGGER_RECEIVERS or lowered.endswith("logger")


def _literal_value(text: str) -> Optional[str]:
    try:
        value = ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return None
    return value if isinstance(value, str) else None


def _template(parts) -> Optional[str]:
    if not parts:
        return None
    if not any(p.kind == LITERAL and p.text for p in parts):
        return None
    return "".join(p.text if p.kind == LITERAL else "{}" for p in parts)


class CallResolver:
    """Resolves callee paths through import bindings and receiver assignments."""

    def __init__(self, imports: Sequence[ImportBinding], reg: LibraryRegistry,
                 call_assignments: Sequence[Tuple[str, str]] = (),
                 profile: Optional[FileLibraryProfile] = None,
                 aliases: Optional[Dict[str, str]] = None):
        self.reg = reg
        self.bindings = {b.bound_name: b.target for b in imports}
        self.aliases: Dict[str, str] = {}
        for target, callee in call_assignments:
            resolved = self.resolve(callee)
            if resolved and reg.library_of(resolved):
                self.aliases[target] = resolved + "()"
        if aliases:
            self.aliases.update(aliases)
        libraries = profile.libraries_used if profile else frozenset()
        self.file_ml_libraries = sorted(lib for lib in libraries if reg.is_ml(lib))

    def resolve(self, path: str) -> Optional[str]:
        parts = _split_path(path)
        for k in range(len(parts), 0, -1):
            prefix = ".".join(parts[:k])
            if prefix in self.aliases:
                return ".".join([self.aliases[prefix]] + parts[k:])
        head = parts[0]
        name = _bare(head)
        if name != head and name in self.aliases:
            return ".".join([self.aliases[name] + head[len(name):]] + parts[1:])
        if name in self.bindings:
            return ".".join([self.bindings[name] + head[len(name):]] + parts[1:])
        return None

    def _hinted_library(self, method: str) -> Optional[str]:
        if method not in self.reg.method_hints or not self.file_ml_libraries:
            return None
        hint = self.reg.method_hints[method]
        if hint in self.file_ml_libraries:
            return hint
        return self.file_ml_libraries[0]

    def classify(self, site: CallSite) -> Optional[LoggingCall]:
        path = site.callee_path
        if path == "print" and "print" not in self.bindings:
            return self._print_call(site)

        method = _bare(site.method)
        resolved = self.resolve(path)
        library = self.reg.library_of(resolved) if resolved else None

        if library is None and "." in path:
            receiver = path.rsplit(".", 1)[0]
            is_config_method = any(
                "." not in p and p == method for p in self.reg.config_call_patterns
            )
            if (method in LEVEL_METHODS or is_config_method) and _is_logger_receiver(receiver):
                library = "logging"
                resolved = path
            else:
                library = self._hinted_library(method)
                resolved = path if library else None
        if library is None:
            return None

        if self.reg.is_general(library):
            return self._general_call(site, library, resolved, method)
        return self._tracker_call(site, library, resolved, method)

    def _words(self, site: CallSite) -> Tuple[str, ...]:
        words = []
        for part in site.string_parts:
            if part.kind == LITERAL:
                words.extend(_WORD.findall(part.text))
        return tuple(words)

    def _print_call(self, site: CallSite) -> LoggingCall:
        return LoggingCall(
            site=site,
            channel=CHANNEL_PRINT,
            level=None,
            tracker_verb=None,
            library="print",
            metric_key=None,
            has_step=False,
            message_words=self._words(site),
            resolved_path="print",
            redirected="file" in site.kwarg_map,
        )

    def _general_call(self, site, library, resolved, method) -> Optional[LoggingCall]:
        is_config = any(pattern_matches(p, resolved) for p in self.reg.config_call_patterns)
        level = None
        if method == "log":
            level = self._level_argument(site)
        elif method in LEVELS:
            level = method
        if level is None and not is_config:
            return None
        if is_config:
            level = None
        return LoggingCall(
            site=site,
            channel=CHANNEL_GENERAL,
            level=level,
            tracker_verb=None,
            library=library,
            metric_key=None,
            has_step=False,
            message_words=self._words(site),
            resolved_path=resolved,
            is_config=is_config,
        )

    @staticmethod
    def _level_argument(site: CallSite) -> str:
        if site.args:
            name = site.args[0].rsplit(".", 1)[-1].lower()
            if name in LEVELS:
                return name
        return "info"

    def _tracker_call(self, site, library, resolved, method) -> LoggingCall:
        is_config = any(pattern_matches(p, resolved) for p in self.reg.config_call_patterns)
        verb = self.reg.verb_for(resolved)
        keys: Tuple[str, ...] = ()
        has_step = False
        if verb == VERB_METRIC and not is_config:
            keys = self._metric_keys(site)
            has_step = self._has_step(site, library, method)
        return LoggingCall(
            site=site,
            channel=CHANNEL_TRACKER,
            level=None,
            tracker_verb=verb,
            library=library,
            metric_key=keys[0] if keys else None,
            has_step=has_step,
            message_words=self._words(site),
            resolved_path=resolved,
            is_config=is_config,
            metric_keys=keys,
        )

    @staticmethod
    def _metric_keys(site: CallSite) -> Tuple[str, ...]:
        if site.arg_kinds and site.arg_kinds[0] == "dict":
            return tuple(dict.fromkeys(item.key for item in site.dict_items))
        if site.arg_parts:
            key = _template(site.arg_parts[0])
            if key is not None:
                return (key,)
        kwargs = site.kwarg_map
        for name in KEY_KEYWORDS:
            if name in kwargs:
                value = _literal_value(kwargs[name])
                if value is not None:
                    return (value,)
        return ()

    @staticmethod
    def _has_step(site: CallSite, library: str, method: str) -> bool:
        if STEP_KEYWORDS & set(site.kwarg_map):
            return True
        needed = POSITIONAL_STEP_METHODS.get(method)
        if needed is not None and len(site.args) >= needed:
            return True
        return library == "wandb" and method == "log" and len(site.args) >= 2
