"""
Corpus Ingest
=============
Walks local repository clones, keeps the Python files that import a registry
logging library, and turns them into newline-delimited dataset records.
"""

import json
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import EncodingError, ParseError
from .logging_config import get_logger
from .logging_model import (
    CHANNEL_GENERAL,
    CHANNEL_PRINT,
    CHANNEL_TRACKER,
    GENERAL_PURPOSE,
    HYBRID,
    ML_SPECIFIC,
    ClassifiedFunction,
    FileLibraryProfile,
    ModuleLogging,
    aggregate_level,
    classify_module,
    detect_logging_imports,
    filter_functions,
)
from .models import CorpusRecord, CorpusStats, SkipEntry, Snippet
from .registry import LibraryRegistry, default_registry
from .source_model import neighbor_lines, parse_module, read_source

logger = get_logger(__name__)

LIBRARY_TYPE_LABELS = {
    GENERAL_PURPOSE: "General-purpose",
    ML_SPECIFIC: "ML-specific",
    HYBRID: "Hybrid",
}
LABEL_TO_LIBRARY_TYPE = {v: k for k, v in LIBRARY_TYPE_LABELS.items()}

SKIP_DIRS = frozenset({".git", ".hg", ".svn", "__pycache__"})


# =============================================================================
# Scanning
# =============================================================================

def iter_python_files(root: Path) -> Iterator[Path]:
    """`.py` files under root in sorted order; symlinked directories are visited once."""
    root = Path(root)
    visited = set()
    for dirpath, dirnames, filenames in os.walk(root, followlinks=True):
        real = os.path.realpath(dirpath)
        if real in visited:
            dirnames[:] = []
            continue
        visited.add(real)
        dirnames[:] = sorted(
            d for d in dirnames
            if d not in SKIP_DIRS and os.path.realpath(os.path.join(dirpath, d)) not in visited
        )
        for name in sorted(filenames):
            if name.endswith(".py"):
                yield Path(dirpath) / name


def _relative(path: Path, root: Path) -> str:
    return path.relative_to(root).as_posix()


def _profile_file(path: Path, root: Path, reg: LibraryRegistry):
    rel = _relative(path, root)
    try:
        text = read_source(path, rel)
        tree = parse_module(text, rel)
    except (ParseError, EncodingError) as exc:
        logger.warning("skipping %s: %s", rel, exc)
        return rel, None, SkipEntry(rel, "parse-error", getattr(exc, "line", None) or None)
    except OSError as exc:
        logger.warning("skipping %s: %s", rel, exc)
        return rel, None, SkipEntry(rel, f"unreadable: {exc.strerror or exc}")
    return rel, detect_logging_imports(tree, reg), None


def scan_tree(root, reg: Optional[LibraryRegistry] = None, jobs: int = 1,
              skips: Optional[List[SkipEntry]] = None) -> List[Tuple[str, FileLibraryProfile]]:
    """
    Find the Python files under root that import at least one registry library.

    Args:
        root: Directory to walk
        reg: Library registry (defaults when omitted)
        jobs: Worker threads used to parse files
        skips: Optional list that receives one SkipEntry per unreadable/unparseable file

    Returns:
        (repo-relative posix path, profile) pairs sorted by path
    """
    root = Path(root)
    if not root.is_dir():
        raise NotADirectoryError(str(root))
    reg = reg or default_registry()
    files = list(iter_python_files(root))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(lambda p: _profile_file(p, root, reg), files))
    else:
        results = [_profile_file(p, root, reg) for p in files]

    selected = []
    for rel, profile, skip in sorted(results, key=lambda r: r[0]):
        if skip is not None:
            if skips is not None:
                skips.append(skip)
            continue
        if not profile.is_empty:
            selected.append((rel, profile))
    logger.info("scanned %d python files under %s, %d import a logging library",
                len(files), root, len(selected))
    return selected


# =============================================================================
# Records
# =============================================================================

def _function_index(module: ModuleLogging) -> Dict[int, ClassifiedFunction]:
    owners = {}
    for fn in module.functions:
        for call in fn.calls:
            owners[id(call)] = fn
    return owners


def records_for_module(module: ModuleLogging, project_name: str, file_path: str,
                       content: str) -> List[CorpusRecord]:
    """One record per imported library; snippets are that library's calls in line order."""
    profile = module.profile
    library_type = LIBRARY_TYPE_LABELS.get(profile.library_type, "")
    owners = _function_index(module)
    calls = [c for c in module.all_calls() if c.channel != CHANNEL_PRINT]

    records = []
    for library in sorted(profile.libraries_used):
        record_id = f"{project_name}:{file_path}:{library}"
        snippets = []
        for call in (c for c in calls if c.library == library):
            owner = owners.get(id(call))
            before, after = neighbor_lines(module.tree, call.line)
            snippets.append(Snippet(
                snippet_id=f"{record_id}#{len(snippets) + 1}",
                snippet=call.site.text,
                class_name=owner.function.class_name if owner else None,
                function_name=owner.function.name if owner else None,
                line_number=call.line,
                line_before=before,
                line_after=after,
            ))
        records.append(CorpusRecord(
            id=record_id,
            project_name=project_name,
            file_path=file_path,
            library=library,
            library_type=library_type,
            python_file_content=content,
            snippets=snippets,
        ))
    return records


def build_records(root, scanned: Sequence[Tuple[str, FileLibraryProfile]],
                  reg: Optional[LibraryRegistry] = None, project_name: Optional[str] = None,
                  skips: Optional[List[SkipEntry]] = None) -> List[CorpusRecord]:
    """Convert scan output into CorpusRecords; parse failures become skip entries."""
    root = Path(root)
    reg = reg or default_registry()
    project = project_name or root.resolve().name
    records = []
    for rel, _profile in sorted(scanned, key=lambda item: item[0]):
        try:
            content = read_source(root / rel, rel)
            module = classify_module(parse_module(content, rel), reg)
        except (ParseError, EncodingError, OSError) as exc:
            logger.warning("no record for %s: %s", rel, exc)
            if skips is not None:
                skips.append(SkipEntry(rel, "parse-error", getattr(exc, "line", None) or None))
            continue
        records.extend(records_for_module(module, project, rel, content))
    logger.info("built %d records for project %s", len(records), project)
    return records


# =============================================================================
# NDJSON I/O
# =============================================================================

def write_jsonl(rows: Iterable[Dict[str, Any]], path) -> int:
    """Overwrite path with one JSON document per line; returns the row count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")
            count += 1
    return count


def read_jsonl(path) -> Iterator[Dict[str, Any]]:
    with Path(path).open("r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                yield json.loads(line)


def write_records(records: Iterable[CorpusRecord], path) -> int:
    return write_jsonl((r.to_dict() for r in records), path)


def read_records(path) -> List[CorpusRecord]:
    return [CorpusRecord.from_dict(row) for row in read_jsonl(path)]


# =============================================================================
# Statistics
# =============================================================================

def record_file_id(record: CorpusRecord) -> str:
    return f"{record.project_name}/{record.file_path}"


def modules_from_records(records: Iterable[CorpusRecord], reg: Optional[LibraryRegistry] = None,
                         skips: Optional[List[SkipEntry]] = None
                         ) -> List[Tuple[str, ModuleLogging]]:
    """Re-parse each distinct file of a dataset once, keyed by `<project>/<file_path>`."""
    reg = reg or default_registry()
    contents: Dict[str, str] = {}
    for record in records:
        contents.setdefault(record_file_id(record), record.python_file_content)
    modules = []
    for file_id in sorted(contents):
        try:
            tree = parse_module(contents[file_id], file_id)
        except ParseError as exc:
            logger.warning("skipping %s: %s", file_id, exc)
            if skips is not None:
                skips.append(SkipEntry(file_id, "parse-error", exc.line or None))
            continue
        modules.append((file_id, classify_module(tree, reg)))
    return modules


def level_group(level: str) -> str:
    return "warning+warn" if level in ("warning", "warn") else level


def function_stratum(fn: ClassifiedFunction) -> Optional[str]:
    """First tracker library (alphabetical) of a kept function, else its first general level group."""
    trackers = sorted({c.library for c in fn.event_calls if c.channel == CHANNEL_TRACKER})
    if trackers:
        return trackers[0]
    for call in fn.event_calls:
        if call.channel == CHANNEL_GENERAL and call.level:
            return f"logging ({level_group(call.level)})"
    return None


def corpus_stats(records: Sequence[CorpusRecord], reg: Optional[LibraryRegistry] = None,
                 n_skipped: int = 0) -> CorpusStats:
    """
    Corpus-wide and post-filter counts.

    Statement counts before filtering come from record snippets. The filtered
    section counts non-configuration library calls in kept functions; its
    per-library counts sum to n_kept_statements and its per-level counts sum
    to the kept general-channel events.
    """
    stats = CorpusStats(n_skipped=n_skipped)
    if not records:
        return stats

    file_types: Dict[str, str] = {}
    for record in records:
        file_types.setdefault(record_file_id(record), record.library_type)
        stats.n_logging_statements += len(record.snippets)
    type_counts = Counter(LABEL_TO_LIBRARY_TYPE.get(t, t) for t in file_types.values())
    stats.n_files = len(file_types)
    stats.n_general = type_counts[GENERAL_PURPOSE]
    stats.n_ml_specific = type_counts[ML_SPECIFIC]
    stats.n_hybrid = type_counts[HYBRID]

    skips: List[SkipEntry] = []
    per_library: Counter = Counter()
    per_level: Counter = Counter()
    fn_library: Counter = Counter()
    fn_level: Counter = Counter()
    strata: Dict[str, List[str]] = {}

    for file_id, module in modules_from_records(records, reg, skips):
        stats.n_functions += len(module.functions)
        stats.n_classes += len(module.tree.classes)
        kept, _dropped = filter_functions(module.functions, reg)
        for fn in kept:
            function_id = f"{file_id}::{fn.function.qualified_name}"
            events = fn.event_calls
            stats.n_kept_functions += 1
            stats.n_kept_statements += len(events)
            for call in events:
                per_library[call.library] += 1
                if call.channel == CHANNEL_GENERAL and call.level:
                    per_level[aggregate_level(call.level)] += 1
            for library in {c.library for c in events}:
                fn_library[library] += 1
            for level in {aggregate_level(c.level) for c in events if c.level}:
                fn_level[level] += 1
            stratum = function_stratum(fn)
            if stratum:
                strata.setdefault(stratum, []).append(function_id)

    stats.n_skipped += len(skips)
    stats.statements_per_library = dict(per_library)
    stats.statements_per_level = dict(per_level)
    stats.functions_per_library = dict(fn_library)
    stats.functions_per_level = dict(fn_level)
    stats.function_strata = {k: sorted(v) for k, v in strata.items()}
    return stats
