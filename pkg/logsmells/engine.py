"""
Analysis Engine
===============
Headless analysis runner: parses files, classifies their logging calls, runs
the detectors and merges per-file results into one deterministic report.
"""

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import TOOL_NAME, __version__
from .config_loader import MODE_PRIMARY, RunConfig, validate_config
from .corpus import iter_python_files, modules_from_records, read_records
from .detectors import analyze_module, primary_per_function
from .errors import ConfigError, EncodingError, ParseError
from .logging_config import get_logger
from .logging_model import ModuleLogging, classify_module
from .models import Confidence, FindingsReport, SkipEntry, SmellFinding
from .registry import (
    LibraryRegistry,
    default_registry,
    load_lexicons_from_file,
    load_registry_from_file,
)
from .source_model import parse_module, read_source

logger = get_logger(__name__)


@dataclass
class FileAnalysis:
    """Result of analyzing one file."""
    path: str
    findings: List[SmellFinding] = field(default_factory=list)
    n_functions: int = 0
    skipped: Optional[SkipEntry] = None


def _analyze_module(module: ModuleLogging, registry: LibraryRegistry) -> FileAnalysis:
    findings = analyze_module(module, registry, registry.lexicons)
    return FileAnalysis(module.tree.path, findings, len(module.functions))


def analyze_source(source_text: str, path: str,
                   registry: Optional[LibraryRegistry] = None) -> FileAnalysis:
    """Analyze source text reported under `path`."""
    registry = registry or default_registry()
    try:
        tree = parse_module(source_text, path)
    except ParseError as exc:
        logger.warning("skipping %s: %s", path, exc)
        return FileAnalysis(path, skipped=SkipEntry(path, "parse-error", exc.line or None))
    return _analyze_module(classify_module(tree, registry), registry)


def analyze_file(file_path, display_path: str,
                 registry: Optional[LibraryRegistry] = None) -> FileAnalysis:
    try:
        text = read_source(Path(file_path), display_path)
    except EncodingError as exc:
        logger.warning("skipping %s: %s", display_path, exc)
        return FileAnalysis(display_path, skipped=SkipEntry(display_path, "encoding-error"))
    except OSError as exc:
        logger.warning("skipping %s: %s", display_path, exc)
        return FileAnalysis(display_path, skipped=SkipEntry(display_path, f"unreadable: {exc.strerror or exc}"))
    return analyze_source(text, display_path, registry)


def collect_files(roots: Sequence[str]) -> List[Tuple[Path, str]]:
    """(absolute path, display path) for every `.py` file; paths are root-relative."""
    prefix_roots = len(roots) > 1
    found = []
    for root in roots:
        root_path = Path(root)
        for path in iter_python_files(root_path):
            rel = path.relative_to(root_path).as_posix()
            display = f"{root_path.resolve().name}/{rel}" if prefix_roots else rel
            found.append((path, display))
    return sorted(found, key=lambda item: item[1])


def load_registry(registry_path: Optional[str] = None,
                  lexicon_path: Optional[str] = None) -> LibraryRegistry:
    """Default registry plus optional override files."""
    registry = load_registry_from_file(registry_path) if registry_path else default_registry()
    if lexicon_path:
        lexicons = load_lexicons_from_file(lexicon_path, base=registry.lexicons)
        registry = dataclasses.replace(registry, lexicons=lexicons)
    return registry


def tool_metadata(registry: LibraryRegistry) -> Dict[str, str]:
    return {
        "name": TOOL_NAME,
        "version": __version__,
        "registry_hash": registry.digest(),
        "lexicon_hash": registry.lexicons.digest(),
        "lexicon_version": registry.lexicons.version,
    }


def build_report(analyses: Sequence[FileAnalysis], registry: LibraryRegistry,
                 mode: str = "all", min_confidence: str = "Low") -> FindingsReport:
    """
    Merge per-file results. Primary mode reduces each function to its primary
    finding before the confidence filter, so a filtered report is always a
    subset of the unfiltered one.
    """
    findings: List[SmellFinding] = []
    skipped = []
    n_functions = 0
    for analysis in analyses:
        findings.extend(analysis.findings)
        n_functions += analysis.n_functions
        if analysis.skipped is not None:
            skipped.append(analysis.skipped)

    if mode == MODE_PRIMARY:
        findings = primary_per_function(findings)
    threshold = Confidence.parse(min_confidence).rank
    findings = sorted((f for f in findings if f.confidence.rank >= threshold),
                      key=SmellFinding.sort_key)

    return FindingsReport(
        tool=tool_metadata(registry),
        findings=findings,
        skipped=sorted(skipped, key=lambda s: s.path),
        n_files=len(analyses),
        n_functions=n_functions,
        mode=mode,
        min_confidence=Confidence.parse(min_confidence).value,
    )


def analyze_paths(files: Sequence[Tuple[Path, str]], registry: LibraryRegistry,
                  jobs: int = 1) -> List[FileAnalysis]:
    """Analyze files, in parallel when jobs > 1; results come back in input order."""
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(lambda item: analyze_file(item[0], item[1], registry), files))
    return [analyze_file(path, display, registry) for path, display in files]


def analyze_dataset(dataset_path: str, registry: LibraryRegistry) -> List[FileAnalysis]:
    """Analyze each distinct file of an NDJSON dataset, keyed `<project>/<file_path>`."""
    skips: List[SkipEntry] = []
    analyses = [_analyze_module(module, registry)
                for _file_id, module in modules_from_records(read_records(dataset_path), registry, skips)]
    analyses.extend(FileAnalysis(s.path, skipped=s) for s in skips)
    return analyses


def run_analysis(config: RunConfig) -> Dict[str, Any]:
    """
    Execute a complete analysis run.

    Args:
        config: RunConfig with all parameters

    Returns:
        Dictionary with `success`, and either `errors` or the `report`
    """
    errors = validate_config(config)
    if errors:
        return {"success": False, "errors": errors, "run_id": config.run_id}

    try:
        registry = load_registry(config.registry_path, config.lexicon_path)
    except ConfigError as exc:
        return {"success": False, "errors": [str(exc)], "run_id": config.run_id}

    start_time = datetime.now()
    if config.dataset:
        analyses = analyze_dataset(config.dataset, registry)
    else:
        files = collect_files(config.roots)
        logger.info("analyzing %d files with %d worker(s)", len(files), config.jobs)
        analyses = analyze_paths(files, registry, config.jobs)
    report = build_report(analyses, registry, config.mode, config.min_confidence)
    end_time = datetime.now()

    logger.info("run %s: %d findings in %d files (%d skipped)", config.run_id,
                len(report.findings), report.n_files, len(report.skipped))
    return {
        "success": True,
        "run_id": config.run_id,
        "config": config.to_dict(),
        "execution_time_seconds": (end_time - start_time).total_seconds(),
        "report": report,
    }
