"""
Analysis Models
===============
Smell kinds, findings, corpus records, repository status, corpus statistics
and sampling plans shared across the pipeline.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple


class Category(str, Enum):
    GENERAL = "general"
    ML_SPECIFIC = "ml-specific"


class Confidence(str, Enum):
    HIGH = "High"
    MEDIUM = "Medium"
    LOW = "Low"

    @property
    def rank(self) -> int:
        return {"High": 3, "Medium": 2, "Low": 1}[self.value]

    @classmethod
    def parse(cls, text: str) -> "Confidence":
        for member in cls:
            if member.value.lower() == str(text).strip().lower():
                return member
        raise ValueError(f"unknown confidence '{text}' (expected High, Medium or Low)")


class SmellKind(str, Enum):
    """The twelve logging smells, in rule-id order."""
    AMBIGUOUS_METRICS = "AmbiguousMetricsLogging"
    MISLEADING = "MisleadingLogging"
    HEAVY_DATA = "HeavyDataLogging"
    MISCONFIGURED = "MisconfiguredLogging"
    MISROUTED_METRIC = "MisroutedMetricLogging"
    METRIC_OVERWRITE = "MetricOverwrite"
    LOG_WITHOUT_CONTEXT = "LogWithoutContext"
    MISSING_HYPERPARAMETER = "MissingHyperparameterLogging"
    PRINT_BASED_METRICS = "PrintBasedMetrics"
    PRINT_LOGGING = "PrintLogging"
    SENSITIVE_DATA = "LoggingSensitiveData"
    INCORRECT_LEVEL = "IncorrectLogLevel"

    @property
    def order(self) -> int:
        return list(SmellKind).index(self)

    @property
    def rule_id(self) -> str:
        return f"ML-LOG-{self.order + 1:03d}"

    @property
    def category(self) -> Category:
        if self in ML_SPECIFIC_KINDS:
            return Category.ML_SPECIFIC
        return Category.GENERAL

    @classmethod
    def from_rule_id(cls, rule_id: str) -> "SmellKind":
        for kind in cls:
            if kind.rule_id == rule_id:
                return kind
        raise ValueError(f"unknown rule id '{rule_id}'")


ML_SPECIFIC_KINDS = frozenset({
    SmellKind.AMBIGUOUS_METRICS,
    SmellKind.METRIC_OVERWRITE,
    SmellKind.MISROUTED_METRIC,
    SmellKind.HEAVY_DATA,
    SmellKind.MISSING_HYPERPARAMETER,
    SmellKind.PRINT_BASED_METRICS,
})

NO_SMELL = "NoSmell"
LABELS: Tuple[str, ...] = tuple(k.value for k in SmellKind) + (NO_SMELL,)


@dataclass(frozen=True)
class Evidence:
    """Involved call lines plus a machine-built rationale."""
    lines: Tuple[int, ...]
    rationale: str


@dataclass(frozen=True)
class SmellFinding:
    kind: SmellKind
    confidence: Confidence
    function: str
    file: str
    line: int
    evidence: Evidence
    lexicon_hits: Tuple[str, ...] = ()
    lexicon_version: str = ""

    @property
    def rule_id(self) -> str:
        return self.kind.rule_id

    @property
    def category(self) -> Category:
        return self.kind.category

    @property
    def function_id(self) -> str:
        return f"{self.file}::{self.function}"

    def sort_key(self) -> Tuple:
        return (self.file, self.line, self.kind.order, self.function,
                -self.confidence.rank, self.evidence.rationale)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rule_id": self.rule_id,
            "kind": self.kind.value,
            "category": self.category.value,
            "confidence": self.confidence.value,
            "file": self.file,
            "function": self.function,
            "function_id": self.function_id,
            "line": self.line,
            "evidence": {
                "lines": list(self.evidence.lines),
                "rationale": self.evidence.rationale,
            },
            "lexicon_hits": list(self.lexicon_hits),
            "lexicon_version": self.lexicon_version,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SmellFinding":
        evidence = data.get("evidence", {})
        return cls(
            kind=SmellKind(data["kind"]),
            confidence=Confidence.parse(data["confidence"]),
            function=data["function"],
            file=data["file"],
            line=int(data["line"]),
            evidence=Evidence(tuple(evidence.get("lines", [])), evidence.get("rationale", "")),
            lexicon_hits=tuple(data.get("lexicon_hits", [])),
            lexicon_version=data.get("lexicon_version", ""),
        )


# =============================================================================
# Corpus
# =============================================================================

@dataclass
class Snippet:
    """One logging statement inside a dataset record."""
    snippet_id: str
    snippet: str
    class_name: Optional[str]
    function_name: Optional[str]
    line_number: int
    line_before: Optional[str]
    line_after: Optional[str]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "snippet_id": self.snippet_id,
            "snippet": self.snippet,
            "class_name": self.class_name,
            "function_name": self.function_name,
            "line_number": self.line_number,
            "line_before": self.line_before,
            "line_after": self.line_after,
        }


@dataclass
class CorpusRecord:
    """One (file, library) entry of the JSON dataset."""
    id: str
    project_name: str
    file_path: str
    library: str
    library_type: str
    python_file_content: str
    snippets: List[Snippet] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "project_name": self.project_name,
            "file_path": self.file_path,
            "library": self.library,
            "library_type": self.library_type,
            "python_file_content": self.python_file_content,
            "snippets": [s.to_dict() for s in self.snippets],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CorpusRecord":
        return cls(
            id=data["id"],
            project_name=data["project_name"],
            file_path=data["file_path"],
            library=data["library"],
            library_type=data["library_type"],
            python_file_content=data["python_file_content"],
            snippets=[Snippet(**s) for s in data.get("snippets", [])],
        )


@dataclass(frozen=True)
class SkipEntry:
    """A file left out of scanning or analysis, with the reason."""
    path: str
    reason: str
    line: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"path": self.path, "reason": self.reason, "line": self.line}


@dataclass
class RepoStatus:
    full_name: str
    reachable: bool
    archived: Optional[bool]
    checked_at: str
    error: Optional[str] = None

    @property
    def is_active(self) -> bool:
        return self.reachable and not self.archived

    def to_dict(self) -> Dict[str, Any]:
        return {
            "full_name": self.full_name,
            "reachable": self.reachable,
            "archived": self.archived,
            "checked_at": self.checked_at,
            "error": self.error,
        }


@dataclass
class CorpusStats:
    n_files: int = 0
    n_general: int = 0
    n_ml_specific: int = 0
    n_hybrid: int = 0
    n_functions: int = 0
    n_classes: int = 0
    n_logging_statements: int = 0
    n_kept_functions: int = 0
    n_kept_statements: int = 0
    statements_per_library: Dict[str, int] = field(default_factory=dict)
    statements_per_level: Dict[str, int] = field(default_factory=dict)
    functions_per_library: Dict[str, int] = field(default_factory=dict)
    functions_per_level: Dict[str, int] = field(default_factory=dict)
    function_strata: Dict[str, List[str]] = field(default_factory=dict)
    n_skipped: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "corpus": {
                "n_files": self.n_files,
                "n_general": self.n_general,
                "n_ml_specific": self.n_ml_specific,
                "n_hybrid": self.n_hybrid,
                "n_functions": self.n_functions,
                "n_classes": self.n_classes,
                "n_logging_statements": self.n_logging_statements,
                "n_skipped": self.n_skipped,
            },
            "filtered": {
                "n_kept_functions": self.n_kept_functions,
                "n_kept_statements": self.n_kept_statements,
                "statements_per_library": dict(sorted(self.statements_per_library.items())),
                "statements_per_level": dict(sorted(self.statements_per_level.items())),
                "functions_per_library": dict(sorted(self.functions_per_library.items())),
                "functions_per_level": dict(sorted(self.functions_per_level.items())),
                "strata": {k: len(v) for k, v in sorted(self.function_strata.items())},
            },
        }


# =============================================================================
# Sampling
# =============================================================================

@dataclass(frozen=True)
class Stratum:
    name: str
    N: int
    n0: float
    n_corrected: float
    n_rounded: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "N": self.N,
            "n0": self.n0,
            "n_corrected": round(self.n_corrected, 6),
            "n_rounded": self.n_rounded,
        }


@dataclass(frozen=True)
class SamplePlan:
    strata: Tuple[Stratum, ...]
    z: float
    p: float
    E: float
    mode: str = "raw"

    @property
    def total_population(self) -> int:
        return sum(s.N for s in self.strata)

    @property
    def total_rounded(self) -> int:
        return sum(s.n_rounded for s in self.strata)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "z": self.z,
            "p": self.p,
            "E": self.E,
            "mode": self.mode,
            "strata": [s.to_dict() for s in self.strata],
            "total_population": self.total_population,
            "total_rounded": self.total_rounded,
        }


@dataclass(frozen=True)
class LabelPair:
    item_id: str
    label_a: str
    label_b: str


# =============================================================================
# Reports
# =============================================================================

@dataclass
class FindingsReport:
    """Findings of one run plus tool metadata and tallies."""
    tool: Dict[str, str]
    findings: List[SmellFinding] = field(default_factory=list)
    skipped: List[SkipEntry] = field(default_factory=list)
    n_files: int = 0
    n_functions: int = 0
    mode: str = "all"
    min_confidence: str = "Low"

    def summary(self) -> Dict[str, Any]:
        total = len(self.findings)
        by_kind = {kind.value: 0 for kind in SmellKind}
        by_category = {c.value: 0 for c in Category}
        by_confidence = {c.value: 0 for c in Confidence}
        for finding in self.findings:
            by_kind[finding.kind.value] += 1
            by_category[finding.category.value] += 1
            by_confidence[finding.confidence.value] += 1

        def share(count: int) -> float:
            return round(100.0 * count / total, 2) if total else 0.0

        return {
            "total": total,
            "by_kind": by_kind,
            "by_category": by_category,
            "by_confidence": by_confidence,
            "percent_by_kind": {k: share(v) for k, v in by_kind.items()},
            "percent_by_category": {k: share(v) for k, v in by_category.items()},
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tool": dict(self.tool),
            "mode": self.mode,
            "min_confidence": self.min_confidence,
            "n_files": self.n_files,
            "n_functions": self.n_functions,
            "summary": self.summary(),
            "findings": [f.to_dict() for f in self.findings],
            "skipped": [s.to_dict() for s in self.skipped],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FindingsReport":
        return cls(
            tool=dict(data.get("tool", {})),
            findings=[SmellFinding.from_dict(f) for f in data.get("findings", [])],
            skipped=[SkipEntry(s["path"], s["reason"], s.get("line")) for s in data.get("skipped", [])],
            n_files=int(data.get("n_files", 0)),
            n_functions=int(data.get("n_functions", 0)),
            mode=data.get("mode", "all"),
            min_confidence=data.get("min_confidence", "Low"),
        )
