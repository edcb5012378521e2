import pytest

from conftest import LISTINGS_DIR
from logsmells.config_loader import MODE_PRIMARY, RunConfig
from logsmells.detectors import primary_per_function
from logsmells.engine import analyze_file, run_analysis
from logsmells.models import SmellKind
from logsmells.source_model import extract_functions, parse_module

LISTINGS = [
    ("l01_ambiguous_metrics.py", SmellKind.AMBIGUOUS_METRICS),
    ("l02_misleading.py", SmellKind.MISLEADING),
    ("l03_heavy_data.py", SmellKind.HEAVY_DATA),
    ("l04_misconfigured.py", SmellKind.MISCONFIGURED),
    ("l05_misrouted_metric.py", SmellKind.MISROUTED_METRIC),
    ("l06_metric_overwrite.py", SmellKind.METRIC_OVERWRITE),
    ("l07_log_without_context.py", SmellKind.LOG_WITHOUT_CONTEXT),
    ("l08_missing_hyperparameter.py", SmellKind.MISSING_HYPERPARAMETER),
    ("l09_print_based_metrics.py", SmellKind.PRINT_BASED_METRICS),
    ("l10_print_logging.py", SmellKind.PRINT_LOGGING),
    ("l11_sensitive_data.py", SmellKind.SENSITIVE_DATA),
    ("l12_incorrect_level.py", SmellKind.INCORRECT_LEVEL),
]


@pytest.mark.parametrize("name, kind", LISTINGS, ids=[name for name, _ in LISTINGS])
def test_listing_primary_label(registry, name, kind):
    analysis = analyze_file(LISTINGS_DIR / name, name, registry)
    assert analysis.skipped is None
    primaries = primary_per_function(analysis.findings)
    assert [p.kind for p in primaries] == [kind]


@pytest.mark.parametrize("name", [name for name, _ in LISTINGS])
def test_evidence_lines_stay_in_the_function(registry, name):
    path = LISTINGS_DIR / name
    tree = parse_module(path.read_text(encoding="utf-8"), name)
    spans = {fn.qualified_name: (fn.line_start, fn.line_end) for fn in extract_functions(tree)}
    for finding in analyze_file(path, name, registry).findings:
        start, end = spans[finding.function]
        assert all(start <= n <= end for n in finding.evidence.lines)
        assert finding.line in finding.evidence.lines


def test_clean_listing_has_no_findings(registry):
    analysis = analyze_file(LISTINGS_DIR / "clean.py", "clean.py", registry)
    assert analysis.findings == []
    assert analysis.n_functions > 0


def test_listing_directory_splits_evenly_between_categories():
    result = run_analysis(RunConfig(roots=[str(LISTINGS_DIR)], mode=MODE_PRIMARY))
    assert result["success"]
    report = result["report"]
    assert report.n_files == 13
    summary = report.summary()
    assert summary["total"] == 12
    assert summary["by_category"] == {"general": 6, "ml-specific": 6}
    assert summary["percent_by_category"] == {"general": 50.0, "ml-specific": 50.0}
    assert all(count == 1 for count in summary["by_kind"].values())
