"""
Output Generator
================
Renders reports as text, JSON and SARIF 2.1.0, and writes run artifacts:
findings.json, findings.sarif, summary.json and PNG charts.
"""

import json
import os
import shutil
from datetime import datetime
from typing import Any, Dict, List

import matplotlib
matplotlib.use('Agg')  # Headless backend
import matplotlib.pyplot as plt
import numpy as np

from .models import Category, Confidence, CorpusStats, FindingsReport, SamplePlan, SmellKind
from .rules import all_rules

SARIF_SCHEMA = "https://json.schemastore.org/sarif-2.1.0.json"
SARIF_VERSION = "2.1.0"
INFORMATION_URI = "https://pypi.org/project/logsmells/"

SARIF_LEVELS = {
    Confidence.HIGH: "error",
    Confidence.MEDIUM: "warning",
    Confidence.LOW: "note",
}

CATEGORY_COLORS = {
    Category.GENERAL.value: '#3498db',
    Category.ML_SPECIFIC.value: '#e67e22',
}


# =============================================================================
# Renderers
# =============================================================================

def render_json(report: FindingsReport) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def render_text(report: FindingsReport) -> str:
    """One line per finding, then the tallies."""
    lines = []
    for f in report.findings:
        lines.append(
            f"{f.file}:{f.line}: {f.rule_id} {f.kind.value} [{f.confidence.value}] "
            f"in {f.function}: {f.evidence.rationale}"
        )
    for skip in report.skipped:
        where = f":{skip.line}" if skip.line else ""
        lines.append(f"{skip.path}{where}: skipped ({skip.reason})")

    summary = report.summary()
    if lines:
        lines.append("")
    lines.append(
        f"{summary['total']} finding(s) in {report.n_files} file(s), "
        f"{report.n_functions} function(s) [{report.mode} mode, min confidence {report.min_confidence}]"
    )
    if summary["total"]:
        cats = summary["by_category"]
        pct = summary["percent_by_category"]
        lines.append(
            f"  general: {cats['general']} ({pct['general']:.1f}%), "
            f"ml-specific: {cats['ml-specific']} ({pct['ml-specific']:.1f}%)"
        )
        for kind in SmellKind:
            count = summary["by_kind"][kind.value]
            if count:
                lines.append(f"  {kind.rule_id} {kind.value}: {count}")
    return "\n".join(lines) + "\n"


def _sarif_rule(rule) -> Dict[str, Any]:
    return {
        "id": rule.rule_id,
        "name": rule.kind.value,
        "shortDescription": {"text": rule.name},
        "fullDescription": {"text": rule.definition},
        "help": {"text": f"{rule.rubric}\n\nRemediation: {rule.remediation}"},
        "properties": {"category": rule.kind.category.value},
    }


def emit_sarif(report: FindingsReport) -> Dict[str, Any]:
    """SARIF 2.1.0 log with all twelve rules and one result per finding."""
    rules = all_rules()
    rule_index = {rule.rule_id: i for i, rule in enumerate(rules)}
    results = []
    for f in report.findings:
        results.append({
            "ruleId": f.rule_id,
            "ruleIndex": rule_index[f.rule_id],
            "level": SARIF_LEVELS[f.confidence],
            "message": {"text": f.evidence.rationale},
            "locations": [{
                "physicalLocation": {
                    "artifactLocation": {"uri": f.file},
                    "region": {"startLine": f.line},
                },
                "logicalLocations": [{"fullyQualifiedName": f.function, "kind": "function"}],
            }],
            "properties": {
                "confidence": f.confidence.value,
                "category": f.category.value,
                "evidenceLines": list(f.evidence.lines),
                "lexiconHits": list(f.lexicon_hits),
            },
        })

    return {
        "$schema": SARIF_SCHEMA,
        "version": SARIF_VERSION,
        "runs": [{
            "tool": {
                "driver": {
                    "name": report.tool.get("name", "logsmells"),
                    "version": report.tool.get("version", ""),
                    "informationUri": INFORMATION_URI,
                    "rules": [_sarif_rule(rule) for rule in rules],
                    "properties": {
                        "registryHash": report.tool.get("registry_hash", ""),
                        "lexiconHash": report.tool.get("lexicon_hash", ""),
                        "lexiconVersion": report.tool.get("lexicon_version", ""),
                    },
                }
            },
            "results": results,
        }],
    }


def render_sarif(report: FindingsReport) -> str:
    return json.dumps(emit_sarif(report), indent=2, ensure_ascii=False) + "\n"


RENDERERS = {
    "text": render_text,
    "json": render_json,
    "sarif": render_sarif,
}


def render_report(report: FindingsReport, output_format: str) -> str:
    return RENDERERS[output_format](report)


def render_rules() -> str:
    blocks = []
    for rule in all_rules():
        blocks.append(
            f"{rule.rule_id}  {rule.name} ({rule.kind.category.value})\n"
            f"    {rule.definition}\n"
            f"    Confidence: {rule.rubric}\n"
            f"    Fix: {rule.remediation}"
        )
    return "\n\n".join(blocks) + "\n"


def render_stats_text(stats: CorpusStats) -> str:
    data = stats.to_dict()
    corpus = data["corpus"]
    filtered = data["filtered"]
    lines = [
        "Corpus",
        f"  Python files:            {corpus['n_files']}",
        f"    general-purpose:       {corpus['n_general']}",
        f"    ML-specific:           {corpus['n_ml_specific']}",
        f"    hybrid:                {corpus['n_hybrid']}",
        f"  functions:               {corpus['n_functions']}",
        f"  classes:                 {corpus['n_classes']}",
        f"  logging statements:      {corpus['n_logging_statements']}",
        f"  skipped files:           {corpus['n_skipped']}",
        "Filtered",
        f"  kept functions:          {filtered['n_kept_functions']}",
        f"  kept statements:         {filtered['n_kept_statements']}",
    ]
    for title, key in (("statements per library", "statements_per_library"),
                       ("statements per level", "statements_per_level"),
                       ("functions per library", "functions_per_library"),
                       ("functions per level", "functions_per_level"),
                       ("function strata", "strata")):
        lines.append(f"  {title}:")
        for name, count in filtered[key].items():
            lines.append(f"    {name:<24} {count}")
    return "\n".join(lines) + "\n"


def render_plan_table(plan: SamplePlan) -> str:
    """Plan as a table: Group, Population N, Initial n0, Corrected n, Rounded n."""
    width = max([len("Group"), len("Total")] + [len(s.name) for s in plan.strata])
    n0_fmt = "{:.0f}" if plan.mode == "table-compat" else "{:.2f}"
    lines = [
        f"z={plan.z} p={plan.p} E={plan.E} mode={plan.mode}",
        f"{'Group':<{width}}  {'Population N':>12}  {'Initial n0':>10}  {'Corrected n':>11}  {'Rounded n':>9}",
    ]
    for s in plan.strata:
        lines.append(
            f"{s.name:<{width}}  {s.N:>12}  {n0_fmt.format(s.n0):>10}  "
            f"{s.n_corrected:>11.2f}  {s.n_rounded:>9}"
        )
    lines.append(f"{'Total':<{width}}  {plan.total_population:>12}  {'':>10}  {'':>11}  {plan.total_rounded:>9}")
    return "\n".join(lines) + "\n"


def render_score_text(score: Dict[str, Any]) -> str:
    lines = [f"functions: {score['n_functions']}", f"kappa: {score['kappa']:.6f}",
             f"{'label':<30} {'precision':>9} {'recall':>7} {'f1':>7} {'support':>7}"]
    for row in score["per_label"]:
        lines.append(
            f"{row['label']:<30} {row['precision']:>9.3f} {row['recall']:>7.3f} "
            f"{row['f1']:>7.3f} {row['support']:>7}"
        )
    macro = score["macro"]
    lines.append(f"{'macro':<30} {macro['precision']:>9.3f} {macro['recall']:>7.3f} {macro['f1']:>7.3f}")
    return "\n".join(lines) + "\n"


# =============================================================================
# Artifacts
# =============================================================================

def generate_outputs(report: FindingsReport, output_dir: str,
                     run_id: str = "", config: Dict[str, Any] = None) -> Dict[str, str]:
    """
    Write all artifacts of an analysis run.

    Args:
        report: Report built by the engine
        output_dir: Directory to save artifacts
        run_id: Identifier recorded in summary.json
        config: Optional run configuration, saved as input.json

    Returns:
        Dictionary mapping artifact names to file paths
    """
    os.makedirs(output_dir, exist_ok=True)
    artifacts = {}

    if config is not None:
        input_path = os.path.join(output_dir, "input.json")
        with open(input_path, 'w', encoding='utf-8') as f:
            json.dump(config, f, indent=2)
        artifacts["input.json"] = input_path

    findings_path = os.path.join(output_dir, "findings.json")
    with open(findings_path, 'w', encoding='utf-8') as f:
        f.write(render_json(report))
    artifacts["findings.json"] = findings_path

    sarif_path = os.path.join(output_dir, "findings.sarif")
    with open(sarif_path, 'w', encoding='utf-8') as f:
        f.write(render_sarif(report))
    artifacts["findings.sarif"] = sarif_path

    summary_path = os.path.join(output_dir, "summary.json")
    with open(summary_path, 'w', encoding='utf-8') as f:
        json.dump(generate_summary(report, run_id), f, indent=2)
    artifacts["summary.json"] = summary_path

    artifacts.update(generate_plots(report, output_dir))
    return artifacts


def generate_summary(report: FindingsReport, run_id: str = "") -> Dict[str, Any]:
    """Human-readable summary of a report."""
    summary = report.summary()
    return {
        "run_id": run_id,
        "timestamp": datetime.now().isoformat(),
        "status": "completed",
        "tool": report.tool,
        "files_analyzed": report.n_files,
        "functions_analyzed": report.n_functions,
        "files_skipped": len(report.skipped),
        "findings": summary["total"],
        "category_split": {
            k: f"{summary['percent_by_category'][k]:.1f}%" for k in summary["by_category"]
        },
        "by_kind": summary["by_kind"],
        "by_confidence": summary["by_confidence"],
        "conclusion": _generate_conclusion(summary),
    }


def _generate_conclusion(summary: Dict[str, Any]) -> str:
    total = summary["total"]
    if not total:
        return "No logging smells found."
    top_kind, top_count = max(summary["by_kind"].items(), key=lambda kv: (kv[1], kv[0]))
    general = summary["percent_by_category"][Category.GENERAL.value]
    return (
        f"{total} logging smell(s) found; {general:.0f}% are general logging smells and "
        f"{100 - general:.0f}% are ML-specific. Most frequent: {top_kind} ({top_count})."
    )


def _save(fig, output_dir: str, name: str) -> str:
    path = os.path.join(output_dir, name)
    fig.savefig(path, dpi=150, bbox_inches='tight', facecolor='white')
    plt.close(fig)
    return path


def generate_plots(report: FindingsReport, output_dir: str) -> Dict[str, str]:
    """Category split and per-kind counts."""
    artifacts = {}
    summary = report.summary()
    if not summary["total"]:
        return artifacts

    plt.style.use('seaborn-v0_8-darkgrid')

    # 1. Category split
    fig, ax = plt.subplots(figsize=(6, 6))
    cats = [c for c in summary["by_category"] if summary["by_category"][c]]
    ax.pie([summary["by_category"][c] for c in cats], labels=cats, autopct='%1.0f%%',
           colors=[CATEGORY_COLORS[c] for c in cats], startangle=90,
           wedgeprops={'edgecolor': 'white'})
    ax.set_title("Logging Smells by Category", fontsize=14, fontweight='bold')
    artifacts["category_split.png"] = _save(fig, output_dir, "category_split.png")

    # 2. Findings per kind, stacked by confidence
    kinds = list(SmellKind)
    counts = {c: np.zeros(len(kinds)) for c in Confidence}
    for f in report.findings:
        counts[f.confidence][f.kind.order] += 1
    fig, ax = plt.subplots(figsize=(10, 6))
    y = np.arange(len(kinds))
    left = np.zeros(len(kinds))
    colors = {Confidence.HIGH: '#e74c3c', Confidence.MEDIUM: '#f39c12', Confidence.LOW: '#95a5a6'}
    for confidence in Confidence:
        ax.barh(y, counts[confidence], left=left, color=colors[confidence],
                edgecolor='white', label=confidence.value)
        left += counts[confidence]
    ax.set_yticks(y)
    ax.set_yticklabels([f"{k.rule_id} {k.value}" for k in kinds], fontsize=9)
    ax.invert_yaxis()
    ax.set_xlabel("Findings", fontsize=12)
    ax.set_title("Findings per Smell", fontsize=14, fontweight='bold')
    ax.legend(loc='lower right')
    ax.grid(True, alpha=0.3, axis='x')
    artifacts["findings_by_kind.png"] = _save(fig, output_dir, "findings_by_kind.png")

    return artifacts


def generate_stats_outputs(stats: CorpusStats, output_dir: str) -> Dict[str, str]:
    """stats.json plus level and stratum histograms."""
    os.makedirs(output_dir, exist_ok=True)
    artifacts = {}
    stats_path = os.path.join(output_dir, "stats.json")
    with open(stats_path, 'w', encoding='utf-8') as f:
        json.dump(stats.to_dict(), f, indent=2)
    artifacts["stats.json"] = stats_path

    plt.style.use('seaborn-v0_8-darkgrid')
    charts = (
        ("statements_by_level.png", stats.statements_per_level, "Kept Statements per Level", '#2ecc71'),
        ("functions_by_stratum.png", {k: len(v) for k, v in stats.function_strata.items()},
         "Kept Functions per Stratum", '#9b59b6'),
    )
    for name, data, title, color in charts:
        if not data:
            continue
        labels: List[str] = sorted(data)
        fig, ax = plt.subplots(figsize=(10, 5))
        bars = ax.bar(np.arange(len(labels)), [data[k] for k in labels], color=color, edgecolor='white')
        ax.set_xticks(np.arange(len(labels)))
        ax.set_xticklabels(labels, rotation=45, ha='right', fontsize=9)
        ax.set_title(title, fontsize=14, fontweight='bold')
        ax.grid(True, alpha=0.3, axis='y')
        for bar in bars:
            height = bar.get_height()
            ax.annotate(f'{height:.0f}', xy=(bar.get_x() + bar.get_width() / 2, height),
                        xytext=(0, 3), textcoords="offset points", ha='center', va='bottom', fontsize=9)
        artifacts[name] = _save(fig, output_dir, name)
    return artifacts


def cleanup_old_runs(runs_dir: str, max_runs: int = 50):
    """Clean up old job directories, keeping only the most recent."""
    if not os.path.exists(runs_dir):
        return

    runs = []
    for run_id in os.listdir(runs_dir):
        run_path = os.path.join(runs_dir, run_id)
        if os.path.isdir(run_path):
            runs.append((run_id, os.path.getmtime(run_path)))

    runs.sort(key=lambda x: x[1], reverse=True)

    for run_id, _ in runs[max_runs:]:
        shutil.rmtree(os.path.join(runs_dir, run_id))
