"""
Command-line interface.

    logsmells scan ROOT --out dataset.jsonl
    logsmells analyze ROOT [ROOT ...] --format sarif --out findings.sarif
    logsmells stats dataset.jsonl
    logsmells sample --dataset dataset.jsonl --seed 7 --out sample.jsonl
    logsmells score findings.json gold.jsonl
    logsmells check-repos repos.txt --out status.jsonl
    logsmells rules
    logsmells serve --port 5000

Exit codes: 0 clean, 1 findings present (analyze), 2 operational error.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import TOOL_NAME, __version__
from .config_loader import FORMATS, REPORT_MODES, RunConfig, load_config_from_file, validate_sampling
from .corpus import build_records, corpus_stats, read_records, scan_tree, write_jsonl, write_records
from .detectors import primary_per_function
from .engine import load_registry, run_analysis
from .errors import LogSmellsError
from .github import DEFAULT_API_BASE, check_repos, read_repo_list, tally
from .logging_config import get_logger, setup_logging
from .models import FindingsReport, SkipEntry
from .output_generator import (
    generate_outputs,
    generate_stats_outputs,
    render_plan_table,
    render_report,
    render_rules,
    render_score_text,
    render_stats_text,
)
from .sampling import (
    DEFAULT_E,
    DEFAULT_P,
    DEFAULT_Z,
    MODES,
    cochran_plan,
    draw_stratified,
    load_labels,
    score_against_gold,
)

logger = get_logger("cli")

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2


class CommandError(LogSmellsError):
    """A command could not run; reported on stderr with exit code 2."""


def _population(text: str) -> Tuple[str, int]:
    name, sep, value = text.rpartition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=N, got '{text}'")
    try:
        return name, int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"population of '{name}' is not an integer: '{value}'")


def _emit(text: str, out: Optional[str]):
    """Write to a file, or to stdout when no file is given."""
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _dump(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


# =============================================================================
# Subcommands
# =============================================================================

def cmd_scan(args: argparse.Namespace) -> int:
    root = Path(args.root)
    if not root.is_dir():
        raise CommandError(f"not a directory: {root}")
    registry = load_registry(args.registry, args.lexicon)
    skips: List[SkipEntry] = []
    scanned = scan_tree(root, registry, jobs=args.jobs, skips=skips)
    records = build_records(root, scanned, registry, project_name=args.project, skips=skips)

    count = write_records(records, args.out)
    skip_path = args.skips or str(Path(args.out).with_suffix(".skips.jsonl"))
    write_jsonl((s.to_dict() for s in sorted(skips, key=lambda s: s.path)), skip_path)
    logger.info("wrote %d records to %s (%d skipped files)", count, args.out, len(skips))
    return EXIT_CLEAN


def _analysis_config(args: argparse.Namespace) -> RunConfig:
    config = load_config_from_file(args.config) if args.config else RunConfig()
    if args.roots:
        config.roots = list(args.roots)
    if args.dataset:
        config.dataset = args.dataset
    for attr, value in (("registry_path", args.registry), ("lexicon_path", args.lexicon),
                        ("output_format", args.format), ("mode", args.mode),
                        ("min_confidence", args.min_confidence), ("jobs", args.jobs),
                        ("out", args.out), ("artifacts_dir", args.artifacts), ("seed", args.seed)):
        if value is not None:
            setattr(config, attr, value)
    return config


def cmd_analyze(args: argparse.Namespace) -> int:
    config = _analysis_config(args)
    result = run_analysis(config)
    if not result["success"]:
        for error in result["errors"]:
            print(f"error: {error}", file=sys.stderr)
        return EXIT_ERROR

    report: FindingsReport = result["report"]
    _emit(render_report(report, config.output_format), config.out)
    if config.artifacts_dir:
        generate_outputs(report, config.artifacts_dir, config.run_id, result["config"])
    return EXIT_FINDINGS if report.findings else EXIT_CLEAN


def cmd_stats(args: argparse.Namespace) -> int:
    registry = load_registry(args.registry, args.lexicon)
    stats = corpus_stats(read_records(args.dataset), registry)
    text = _dump(stats.to_dict()) if args.format == "json" else render_stats_text(stats)
    _emit(text, args.out)
    if args.artifacts:
        generate_stats_outputs(stats, args.artifacts)
    return EXIT_CLEAN


def _sampling_config(args: argparse.Namespace) -> RunConfig:
    config = load_config_from_file(args.config) if args.config else RunConfig()
    for attr, value in (("dataset", args.dataset), ("registry_path", args.registry),
                        ("lexicon_path", args.lexicon), ("z", args.z), ("p", args.p), ("E", args.E),
                        ("sampling_mode", args.sampling_mode), ("seed", args.seed)):
        if value is not None:
            setattr(config, attr, value)
    errors = validate_sampling(config)
    if errors:
        raise CommandError("; ".join(errors))
    return config


def cmd_sample(args: argparse.Namespace) -> int:
    config = _sampling_config(args)
    if not config.dataset and not args.population:
        raise CommandError("sample needs --dataset or at least one --population NAME=N")

    items = {}
    if config.dataset:
        registry = load_registry(config.registry_path, config.lexicon_path)
        stats = corpus_stats(read_records(config.dataset), registry)
        items = stats.function_strata
        strata = [(name, len(ids)) for name, ids in sorted(items.items())]
    else:
        strata = list(args.population)
    if not strata:
        raise CommandError("no strata to plan: the dataset has no kept functions")

    plan = cochran_plan(strata, z=config.z, p=config.p, E=config.E, mode=config.sampling_mode)
    if args.format == "json":
        sys.stdout.write(_dump(plan.to_dict()))
    else:
        sys.stdout.write(render_plan_table(plan))

    if args.out:
        if not items:
            raise CommandError("--out needs --dataset: explicit populations have no function ids to draw")
        sample = draw_stratified(items, plan, seed=config.seed)
        rows = ({"function_id": fid, "stratum": name} for name in sorted(sample) for fid in sample[name])
        count = write_jsonl(rows, args.out)
        logger.info("wrote %d sampled function ids to %s (seed %d)", count, args.out, config.seed)
    return EXIT_CLEAN


def cmd_score(args: argparse.Namespace) -> int:
    with open(args.findings, "r", encoding="utf-8") as f:
        data = json.load(f)
    try:
        report = FindingsReport.from_dict(data)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise CommandError(f"{args.findings} is not a findings report: {type(exc).__name__}: {exc}")
    predicted = {f.function_id: f.kind.value for f in primary_per_function(report.findings)}
    gold = load_labels(args.gold)
    score = score_against_gold(predicted, gold, strict=not args.sampled_only).to_dict()
    _emit(_dump(score) if args.format == "json" else render_score_text(score), args.out)
    return EXIT_CLEAN


def cmd_check_repos(args: argparse.Namespace) -> int:
    names = read_repo_list(args.repos)
    statuses = check_repos(names, api_base=args.api_base, max_retries=args.retries)
    write_jsonl((s.to_dict() for s in statuses), args.out)
    if args.active_out:
        active = [s.full_name for s in statuses if s.is_active]
        _emit("".join(f"{name}\n" for name in active), args.active_out)
    counts = tally(statuses)
    print(f"total: {counts['total']}  active: {counts['active']}  "
          f"archived: {counts['archived']}  unreachable: {counts['unreachable']}")
    return EXIT_CLEAN


def cmd_rules(args: argparse.Namespace) -> int:
    sys.stdout.write(render_rules())
    return EXIT_CLEAN


def cmd_serve(args: argparse.Namespace) -> int:
    from api.server import run_server
    run_server(host=args.host, port=args.port, runs_dir=args.runs_dir, debug=args.debug)
    return EXIT_CLEAN


# =============================================================================
# Parser
# =============================================================================

def _add_registry_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--registry", help="JSON registry override file")
    parser.add_argument("--lexicon", help="JSON lexicon override file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL_NAME,
                                     description="Detect logging smells in ML Python code")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR (logs go to stderr)")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="Extract logging files of a tree into an NDJSON dataset")
    scan.add_argument("root", help="Repository clone or directory of clones")
    scan.add_argument("--out", required=True, help="Dataset file to write")
    scan.add_argument("--skips", help="Skip log file (default: <out>.skips.jsonl)")
    scan.add_argument("--project", help="Project name recorded in each record (default: root name)")
    scan.add_argument("--jobs", type=int, default=1, help="Parser threads")
    _add_registry_flags(scan)
    scan.set_defaults(handler=cmd_scan)

    analyze = sub.add_parser("analyze", help="Run the smell detectors")
    analyze.add_argument("roots", nargs="*", help="Directories to analyze")
    analyze.add_argument("--dataset", help="Analyze the files of an NDJSON dataset instead")
    analyze.add_argument("--config", help="JSON run configuration; flags override it")
    analyze.add_argument("--format", choices=FORMATS)
    analyze.add_argument("--mode", choices=REPORT_MODES,
                         help="all findings, or one primary finding per function")
    analyze.add_argument("--min-confidence", choices=("Low", "Medium", "High"))
    analyze.add_argument("--jobs", type=int, help="Analysis threads")
    analyze.add_argument("--seed", type=int)
    analyze.add_argument("--out", help="Report file (default: stdout)")
    analyze.add_argument("--artifacts", help="Directory for findings.json, SARIF, summary and charts")
    _add_registry_flags(analyze)
    analyze.set_defaults(handler=cmd_analyze)

    stats = sub.add_parser("stats", help="Corpus statistics of a dataset")
    stats.add_argument("dataset")
    stats.add_argument("--format", choices=("text", "json"), default="text")
    stats.add_argument("--out")
    stats.add_argument("--artifacts", help="Directory for stats.json and charts")
    _add_registry_flags(stats)
    stats.set_defaults(handler=cmd_stats)

    sample = sub.add_parser("sample", help="Stratified sample sizes and a seeded draw")
    sample.add_argument("--dataset", help="Derive strata from the kept functions of a dataset")
    sample.add_argument("--population", type=_population, action="append", metavar="NAME=N",
                        help="Explicit stratum population (repeatable)")
    sample.add_argument("--config", help="JSON run configuration; its sampling section sets the defaults")
    sample.add_argument("--z", type=float, help=f"Confidence z-score (default {DEFAULT_Z})")
    sample.add_argument("--p", type=float, help=f"Expected proportion (default {DEFAULT_P})")
    sample.add_argument("--E", type=float, help=f"Margin of error (default {DEFAULT_E})")
    sample.add_argument("--sampling-mode", choices=MODES)
    sample.add_argument("--seed", type=int)
    sample.add_argument("--format", choices=("text", "json"), default="text")
    sample.add_argument("--out", help="NDJSON file of sampled function ids")
    _add_registry_flags(sample)
    sample.set_defaults(handler=cmd_sample)

    score = sub.add_parser("score", help="Score a findings report against gold labels")
    score.add_argument("findings", help="JSON report written by analyze --format json")
    score.add_argument("gold", help="NDJSON file of {function_id, label}")
    score.add_argument("--sampled-only", action="store_true",
                       help="Ignore predictions for functions outside the gold set")
    score.add_argument("--format", choices=("text", "json"), default="text")
    score.add_argument("--out")
    score.set_defaults(handler=cmd_score)

    repos = sub.add_parser("check-repos", help="Check GitHub repositories for archival")
    repos.add_argument("repos", help="File with one owner/name per line")
    repos.add_argument("--out", required=True, help="NDJSON status file")
    repos.add_argument("--active-out", help="Plain list of active repositories")
    repos.add_argument("--api-base", default=DEFAULT_API_BASE)
    repos.add_argument("--retries", type=int, default=3)
    repos.set_defaults(handler=cmd_check_repos)

    rules = sub.add_parser("rules", help="List the rules")
    rules.set_defaults(handler=cmd_rules)

    serve = sub.add_parser("serve", help="Run the background analysis API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=5000)
    serve.add_argument("--runs-dir", default="runs")
    serve.add_argument("--debug", action="store_true")
    serve.set_defaults(handler=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    try:
        return args.handler(args)
    except (LogSmellsError, OSError, ValueError) as exc:
        logger.debug("command %s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
