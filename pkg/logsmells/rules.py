"""
Rule catalogue: one entry per smell, ML-LOG-001 through ML-LOG-012.
"""

from dataclasses import dataclass
from typing import Dict, List

from .models import SmellKind


@dataclass(frozen=True)
class Rule:
    kind: SmellKind
    name: str
    definition: str
    rubric: str
    remediation: str

    @property
    def rule_id(self) -> str:
        return self.kind.rule_id


RULES: Dict[SmellKind, Rule] = {
    SmellKind.AMBIGUOUS_METRICS: Rule(
        SmellKind.AMBIGUOUS_METRICS,
        "Ambiguous metrics logging",
        "A logged metric lacks a clear description, or its name contradicts the value logged "
        "(a train_* key carrying a validation value).",
        "High: the metric key names one data split while the value names another. "
        "Medium: the payload is a bare identifier of at most two characters with no message text, "
        "or the metric key itself is at most two characters.",
        "Name every metric after what it measures and which split it comes from; keep the key "
        "and the logged variable consistent.",
    ),
    SmellKind.MISLEADING: Rule(
        SmellKind.MISLEADING,
        "Misleading logging",
        "A log statement announces an action that the following code only performs conditionally.",
        "Low: the message shares a word stem with a call or assignment inside the next conditional. "
        "Medium: the shared stem is a called function's name that appears in no other branch.",
        "Move the log inside the branch that performs the action, or reword it to state the check.",
    ),
    SmellKind.HEAVY_DATA: Rule(
        SmellKind.HEAVY_DATA,
        "Heavy data logging",
        "Expensive computations (aggregations, tensor ops, inference) run inside logging calls "
        "or logging routines.",
        "Medium: one heavy operation in a logging call outside a loop, or a log/record/track function "
        "feeding three or more heavy results into its logs. "
        "High: two or more heavy operations in one call, or any heavy operation in a loop-resident log.",
        "Compute statistics once, outside the logging path, or log raw values and aggregate in the "
        "tracker.",
    ),
    SmellKind.MISCONFIGURED: Rule(
        SmellKind.MISCONFIGURED,
        "Misconfigured logging",
        "Logging frameworks are configured inside program logic instead of one central place.",
        "High: a configuration call sits under a conditional inside a function. "
        "Medium: an unconditional general-purpose configuration call inside a non-setup function "
        "that also does other work.",
        "Configure logging once at the application entry point or from a configuration file; "
        "libraries should not configure logging at all.",
    ),
    SmellKind.MISROUTED_METRIC: Rule(
        SmellKind.MISROUTED_METRIC,
        "Misrouted metric logging",
        "Metrics go to a general-purpose logger or print while an experiment tracker is in use.",
        "High: the same function also records tracker metrics. "
        "Medium: another function in the same file does.",
        "Record every evaluation metric through the experiment tracker.",
    ),
    SmellKind.METRIC_OVERWRITE: Rule(
        SmellKind.METRIC_OVERWRITE,
        "Metric overwrite",
        "The same metric key is logged repeatedly without a step, so later values silently replace "
        "earlier ones.",
        "High: one literal key logged two or more times in a function without a step. "
        "Medium: a metric call without a step inside a loop.",
        "Pass an explicit step (or timestamp) or use distinct keys.",
    ),
    SmellKind.LOG_WITHOUT_CONTEXT: Rule(
        SmellKind.LOG_WITHOUT_CONTEXT,
        "Log without context",
        "Log messages carry a bare value or a generic word instead of a descriptive message.",
        "High: the message is a bare variable or exception with no literal words. "
        "Medium: a generic message ('fail', 'done') with fewer than two other words.",
        "Say what happened and include the identifying values (operation, inputs, outcome).",
    ),
    SmellKind.MISSING_HYPERPARAMETER: Rule(
        SmellKind.MISSING_HYPERPARAMETER,
        "Missing hyperparameter logging",
        "A function tracks metrics and uses hyperparameters but never logs them to the tracker.",
        "Medium: two or three distinct hyperparameter names referenced. High: four or more.",
        "Log the full hyperparameter set (log_params / config update) at the start of the run.",
    ),
    SmellKind.PRINT_BASED_METRICS: Rule(
        SmellKind.PRINT_BASED_METRICS,
        "Print-based metrics",
        "Metrics are printed to standard output instead of recorded by a tracker.",
        "High: the file imports an experiment tracker. Medium: it does not.",
        "Record metrics with an experiment tracker (or at least a logger).",
    ),
    SmellKind.PRINT_LOGGING: Rule(
        SmellKind.PRINT_LOGGING,
        "Print logging",
        "print() is used for status or error reporting in code that has a logging framework available.",
        "High: the print sits in an exception handler. Medium: its words are generic status or error "
        "vocabulary. Prints redirected with file= are exempt.",
        "Use the logger at the appropriate level.",
    ),
    SmellKind.SENSITIVE_DATA: Rule(
        SmellKind.SENSITIVE_DATA,
        "Logging sensitive data",
        "Credentials or secrets reach logs or experiment metadata.",
        "High: a logging or tracker call names a sensitive variable or key, or logs a local dict whose "
        "literal construction holds a sensitive key. Medium: a sensitive function parameter is logged.",
        "Remove secrets before logging; pass credentials through environment variables or secret stores.",
    ),
    SmellKind.INCORRECT_LEVEL: Rule(
        SmellKind.INCORRECT_LEVEL,
        "Incorrect log level",
        "The severity level does not match the event logged.",
        "High: info/debug inside an exception handler. Medium: info/debug with failure vocabulary. "
        "Low: error/critical/fatal with success vocabulary and no negation.",
        "Log failures at warning/error (exception inside handlers), routine progress at info/debug.",
    ),
}


def all_rules() -> List[Rule]:
    return [RULES[kind] for kind in SmellKind]
