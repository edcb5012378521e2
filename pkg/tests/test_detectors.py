import pytest

from logsmells.detectors import (
    PRINT_DETECTORS,
    applicable_detectors,
    primary_label,
    primary_per_function,
)
from logsmells.models import Confidence, Evidence, SmellFinding, SmellKind

High, Medium, Low = Confidence.HIGH, Confidence.MEDIUM, Confidence.LOW


def of_kind(findings, kind):
    return [f for f in findings if f.kind == kind]


def confidences(findings, kind):
    return [f.confidence for f in of_kind(findings, kind)]


def make_finding(kind, confidence, line, function="f", file="a.py"):
    return SmellFinding(kind, confidence, function, file, line, Evidence((line,), "r"))


# ---------------------------------------------------------------------------
# Ambiguous metrics
# ---------------------------------------------------------------------------

def test_split_contradiction_is_high(findings_for):
    findings = findings_for("""
        import wandb

        def evaluate(train_loss):
            wandb.log({"val_loss": train_loss}, step=1)
    """)
    assert confidences(findings, SmellKind.AMBIGUOUS_METRICS) == [High]


def test_undescriptive_metric_key_is_medium(findings_for):
    findings = findings_for("""
        import mlflow

        def record(v):
            mlflow.log_metric("l", v, step=1)
            mlflow.log_metric("val_loss", v, step=1)
    """)
    assert confidences(findings, SmellKind.AMBIGUOUS_METRICS) == [Medium]


# ---------------------------------------------------------------------------
# Misleading
# ---------------------------------------------------------------------------

MISLEADING_TEMPLATE = """
    import logging

    logger = logging.getLogger(__name__)

    def adjust(optimizer, epoch):
        logger.info("Updating learning rate")
        if epoch > 10:
            {branch}
"""


def test_message_matching_only_an_assignment_is_low(findings_for):
    findings = findings_for(MISLEADING_TEMPLATE.format(branch="rate = 0.01"))
    (finding,) = of_kind(findings, SmellKind.MISLEADING)
    assert finding.confidence == Low
    assert finding.line == 6
    assert 7 in finding.evidence.lines


def test_message_matching_a_conditional_call_is_medium(findings_for):
    findings = findings_for(MISLEADING_TEMPLATE.format(branch="optimizer.update_rate(0.01)"))
    assert confidences(findings, SmellKind.MISLEADING) == [Medium]


def test_message_not_followed_by_conditional(findings_for):
    findings = findings_for("""
        import logging

        logger = logging.getLogger(__name__)

        def adjust(optimizer):
            logger.info("Updating learning rate")
            optimizer.update_rate(0.01)
    """)
    assert of_kind(findings, SmellKind.MISLEADING) == []


# ---------------------------------------------------------------------------
# Heavy data
# ---------------------------------------------------------------------------

def test_heavy_operation_inside_logging_call(findings_for):
    findings = findings_for("""
        import logging
        import numpy as np

        logger = logging.getLogger(__name__)

        def report(losses):
            logger.info("mean loss %.3f", np.mean(losses))

        def watch(batches):
            for batch in batches:
                logger.debug("norm %f", batch.norm())
    """)
    heavy = of_kind(findings, SmellKind.HEAVY_DATA)
    assert [(f.function, f.confidence) for f in heavy] == [("report", Medium), ("watch", High)]
    assert heavy[0].lexicon_hits == ("mean",)


def test_logging_routine_computing_values(findings_for):
    findings = findings_for("""
        import logging
        import numpy as np

        logger = logging.getLogger(__name__)

        def log_stats(weights):
            avg = np.mean(weights)
            spread = np.std(weights)
            size = np.linalg.norm(weights)
            logger.info("stats %s %s %s", avg, spread, size)
    """)
    (finding,) = of_kind(findings, SmellKind.HEAVY_DATA)
    assert finding.confidence == Medium
    assert finding.line == 7
    assert finding.lexicon_hits == ("mean", "norm", "std")


# ---------------------------------------------------------------------------
# Misconfigured
# ---------------------------------------------------------------------------

def test_configuration_mixed_with_program_logic(findings_for):
    findings = findings_for("""
        import logging

        def train(data):
            logging.basicConfig(level=logging.INFO)
            model = fit(data)
            logging.info("trained %s", model)
            return model
    """)
    (finding,) = of_kind(findings, SmellKind.MISCONFIGURED)
    assert finding.confidence == Medium
    assert finding.line == 4


def test_setup_functions_are_exempt_unless_guarded(findings_for):
    findings = findings_for("""
        import logging

        def setup_logging():
            logging.basicConfig(level=logging.INFO)
            prepare()

        def configure(verbose):
            if verbose:
                logging.basicConfig(level=logging.DEBUG)
    """)
    misconfigured = of_kind(findings, SmellKind.MISCONFIGURED)
    assert [(f.function, f.confidence) for f in misconfigured] == [("configure", High)]


def test_tracker_configuration_inside_training_code(findings_for):
    findings = findings_for("""
        import mlflow
        import wandb

        def train(data, resume):
            if resume:
                wandb.init(project="p")
            mlflow.set_experiment("baseline")
            return fit(data)
    """)
    misconfigured = of_kind(findings, SmellKind.MISCONFIGURED)
    assert [(f.line, f.confidence) for f in misconfigured] == [(6, High), (7, Medium)]


# ---------------------------------------------------------------------------
# Misrouted metric
# ---------------------------------------------------------------------------

def test_metric_sent_to_logger_in_tracked_file(findings_for):
    findings = findings_for("""
        import logging
        import mlflow

        logger = logging.getLogger(__name__)

        def track(v):
            mlflow.log_metric("accuracy", v, step=1)

        def report(loss):
            logger.info("loss is %.3f", loss)
    """)
    (finding,) = of_kind(findings, SmellKind.MISROUTED_METRIC)
    assert finding.function == "report"
    assert finding.confidence == Medium
    assert finding.lexicon_hits == ("loss",)


def test_metric_printed_next_to_tracker_call_is_high(findings_for):
    findings = findings_for("""
        import mlflow

        def step(loss):
            mlflow.log_metric("loss", loss, step=1)
            print("loss", loss)
    """)
    (finding,) = of_kind(findings, SmellKind.MISROUTED_METRIC)
    assert finding.confidence == High
    assert finding.evidence.lines == (4, 5)


# ---------------------------------------------------------------------------
# Metric overwrite
# ---------------------------------------------------------------------------

def test_metric_in_loop_without_step(findings_for):
    findings = findings_for("""
        import mlflow

        def fit(batches):
            for batch in batches:
                mlflow.log_metric("loss", batch.loss)
    """)
    assert confidences(findings, SmellKind.METRIC_OVERWRITE) == [Medium]


def test_same_key_logged_twice_without_step(findings_for):
    findings = findings_for("""
        import mlflow

        def report(a, b):
            mlflow.log_metric("acc", a)
            mlflow.log_metric("acc", b)
    """)
    (finding,) = of_kind(findings, SmellKind.METRIC_OVERWRITE)
    assert finding.confidence == High
    assert finding.line == 5
    assert finding.evidence.lines == (4, 5)


def test_stepped_metrics_do_not_overwrite(findings_for):
    findings = findings_for("""
        import mlflow

        def fit(batches):
            for i, batch in enumerate(batches):
                mlflow.log_metric("loss", batch.loss, step=i)
    """)
    assert of_kind(findings, SmellKind.METRIC_OVERWRITE) == []


# ---------------------------------------------------------------------------
# Log without context
# ---------------------------------------------------------------------------

LWC_TEMPLATE = """
    import logging

    logger = logging.getLogger(__name__)

    def load(path):
        try:
            return open(path).read()
        except Exception as e:
            {handler}
"""


def test_bare_exception_object_is_high(findings_for):
    findings = findings_for(LWC_TEMPLATE.format(handler="logger.error(e)"))
    (finding,) = of_kind(findings, SmellKind.LOG_WITHOUT_CONTEXT)
    assert finding.confidence == High
    assert "exception object" in finding.evidence.rationale


def test_generic_message_is_medium(findings_for):
    findings = findings_for(LWC_TEMPLATE.format(handler='logger.error("failed")'))
    assert confidences(findings, SmellKind.LOG_WITHOUT_CONTEXT) == [Medium]


def test_descriptive_message_has_context(findings_for):
    findings = findings_for(LWC_TEMPLATE.format(handler='logger.error("Failed to load checkpoint %s", path)'))
    assert of_kind(findings, SmellKind.LOG_WITHOUT_CONTEXT) == []


# ---------------------------------------------------------------------------
# Missing hyperparameters
# ---------------------------------------------------------------------------

def test_hyperparameters_never_logged(findings_for):
    findings = findings_for("""
        import wandb

        def fit(model, lr, batch_size):
            for epoch in range(3):
                wandb.log({"loss": model.step()}, step=epoch)
    """)
    (finding,) = of_kind(findings, SmellKind.MISSING_HYPERPARAMETER)
    assert finding.confidence == Medium
    assert finding.lexicon_hits == ("batch_size", "lr")
    assert finding.line == 5


def test_hyperparameters_logged_through_run_config(findings_for):
    findings = findings_for("""
        import wandb

        def fit(model, lr, batch_size):
            wandb.init(config={"lr": lr, "batch_size": batch_size})
            for epoch in range(3):
                wandb.log({"loss": model.step()}, step=epoch)
    """)
    assert of_kind(findings, SmellKind.MISSING_HYPERPARAMETER) == []


# ---------------------------------------------------------------------------
# Print-based metrics and print logging
# ---------------------------------------------------------------------------

def test_printed_metric_without_tracker_is_medium(findings_for):
    findings = findings_for("""
        import logging

        def evaluate(acc):
            print("accuracy", acc)
    """)
    (finding,) = of_kind(findings, SmellKind.PRINT_BASED_METRICS)
    assert finding.confidence == Medium
    assert finding.lexicon_hits == ("acc", "accuracy")


def test_printed_metric_with_tracker_is_high(findings_for):
    findings = findings_for("""
        import wandb

        def evaluate(acc):
            print("accuracy", acc)
    """)
    assert confidences(findings, SmellKind.PRINT_BASED_METRICS) == [High]


def test_status_print_in_logging_file(findings_for):
    findings = findings_for("""
        import logging

        def run():
            print("Training finished")
    """)
    (finding,) = of_kind(findings, SmellKind.PRINT_LOGGING)
    assert finding.confidence == Medium
    assert finding.lexicon_hits == ("finished",)


@pytest.mark.parametrize("source", [
    """
    def run():
        print("Training finished")
    """,
    """
    import logging
    import sys

    def run():
        print("Training finished", file=sys.stderr)
    """,
])
def test_print_logging_exemptions(findings_for, source):
    assert of_kind(findings_for(source), SmellKind.PRINT_LOGGING) == []


def test_print_in_exception_handler_is_high(findings_for):
    findings = findings_for("""
        import logging

        def run(job):
            try:
                job()
            except RuntimeError as err:
                print("job crashed", err)
    """)
    assert confidences(findings, SmellKind.PRINT_LOGGING) == [High]


# ---------------------------------------------------------------------------
# Sensitive data
# ---------------------------------------------------------------------------

def test_sensitive_parameter_is_medium(findings_for):
    findings = findings_for("""
        import logging

        logger = logging.getLogger(__name__)

        def connect(user, password):
            logger.info("connecting %s with %s", user, password)
    """)
    (finding,) = of_kind(findings, SmellKind.SENSITIVE_DATA)
    assert finding.confidence == Medium
    assert finding.lexicon_hits == ("password",)


def test_sensitive_local_is_high(findings_for):
    findings = findings_for("""
        import logging

        logger = logging.getLogger(__name__)

        def login(client):
            token = client.fetch_token()
            logger.debug("got token %s", token)
    """)
    assert confidences(findings, SmellKind.SENSITIVE_DATA) == [High]


def test_dict_holding_secret_logged_wholesale(findings_for):
    findings = findings_for("""
        import logging

        logger = logging.getLogger(__name__)

        def show(key):
            creds = {"api_key": key}
            logger.info("config %s", creds)
    """)
    (finding,) = of_kind(findings, SmellKind.SENSITIVE_DATA)
    assert finding.confidence == High
    assert finding.evidence.lines == (6, 7)


# ---------------------------------------------------------------------------
# Incorrect level
# ---------------------------------------------------------------------------

LEVEL_TEMPLATE = """
    import logging

    logger = logging.getLogger(__name__)

    def transfer():
        {call}
"""


@pytest.mark.parametrize("call, expected", [
    ('logger.info("Download failed")', [Medium]),
    ('logger.error("Upload completed successfully")', [Low]),
    ('logger.error("Upload not completed")', []),
    ('logger.warning("Download failed")', []),
])
def test_level_against_message(findings_for, call, expected):
    findings = findings_for(LEVEL_TEMPLATE.format(call=call))
    assert confidences(findings, SmellKind.INCORRECT_LEVEL) == expected


def test_handled_exception_at_info_is_high(findings_for):
    findings = findings_for("""
        import logging

        logger = logging.getLogger(__name__)

        def fetch(url):
            try:
                download(url)
            except IOError:
                logger.info("retrying %s", url)
    """)
    assert confidences(findings, SmellKind.INCORRECT_LEVEL) == [High]


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------

def test_applicable_detectors(classify):
    module = classify("""
        import logging

        def kept():
            logging.info("ready")

        def printer():
            print("hi")

        def setup():
            logging.basicConfig()
    """)
    kept, printer, setup = module.functions
    assert applicable_detectors(kept) == list(SmellKind)
    assert applicable_detectors(printer) == list(PRINT_DETECTORS) + [SmellKind.MISCONFIGURED]
    assert applicable_detectors(setup) == [SmellKind.MISCONFIGURED]


def test_primary_label_follows_smell_priority():
    findings = [
        make_finding(SmellKind.PRINT_LOGGING, High, 2),
        make_finding(SmellKind.METRIC_OVERWRITE, High, 3),
        make_finding(SmellKind.SENSITIVE_DATA, Low, 9),
    ]
    assert primary_label(findings).kind == SmellKind.SENSITIVE_DATA
    assert primary_label([]) is None


def test_primary_label_ties_break_on_confidence_then_line():
    medium_early = make_finding(SmellKind.HEAVY_DATA, Medium, 3)
    high_late = make_finding(SmellKind.HEAVY_DATA, High, 9)
    high_early = make_finding(SmellKind.HEAVY_DATA, High, 5)
    assert primary_label([medium_early, high_late]) is high_late
    assert primary_label([high_late, high_early]) is high_early


def test_primary_per_function_keeps_one_per_function():
    findings = [
        make_finding(SmellKind.PRINT_LOGGING, Medium, 4, function="a"),
        make_finding(SmellKind.INCORRECT_LEVEL, Low, 5, function="a"),
        make_finding(SmellKind.HEAVY_DATA, High, 12, function="b"),
    ]
    primaries = primary_per_function(findings)
    assert [(p.function, p.kind) for p in primaries] == [
        ("a", SmellKind.INCORRECT_LEVEL),
        ("b", SmellKind.HEAVY_DATA),
    ]


def test_evidence_stays_inside_function(findings_for):
    findings = findings_for("""
        import mlflow

        def track(v):
            mlflow.log_metric("accuracy", v, step=1)

        def report(loss):
            print("loss", loss)
    """)
    assert findings
    for finding in findings:
        if finding.function == "report":
            assert all(6 <= n <= 7 for n in finding.evidence.lines)
