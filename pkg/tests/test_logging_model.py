import pytest

from logsmells.logging_model import (
    CHANNEL_GENERAL,
    CHANNEL_PRINT,
    CHANNEL_TRACKER,
    GENERAL_PURPOSE,
    HYBRID,
    LEVELS,
    ML_SPECIFIC,
    classify_call,
    detect_logging_imports,
    filter_functions,
    is_config_call,
)
from logsmells.registry import VERB_METRIC, VERB_PARAM, load_registry_from_json


def calls_of(module, name):
    fn = next(f for f in module.functions if f.function.name == name)
    return fn.calls


@pytest.mark.parametrize("source, libraries, library_type", [
    ("import logging\n", {"logging"}, GENERAL_PURPOSE),
    ("from torch.utils.tensorboard import SummaryWriter\n", {"tensorboard"}, ML_SPECIFIC),
    ("import logging\nimport mlflow.pytorch\n", {"logging", "mlflow"}, HYBRID),
    ("import tensorflow.summary as tfs\n", {"tensorflow"}, ML_SPECIFIC),
    ("import tensorflow as tf\nimport os\n", set(), None),
])
def test_detect_logging_imports(parse, registry, source, libraries, library_type):
    profile = detect_logging_imports(parse(source), registry)
    assert profile.libraries_used == frozenset(libraries)
    assert profile.library_type == library_type


def test_general_calls_through_aliases(classify):
    module = classify("""
        import logging as lg

        log = lg.getLogger(__name__)

        def f(err):
            log.info("started")
            lg.getLogger("x").warning("slow")
            log.log(lg.ERROR, "broken")
            log.exception(err)
    """)
    calls = calls_of(module, "f")
    assert [(c.channel, c.level, c.library) for c in calls] == [
        (CHANNEL_GENERAL, "info", "logging"),
        (CHANNEL_GENERAL, "warning", "logging"),
        (CHANNEL_GENERAL, None, "logging"),
        (CHANNEL_GENERAL, "error", "logging"),
        (CHANNEL_GENERAL, "exception", "logging"),
    ]
    assert calls[2].is_config
    assert calls[0].message_words == ("started",)


def test_unresolved_logger_receivers(classify):
    module = classify("""
        import logging

        class Job:
            def run(self):
                self.logger.error("boom")
                self._log.debug("tick")
                self.results.info()
    """)
    calls = calls_of(module, "run")
    assert [(c.level, c.site.callee_path) for c in calls] == [
        ("error", "self.logger.error"),
        ("debug", "self._log.debug"),
    ]


def test_tracker_calls(classify):
    module = classify("""
        import mlflow
        import wandb
        from torch.utils.tensorboard import SummaryWriter

        writer = SummaryWriter()
        run = wandb.init(project="demo")

        def f(i, v, params):
            mlflow.log_params(params)
            mlflow.log_metric(f"loss_{i}", v)
            writer.add_scalar("acc", v, i)
            run.log({"val_loss": v, "val_acc": v}, step=i)
            wandb.log({"lr": v})
    """)
    calls = calls_of(module, "f")
    assert all(c.channel == CHANNEL_TRACKER for c in calls)
    assert [c.library for c in calls] == ["mlflow", "mlflow", "tensorboard", "wandb", "wandb"]
    assert calls[0].tracker_verb == VERB_PARAM and not calls[0].is_metric
    assert calls[1].is_metric and calls[1].metric_key == "loss_{}" and not calls[1].has_step
    assert calls[2].metric_key == "acc" and calls[2].has_step
    assert calls[3].metric_keys == ("val_loss", "val_acc") and calls[3].has_step
    assert calls[4].tracker_verb == VERB_METRIC and not calls[4].has_step


def test_method_hints_resolve_unknown_receivers(classify):
    module = classify("""
        import comet_ml

        def f(experiment, params):
            experiment.log_multiple_params(params)
    """)
    (call,) = calls_of(module, "f")
    assert call.library == "comet_ml"
    assert call.tracker_verb == VERB_PARAM


def test_print_calls(classify):
    module = classify("""
        import sys

        def f(acc):
            print("accuracy", acc)
            print("oops", file=sys.stderr)
    """)
    calls = calls_of(module, "f")
    assert [c.channel for c in calls] == [CHANNEL_PRINT, CHANNEL_PRINT]
    assert [c.redirected for c in calls] == [False, True]
    assert calls[0].message_words == ("accuracy",)


def test_shadowed_print_is_not_a_print_call(classify):
    module = classify("""
        from rich import print

        def f():
            print("hello")
    """)
    assert calls_of(module, "f") == ()


def test_config_calls(classify, registry):
    module = classify("""
        import logging
        import wandb

        def setup():
            logging.basicConfig(level=logging.INFO)
            logging.getLogger().setLevel(logging.DEBUG)
            wandb.init(project="demo", config={"lr": 0.1})
    """)
    calls = calls_of(module, "setup")
    assert len(calls) == 4
    assert all(c.is_config for c in calls)
    assert all(is_config_call(c, registry) for c in calls)
    assert all(c.level is None for c in calls)


def test_general_event_calls_always_carry_a_level(classify):
    module = classify("""
        import logging

        logger = logging.getLogger(__name__)

        def f():
            logger.debug("a")
            logger.warn("b")
            logger.log(logging.CRITICAL, "c")
            logger.log(level, "d")
            logger.handlers.clear()
    """)
    events = [c for c in module.all_calls() if c.channel == CHANNEL_GENERAL and c.is_event]
    assert [c.level for c in events] == ["debug", "warn", "critical", "info"]
    assert all(c.level in LEVELS for c in events)


def test_filter_drops_configuration_only_functions(classify):
    config_only = """
        import logging
        import mlflow
        import neptune
        import wandb

        def setup():
            logging.basicConfig()
            logging.getLogger()
            wandb.init()
            mlflow.set_tags({"team": "a"})
            neptune.init()
    """
    kept, dropped = filter_functions(classify(config_only).functions)
    assert [f.function.name for f in dropped] == ["setup"]
    assert kept == []

    with_event = config_only + "        logging.getLogger().info(\"ready\")\n"
    kept, dropped = filter_functions(classify(with_event).functions)
    assert [f.function.name for f in kept] == ["setup"]
    assert dropped == []


def test_filter_rematches_config_calls_against_registry(classify):
    module = classify("""
        import mlflow

        def record(params):
            mlflow.log_params(params)
    """)
    kept, dropped = filter_functions(module.functions)
    assert [f.function.name for f in kept] == ["record"]

    strict = load_registry_from_json({"config_call_patterns": ["mlflow.log_params"]})
    kept, dropped = filter_functions(module.functions, strict)
    assert kept == []
    assert [f.function.name for f in dropped] == ["record"]


def test_all_calls_are_in_line_order(classify):
    module = classify("""
        import logging
        logger = logging.getLogger(__name__)

        def b():
            logger.info("two")

        def a():
            logger.info("three")
    """)
    assert [c.line for c in module.all_calls()] == [2, 5, 8]


def test_classify_call_uses_import_bindings(parse, registry):
    tree = parse("""
        import mlflow as mf
        import os

        def f(v):
            mf.log_metric("acc", v)
            os.getcwd()
    """)
    metric, other = tree.functions[0].calls
    call = classify_call(metric, tree.imports, registry)
    assert call.library == "mlflow"
    assert call.channel == CHANNEL_TRACKER and call.is_metric
    assert call.resolved_path == "mlflow.log_metric"
    assert classify_call(other, tree.imports, registry) is None
