import json

import pytest

from logsmells.errors import ConfigError
from logsmells.registry import (
    VERB_ARTIFACT,
    VERB_GENERIC,
    VERB_METRIC,
    VERB_PARAM,
    default_registry,
    lexicon_hits,
    load_lexicons_from_file,
    load_registry_from_file,
    load_registry_from_json,
    pattern_matches,
    split_groups,
    term_matches,
    validate_registry,
)


@pytest.mark.parametrize("term, identifier, expected", [
    ("score", "test_dimscore_mean", True),
    ("loss", "val_loss", True),
    ("learning_rate", "initial_learning_rate", True),
    ("lr", "lr", True),
    ("lr", "clr", False),
    ("acc", "accuracy", False),
    ("api_key", "comet_api_key", True),
    ("token", "tokenizer", False),
])
def test_term_matches(term, identifier, expected):
    assert term_matches(term, identifier) is expected


def test_lexicon_hits_are_sorted_and_unique():
    assert lexicon_hits(["val_loss", "train_loss", "top1_acc"], ["loss", "acc", "f1"]) == ("acc", "loss")


def test_split_groups():
    assert split_groups(["val_loss", "trainAcc"]) == {"valid", "train"}
    assert split_groups(["loss"]) == frozenset()


@pytest.mark.parametrize("path, library", [
    ("logging.getLogger", "logging"),
    ("torch.utils.tensorboard.SummaryWriter", "tensorboard"),
    ("tensorboardX.SummaryWriter", "tensorboard"),
    ("tensorflow.summary.scalar", "tensorflow"),
    ("wandb.init().log", "wandb"),
    ("tensorflow.keras.layers", None),
    ("loggingx.info", None),
])
def test_library_of(registry, path, library):
    assert registry.library_of(path) == library


@pytest.mark.parametrize("path, verb", [
    ("mlflow.log_metric", VERB_METRIC),
    ("wandb.init().log", VERB_METRIC),
    ("torch.utils.tensorboard.SummaryWriter().add_scalar", VERB_METRIC),
    ("mlflow.log_param", VERB_PARAM),
    ("comet_ml.Experiment().log_multiple_params", VERB_PARAM),
    ("mlflow.log_artifact", VERB_ARTIFACT),
    ("mlflow.search_runs", VERB_GENERIC),
])
def test_verb_for(registry, path, verb):
    assert registry.verb_for(path) == verb


def test_pattern_matches_on_dotted_suffix():
    assert pattern_matches("setLevel", "logging.getLogger().setLevel")
    assert pattern_matches("logging.basicConfig", "logging.basicConfig")
    assert not pattern_matches("logging.getLogger", "logging.getLogger().info")
    assert not pattern_matches("init", "wandb.reinit")


def test_default_registry_is_valid(registry):
    assert validate_registry(registry) == []
    assert registry.lexicons.version == "default-1"
    assert registry.digest() == default_registry().digest()


def test_override_extends_defaults():
    reg = load_registry_from_json({
        "ml_specific": ["aim"],
        "config_call_patterns": ["aim.Run"],
        "lexicons": {"metric_terms": ["bpc"]},
    })
    assert reg.library_of("aim.Run().track") == "aim"
    assert reg.is_ml("aim")
    assert reg.library_of("mlflow.log_metric") == "mlflow"
    assert {"bpc", "loss"} <= reg.lexicons.metric_terms
    assert reg.lexicons.version == "default-1+custom"
    assert reg.digest() != default_registry().digest()


def test_lexicon_replace_drops_defaults():
    reg = load_registry_from_json({"lexicons": {"replace": True, "version": "lab-2", "metric_terms": ["bpc"]}})
    assert reg.lexicons.metric_terms == frozenset({"bpc"})
    assert reg.lexicons.version == "lab-2"
    assert "lr" in reg.lexicons.hyperparam_terms


@pytest.mark.parametrize("override", [
    {"tracker_verbs": {"log_thing": "bogus"}},
    {"general_purpose": ["wandb"]},
    {"config_call_patterns": ["nosuchlib.init"]},
    {"lexicons": {"metric_terms": ["Loss"]}},
    {"ml_specific": "wandb"},
])
def test_invalid_overrides_raise(override):
    with pytest.raises(ConfigError):
        load_registry_from_json(override)


def test_load_registry_from_file(tmp_path):
    path = tmp_path / "registry.json"
    path.write_text(json.dumps({"ml_specific": {"aim": "aim"}}), encoding="utf-8")
    assert load_registry_from_file(str(path)).is_ml("aim")
    with pytest.raises(ConfigError):
        load_registry_from_file(str(tmp_path / "missing.json"))


def test_load_lexicons_accepts_bare_lists(tmp_path, registry):
    path = tmp_path / "lexicon.json"
    path.write_text(json.dumps({"sensitive_terms": ["ssn"]}), encoding="utf-8")
    lexicons = load_lexicons_from_file(str(path), base=registry.lexicons)
    assert "ssn" in lexicons.sensitive_terms
    assert "password" in lexicons.sensitive_terms
