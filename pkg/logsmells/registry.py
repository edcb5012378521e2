"""
Library Registry and Lexicons
=============================
Which modules count as logging libraries, which calls configure them,
which tracker methods record metrics/params/artifacts, and the term lists
the detectors match against. Defaults ship here; a JSON override file can
extend or replace any list.
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import ConfigError
from .source_model import segments

VERB_METRIC = "metric"
VERB_PARAM = "param"
VERB_ARTIFACT = "artifact"
VERB_GENERIC = "generic"
TRACKER_VERBS = (VERB_METRIC, VERB_PARAM, VERB_ARTIFACT, VERB_GENERIC)

DEFAULT_GENERAL_PURPOSE = ("logging", "warnings")

# module prefix -> library label
DEFAULT_ML_SPECIFIC = {
    "mlflow": "mlflow",
    "wandb": "wandb",
    "tensorboard": "tensorboard",
    "torch.utils.tensorboard": "tensorboard",
    "tensorboardX": "tensorboard",
    "neptune": "neptune",
    "comet_ml": "comet_ml",
    "dowel": "dowel",
    "ml_logger": "ml_logger",
    "whylogs": "whylogs",
    "sacred": "sacred",
    "tensorflow.summary": "tensorflow",
    "tensorflow.compat.v1.summary": "tensorflow",
    "tensorflow.compat.v2.summary": "tensorflow",
}

DEFAULT_CONFIG_PATTERNS = (
    "logging.basicConfig",
    "logging.getLogger",
    "wandb.init",
    "mlflow.set_tags",
    "neptune.init",
    "setLevel",
    "addHandler",
    "removeHandler",
    "addFilter",
    "logging.config.fileConfig",
    "logging.config.dictConfig",
    "logging.captureWarnings",
    "logging.disable",
    "warnings.simplefilter",
    "warnings.filterwarnings",
    "wandb.login",
    "wandb.watch",
    "wandb.finish",
    "mlflow.set_tag",
    "mlflow.set_experiment",
    "mlflow.set_tracking_uri",
    "mlflow.start_run",
    "mlflow.end_run",
    "mlflow.autolog",
    "neptune.init_run",
    "neptune.create_experiment",
    "neptune.set_project",
    "comet_ml.Experiment",
    "comet_ml.OfflineExperiment",
    "comet_ml.ExistingExperiment",
    "comet_ml.start",
    "comet_ml.init",
    "tensorboard.SummaryWriter",
    "torch.utils.tensorboard.SummaryWriter",
    "tensorboardX.SummaryWriter",
    "tensorflow.summary.create_file_writer",
    "tensorflow.summary.FileWriter",
    "dowel.StdOutput",
    "dowel.CsvOutput",
    "dowel.TextOutput",
    "dowel.TensorBoardOutput",
    "add_output",
    "ml_logger.logger.configure",
    "whylogs.init",
    "sacred.Experiment",
)

DEFAULT_TRACKER_VERBS = {
    "log_metric": VERB_METRIC,
    "log_metrics": VERB_METRIC,
    "wandb.log": VERB_METRIC,
    "wandb.init().log": VERB_METRIC,
    "add_scalar": VERB_METRIC,
    "add_scalars": VERB_METRIC,
    "tensorflow.summary.scalar": VERB_METRIC,
    "log_scalar": VERB_METRIC,
    "dowel.tabular.record": VERB_METRIC,
    "dowel.logger.log": VERB_METRIC,
    "record_tabular": VERB_METRIC,
    "ml_logger.logger.log": VERB_METRIC,
    "ml_logger.logger.store_metrics": VERB_METRIC,
    "[].log": VERB_METRIC,
    "[].append": VERB_METRIC,
    "log_param": VERB_PARAM,
    "log_params": VERB_PARAM,
    "log_multiple_params": VERB_PARAM,
    "log_parameter": VERB_PARAM,
    "log_parameters": VERB_PARAM,
    "log_hyperparams": VERB_PARAM,
    "add_hparams": VERB_PARAM,
    "config.update": VERB_PARAM,
    "log_artifact": VERB_ARTIFACT,
    "log_artifacts": VERB_ARTIFACT,
    "log_model": VERB_ARTIFACT,
    "log_figure": VERB_ARTIFACT,
    "log_image": VERB_ARTIFACT,
    "add_image": VERB_ARTIFACT,
    "add_figure": VERB_ARTIFACT,
    "save": VERB_ARTIFACT,
    "add_artifact": VERB_ARTIFACT,
}

# tracker-only method names seen on receivers the module cannot resolve
DEFAULT_METHOD_HINTS = {
    "add_scalar": "tensorboard",
    "add_scalars": "tensorboard",
    "add_histogram": "tensorboard",
    "add_hparams": "tensorboard",
    "log_multiple_params": "comet_ml",
    "log_multiple_metrics": "comet_ml",
    "log_parameters": "comet_ml",
    "log_metric": "",
    "log_metrics": "",
    "log_param": "",
    "log_params": "",
    "log_scalar": "sacred",
}

DEFAULT_LEXICONS = {
    "version": "default-1",
    "metric_terms": [
        "loss", "acc", "accuracy", "f1", "auc", "roc", "precision", "recall",
        "reward", "score", "rmse", "mae", "mse", "perplexity", "ppl", "bleu",
        "rouge", "iou", "top1", "top5", "error_rate", "wer", "cer", "psnr",
        "ssim", "dice", "kl", "entropy",
    ],
    "hyperparam_terms": [
        "lr", "learning_rate", "epochs", "num_epochs", "n_epochs", "max_epochs",
        "batch_size", "optimizer", "momentum", "weight_decay", "seed",
        "num_layers", "n_layers", "dropout", "scheduler", "num_classes",
        "hidden_size", "hidden_dim", "embedding_dim", "warmup_steps",
        "gamma", "beta1", "beta2", "eps", "clip_grad", "grad_clip",
        "num_heads", "max_steps", "lr_decay",
    ],
    "sensitive_terms": [
        "api_key", "apikey", "token", "password", "passwd", "secret",
        "credential", "credentials", "auth", "access_key", "private_key",
        "secret_key",
    ],
    "heavy_ops": [
        "mean", "max", "min", "sum", "abs", "std", "var", "norm", "matmul",
        "dot", "concatenate", "cat", "stack", "sort", "argsort", "forward",
        "predict", "inference", "evaluate", "histogram", "cpu", "numpy",
    ],
    "generic_messages": [
        "fail", "failed", "error", "done", "ok", "start", "end", "here",
        "success", "finished",
    ],
}

SPLIT_TOKENS = {
    "train": "train", "training": "train", "trn": "train",
    "valid": "valid", "val": "valid", "validation": "valid", "dev": "valid",
    "eval": "valid", "evaluation": "valid",
    "test": "test", "testing": "test",
}

STOPWORDS = frozenset({
    "a", "an", "the", "to", "of", "and", "or", "for", "in", "on", "with", "is",
    "are", "was", "be", "it", "this", "that", "at", "by", "from", "as", "if",
    "not", "no", "s", "d", "f", "self", "model", "data",
})


def _frozen(values: Iterable[str]) -> FrozenSet[str]:
    return frozenset(v for v in values if v)


# =============================================================================
# Lexicons
# =============================================================================

@dataclass(frozen=True)
class Lexicons:
    """Term lists driving detector matching. All terms lowercase."""
    metric_terms: FrozenSet[str]
    hyperparam_terms: FrozenSet[str]
    sensitive_terms: FrozenSet[str]
    heavy_ops: FrozenSet[str]
    generic_messages: FrozenSet[str]
    version: str = "default-1"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": self.version,
            "metric_terms": sorted(self.metric_terms),
            "hyperparam_terms": sorted(self.hyperparam_terms),
            "sensitive_terms": sorted(self.sensitive_terms),
            "heavy_ops": sorted(self.heavy_ops),
            "generic_messages": sorted(self.generic_messages),
        }

    def digest(self) -> str:
        return _digest(self.to_dict())


def term_matches(term: str, identifier: str) -> bool:
    """
    True when `term` occurs in `identifier` on segment boundaries.

    Term segments must equal a contiguous run of identifier segments; a
    single-segment term of four or more characters may also end a segment
    (`score` matches `test_dimscore_mean`).
    """
    id_segs = segments(identifier)
    term_segs = segments(term)
    if not id_segs or not term_segs:
        return False
    width = len(term_segs)
    for i in range(len(id_segs) - width + 1):
        if id_segs[i:i + width] == term_segs:
            return True
    if width == 1 and len(term_segs[0]) >= 4:
        return any(seg.endswith(term_segs[0]) for seg in id_segs)
    return False


def lexicon_hits(identifiers: Iterable[str], terms: Iterable[str]) -> Tuple[str, ...]:
    """Sorted terms matched by at least one identifier."""
    identifiers = [i for i in identifiers if i]
    hits = {t for t in terms for ident in identifiers if term_matches(t, ident)}
    return tuple(sorted(hits))


def split_groups(identifiers: Iterable[str]) -> FrozenSet[str]:
    """Data-split groups (train/valid/test) named by the identifiers."""
    groups = set()
    for ident in identifiers:
        for seg in segments(ident):
            if seg in SPLIT_TOKENS:
                groups.add(SPLIT_TOKENS[seg])
    return frozenset(groups)


# =============================================================================
# Library registry
# =============================================================================

@dataclass(frozen=True)
class LibraryRegistry:
    general_purpose: FrozenSet[str]
    ml_specific: FrozenSet[str]
    config_call_patterns: FrozenSet[str]
    tracker_verbs: Mapping[str, str] = field(hash=False)
    library_aliases: Mapping[str, str] = field(hash=False)
    method_hints: Mapping[str, str] = field(hash=False, default_factory=dict)
    lexicons: Optional[Lexicons] = field(default=None, hash=False)

    def library_of(self, path: str) -> Optional[str]:
        """Library label for a resolved dotted path, longest registry prefix wins."""
        best = None
        for module in self.general_purpose | self.ml_specific:
            if path == module or path.startswith(module + ".") or path.startswith(module + "("):
                if best is None or len(module) > len(best):
                    best = module
        if best is None:
            return None
        return self.library_aliases.get(best, best)

    def is_general(self, library: Optional[str]) -> bool:
        return library in self.general_labels

    def is_ml(self, library: Optional[str]) -> bool:
        return library in self.ml_labels

    @property
    def general_labels(self) -> FrozenSet[str]:
        return frozenset(self.library_aliases.get(m, m) for m in self.general_purpose)

    @property
    def ml_labels(self) -> FrozenSet[str]:
        return frozenset(self.library_aliases.get(m, m) for m in self.ml_specific)

    def verb_for(self, resolved_path: str) -> str:
        """Tracker verb of a resolved callee path; longest matching pattern wins."""
        best_pattern = None
        for pattern in self.tracker_verbs:
            if pattern_matches(pattern, resolved_path):
                if best_pattern is None or len(pattern) > len(best_pattern):
                    best_pattern = pattern
        if best_pattern is None:
            return VERB_GENERIC
        return self.tracker_verbs[best_pattern]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "general_purpose": sorted(self.general_purpose),
            "ml_specific": sorted(self.ml_specific),
            "library_aliases": dict(sorted(self.library_aliases.items())),
            "config_call_patterns": sorted(self.config_call_patterns),
            "tracker_verbs": dict(sorted(self.tracker_verbs.items())),
            "method_hints": dict(sorted(self.method_hints.items())),
        }

    def digest(self) -> str:
        return _digest(self.to_dict())


def pattern_matches(pattern: str, resolved_path: str) -> bool:
    """Dotted-suffix match; call markers `()` in the path are ignored unless the pattern has them."""
    candidates = {resolved_path}
    if "()" not in pattern:
        candidates.add(resolved_path.replace("()", ""))
    for path in candidates:
        if path == pattern or path.endswith("." + pattern):
            return True
        if pattern.startswith("[]") and path.endswith(pattern):
            return True
    return False


def _digest(payload: Dict[str, Any]) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:12]


def validate_registry(reg: LibraryRegistry) -> List[str]:
    """
    Check registry invariants.

    Returns:
        List of error messages (empty if valid)
    """
    errors = []
    overlap = reg.general_purpose & reg.ml_specific
    if overlap:
        errors.append(f"modules listed as both general-purpose and ML-specific: {sorted(overlap)}")
    for pattern, verb in reg.tracker_verbs.items():
        if verb not in TRACKER_VERBS:
            errors.append(f"tracker verb for '{pattern}' must be one of {TRACKER_VERBS}, got '{verb}'")
    known_roots = {m.split(".")[0] for m in reg.general_purpose | reg.ml_specific}
    for pattern in reg.config_call_patterns:
        if "." in pattern and pattern.split(".")[0] not in known_roots:
            errors.append(f"config pattern '{pattern}' names no registry module")
    if reg.lexicons is not None:
        for name, terms in reg.lexicons.to_dict().items():
            if name == "version":
                continue
            upper = [t for t in terms if t != t.lower()]
            if upper:
                errors.append(f"lexicon '{name}' terms must be lowercase: {upper}")
    return errors


# =============================================================================
# Loading
# =============================================================================

def _merge(defaults: Sequence[str], override: Optional[Sequence[str]], replace: bool) -> List[str]:
    if override is None:
        return list(defaults)
    if replace:
        return list(override)
    return list(defaults) + [v for v in override if v not in defaults]


def load_lexicons_from_json(json_data: Dict[str, Any], base: Optional[Lexicons] = None) -> Lexicons:
    """Build Lexicons from defaults (or `base`) plus a JSON override section."""
    source = base.to_dict() if base is not None else DEFAULT_LEXICONS
    replace = bool(json_data.get("replace", False))
    lists = {}
    for name in ("metric_terms", "hyperparam_terms", "sensitive_terms", "heavy_ops", "generic_messages"):
        value = json_data.get(name)
        if value is not None and not isinstance(value, list):
            raise ConfigError(f"lexicon '{name}' must be a list")
        lists[name] = _frozen(_merge(source[name], value, replace))
    version = str(json_data.get("version", source["version"]))
    if json_data and "version" not in json_data:
        version = f"{source['version']}+custom"
    return Lexicons(version=version, **lists)


def load_registry_from_json(json_data: Dict[str, Any]) -> LibraryRegistry:
    """
    Build a LibraryRegistry from defaults plus a JSON override document.

    Args:
        json_data: Parsed override file; every key is optional

    Returns:
        Validated LibraryRegistry

    Raises:
        ConfigError: on malformed sections or violated registry invariants
    """
    replace = bool(json_data.get("replace", False))

    ml_map = dict(DEFAULT_ML_SPECIFIC) if not replace else {}
    ml_override = json_data.get("ml_specific")
    if isinstance(ml_override, dict):
        ml_map.update(ml_override)
    elif isinstance(ml_override, list):
        ml_map.update({m: m for m in ml_override})
    elif ml_override is not None:
        raise ConfigError("'ml_specific' must be a list or a mapping of module -> library")
    elif replace:
        ml_map = dict(DEFAULT_ML_SPECIFIC)

    aliases = {m: label for m, label in ml_map.items() if label != m}
    aliases.update(json_data.get("library_aliases", {}))

    verbs = dict(DEFAULT_TRACKER_VERBS) if not replace or "tracker_verbs" not in json_data else {}
    verb_override = json_data.get("tracker_verbs", {})
    if not isinstance(verb_override, dict):
        raise ConfigError("'tracker_verbs' must map pattern -> verb")
    verbs.update(verb_override)

    hints = dict(DEFAULT_METHOD_HINTS)
    hints.update(json_data.get("method_hints", {}))

    lexicons = load_lexicons_from_json(json_data.get("lexicons", {}))

    reg = LibraryRegistry(
        general_purpose=_frozen(_merge(DEFAULT_GENERAL_PURPOSE, json_data.get("general_purpose"), replace)),
        ml_specific=_frozen(ml_map),
        config_call_patterns=_frozen(
            _merge(DEFAULT_CONFIG_PATTERNS, json_data.get("config_call_patterns"), replace)
        ),
        tracker_verbs=verbs,
        library_aliases=aliases,
        method_hints=hints,
        lexicons=lexicons,
    )
    errors = validate_registry(reg)
    if errors:
        raise ConfigError("; ".join(errors))
    return reg


def load_registry_from_file(filepath: str) -> LibraryRegistry:
    """Load registry overrides from a JSON file."""
    try:
        with open(filepath, "r", encoding="utf-8") as f:
            return load_registry_from_json(json.load(f))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read registry file {filepath}: {exc}") from exc


def load_lexicons_from_file(filepath: str, base: Optional[Lexicons] = None) -> Lexicons:
    """Load a lexicon override file (either bare lists or a `lexicons` section)."""
    try:
        with open(filepath, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read lexicon file {filepath}: {exc}") from exc
    return load_lexicons_from_json(data.get("lexicons", data), base)


def default_registry() -> LibraryRegistry:
    return load_registry_from_json({})
