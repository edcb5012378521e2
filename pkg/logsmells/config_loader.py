"""
Run Configuration Loader
========================
Loads analysis run parameters from JSON input with validation and defaults.
"""

from dataclasses import dataclass, field
from typing import Optional, Dict, Any, List
import json
import os
import uuid

from .models import Confidence
from .sampling import DEFAULT_E, DEFAULT_P, DEFAULT_Z, MODES

FORMATS = ("text", "json", "sarif")
MODE_ALL = "all"
MODE_PRIMARY = "primary"
REPORT_MODES = (MODE_ALL, MODE_PRIMARY)


@dataclass
class RunConfig:
    """Complete configuration for one analysis run."""

    # Run metadata
    run_id: str = field(default_factory=lambda: str(uuid.uuid4())[:8])
    seed: int = 42

    # Input
    roots: List[str] = field(default_factory=list)
    dataset: Optional[str] = None
    registry_path: Optional[str] = None
    lexicon_path: Optional[str] = None

    # Analysis
    mode: str = MODE_ALL
    min_confidence: str = "Low"
    jobs: int = 1

    # Output
    output_format: str = "text"
    out: Optional[str] = None
    artifacts_dir: Optional[str] = None

    # Sampling
    z: float = DEFAULT_Z
    p: float = DEFAULT_P
    E: float = DEFAULT_E
    sampling_mode: str = "raw"

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary for serialization."""
        return {
            "run_id": self.run_id,
            "seed": self.seed,
            "input": {
                "roots": list(self.roots),
                "dataset": self.dataset,
                "registry": self.registry_path,
                "lexicon": self.lexicon_path,
            },
            "analysis": {
                "mode": self.mode,
                "min_confidence": self.min_confidence,
                "jobs": self.jobs,
            },
            "output": {
                "format": self.output_format,
                "out": self.out,
                "artifacts_dir": self.artifacts_dir,
            },
            "sampling": {
                "z": self.z,
                "p": self.p,
                "E": self.E,
                "mode": self.sampling_mode,
            },
        }


def load_config_from_json(json_data: Dict[str, Any]) -> RunConfig:
    """
    Parse JSON input into a RunConfig.

    Missing sections and keys keep their defaults; values are coerced but not
    range-checked (see validate_config).
    """
    config = RunConfig()

    if "run_id" in json_data:
        config.run_id = str(json_data["run_id"])
    if "seed" in json_data:
        config.seed = int(json_data["seed"])

    inp = json_data.get("input", {})
    if "roots" in inp:
        roots = inp["roots"]
        config.roots = [roots] if isinstance(roots, str) else [str(r) for r in roots]
    if "dataset" in inp:
        config.dataset = inp["dataset"]
    if "registry" in inp:
        config.registry_path = inp["registry"]
    if "lexicon" in inp:
        config.lexicon_path = inp["lexicon"]

    analysis = json_data.get("analysis", {})
    if "mode" in analysis:
        config.mode = str(analysis["mode"])
    if "min_confidence" in analysis:
        config.min_confidence = str(analysis["min_confidence"])
    if "jobs" in analysis:
        config.jobs = int(analysis["jobs"])

    output = json_data.get("output", {})
    if "format" in output:
        config.output_format = str(output["format"])
    if "out" in output:
        config.out = output["out"]
    if "artifacts_dir" in output:
        config.artifacts_dir = output["artifacts_dir"]

    sampling = json_data.get("sampling", {})
    if "z" in sampling:
        config.z = float(sampling["z"])
    if "p" in sampling:
        config.p = float(sampling["p"])
    if "E" in sampling:
        config.E = float(sampling["E"])
    if "mode" in sampling:
        config.sampling_mode = str(sampling["mode"])

    return config


def load_config_from_file(filepath: str) -> RunConfig:
    """Load configuration from a JSON file."""
    with open(filepath, 'r', encoding='utf-8') as f:
        return load_config_from_json(json.load(f))


def validate_config(config: RunConfig) -> list:
    """
    Validate configuration values.

    Returns:
        List of validation error messages (empty if valid)
    """
    errors = []

    if not config.roots and not config.dataset:
        errors.append("input needs at least one root directory or a dataset file")
    if config.roots and config.dataset:
        errors.append("give either root directories or a dataset, not both")
    for root in config.roots:
        if not os.path.isdir(root):
            errors.append(f"root is not a directory: {root}")
    if config.dataset and not os.path.isfile(config.dataset):
        errors.append(f"dataset file not found: {config.dataset}")
    for label, path in (("registry", config.registry_path), ("lexicon", config.lexicon_path)):
        if path and not os.path.isfile(path):
            errors.append(f"{label} override not found: {path}")

    if config.output_format not in FORMATS:
        errors.append(f"format must be one of {', '.join(FORMATS)}")
    if config.mode not in REPORT_MODES:
        errors.append(f"mode must be one of {', '.join(REPORT_MODES)}")
    try:
        Confidence.parse(config.min_confidence)
    except ValueError:
        errors.append("min_confidence must be Low, Medium or High")

    if config.jobs < 1:
        errors.append("jobs must be at least 1")
    if config.jobs > 64:
        errors.append("jobs cannot exceed 64")

    errors.extend(validate_sampling(config))
    return errors


def validate_sampling(config: RunConfig) -> list:
    """Errors in the `sampling` section only; `sample` runs need no analysis input."""
    errors = []
    if config.z <= 0:
        errors.append("z must be positive")
    if not 0.0 < config.p < 1.0:
        errors.append("p must be between 0 and 1")
    if config.E <= 0:
        errors.append("E must be positive")
    if config.sampling_mode not in MODES:
        errors.append(f"sampling mode must be one of {', '.join(MODES)}")
    return errors
