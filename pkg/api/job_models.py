"""
Job Models
==========
Records for analysis runs submitted through the API.
"""

from dataclasses import asdict, dataclass, field, fields
from datetime import datetime
from enum import Enum
from typing import Any, Dict, Optional
import uuid

CONFIG_SECTIONS = ("input", "analysis", "output", "sampling")


def _timestamp() -> str:
    return datetime.now().isoformat()


class JobStatus(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class AnalysisJob:
    """One analysis run and everything the API reports about it."""
    job_id: str = field(default_factory=lambda: str(uuid.uuid4()))
    status: JobStatus = JobStatus.PENDING
    config: Dict[str, Any] = field(default_factory=dict)

    created_at: str = field(default_factory=_timestamp)
    started_at: Optional[str] = None
    finished_at: Optional[str] = None

    # Filled in when the run finishes
    summary: Optional[Dict[str, Any]] = None
    n_findings: Optional[int] = None
    artifacts: Dict[str, str] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def is_finished(self) -> bool:
        return self.status in (JobStatus.COMPLETED, JobStatus.FAILED)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["status"] = self.status.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AnalysisJob":
        known = {f.name for f in fields(cls)}
        values = {k: v for k, v in data.items() if k in known}
        values["status"] = JobStatus(values.get("status", JobStatus.PENDING.value))
        return cls(**values)


@dataclass
class JobSubmission:
    """Body of POST /api/jobs: RunConfig sections plus an optional seed."""
    sections: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    seed: Optional[int] = None

    @classmethod
    def from_request(cls, body: Dict[str, Any]) -> "JobSubmission":
        """
        Raises:
            TypeError: a section is not a JSON object
            ValueError: the seed is not an integer
        """
        sections = {}
        for name in CONFIG_SECTIONS:
            section = body.get(name)
            if section is None:
                continue
            if not isinstance(section, dict):
                raise TypeError(f"'{name}' must be a JSON object")
            sections[name] = dict(section)
        seed = body.get("seed")
        return cls(sections=sections, seed=None if seed is None else int(seed))

    def to_config_dict(self) -> Dict[str, Any]:
        """The document load_config_from_json reads."""
        config: Dict[str, Any] = {k: v for k, v in self.sections.items() if v}
        if self.seed is not None:
            config["seed"] = self.seed
        return config
