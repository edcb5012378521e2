import logging
import os
import sys
import textwrap
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from logsmells.detectors import analyze_module  # noqa: E402
from logsmells.logging_config import ROOT_LOGGER_NAME  # noqa: E402
from logsmells.logging_model import classify_module  # noqa: E402
from logsmells.registry import default_registry  # noqa: E402
from logsmells.source_model import parse_module  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
LISTINGS_DIR = FIXTURES / "listings"
CORPUS_DIR = FIXTURES / "corpus" / "demo_project"


def dedent(source: str) -> str:
    return textwrap.dedent(source).lstrip("\n")


@pytest.fixture(autouse=True)
def _reset_package_logger():
    yield
    logger = logging.getLogger(ROOT_LOGGER_NAME)
    logger.handlers.clear()
    logger.propagate = True


@pytest.fixture(autouse=True)
def _no_github_token(monkeypatch):
    monkeypatch.delenv("GITHUB_TOKEN", raising=False)


@pytest.fixture
def registry():
    return default_registry()


@pytest.fixture
def parse():
    def _parse(source: str, path: str = "sample.py"):
        return parse_module(dedent(source), path)
    return _parse


@pytest.fixture
def classify(registry):
    def _classify(source: str, path: str = "sample.py"):
        return classify_module(parse_module(dedent(source), path), registry)
    return _classify


@pytest.fixture
def findings_for(registry):
    """Every finding the detectors report for a source snippet."""
    def _run(source: str, path: str = "sample.py"):
        module = classify_module(parse_module(dedent(source), path), registry)
        return analyze_module(module, registry, registry.lexicons)
    return _run


@pytest.fixture
def write_tree(tmp_path):
    """Create files under tmp_path from a {relative path: text} mapping."""
    def _write(files, root=None):
        base = Path(root) if root else tmp_path / "project"
        for rel, text in files.items():
            path = base / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            if isinstance(text, bytes):
                path.write_bytes(text)
            else:
                path.write_text(dedent(text), encoding="utf-8")
        return base
    return _write


def symlinks_supported(tmp_path) -> bool:
    try:
        os.symlink(tmp_path, tmp_path / ".symlink-check")
    except (OSError, NotImplementedError):
        return False
    os.unlink(tmp_path / ".symlink-check")
    return True
