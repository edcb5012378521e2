"""
GitHub Repository Checker
=========================
Confirms that candidate repositories still exist and are not archived, using
GET /repos/{owner}/{repo} of the GitHub REST API.
"""

import os
import re
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, List, Optional

import requests

from .errors import AuthError, ConfigError, NetworkError, NotFound
from .logging_config import get_logger
from .models import RepoStatus

logger = get_logger(__name__)

DEFAULT_API_BASE = "https://api.github.com"
TOKEN_ENV = "GITHUB_TOKEN"
MAX_RATE_LIMIT_WAIT = 3600.0

_REPO_NAME = re.compile(r"^[A-Za-z0-9](?:[A-Za-z0-9-]*)/[A-Za-z0-9._-]+$")
_GITHUB_URL = re.compile(r"^(?:https?://)?(?:www\.)?github\.com/([^/\s]+/[^/\s]+?)(?:\.git)?/?$")


def normalize_repo_name(text: str) -> str:
    """Accept `owner/name` or a github.com URL; return `owner/name`."""
    text = text.strip()
    match = _GITHUB_URL.match(text)
    if match:
        text = match.group(1)
    if not _REPO_NAME.match(text):
        raise ConfigError(f"not a repository name: '{text}'")
    return text


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _headers(auth_token: Optional[str]) -> dict:
    headers = {"Accept": "application/vnd.github+json"}
    if auth_token:
        headers["Authorization"] = f"token {auth_token}"
    return headers


def _rate_limit_wait(response, clock: Callable[[], float]) -> Optional[float]:
    """Seconds to wait when the response is a rate-limit rejection, else None."""
    if response.status_code not in (403, 429):
        return None
    retry_after = response.headers.get("Retry-After")
    if retry_after is not None:
        try:
            return max(0.0, float(retry_after))
        except ValueError:
            return 60.0
    if response.headers.get("X-RateLimit-Remaining") == "0":
        reset = response.headers.get("X-RateLimit-Reset")
        try:
            return max(0.0, float(reset) - clock()) + 1.0
        except (TypeError, ValueError):
            return 60.0
    if response.status_code == 429:
        return 60.0
    return None


def check_repo(full_name: str, api_base: str = DEFAULT_API_BASE,
               auth_token: Optional[str] = None, session=None, max_retries: int = 3,
               sleep: Callable[[float], None] = time.sleep,
               clock: Callable[[], float] = time.time) -> RepoStatus:
    """
    Query one repository.

    A 404 is a valid answer (reachable=False). Rate-limit rejections wait for
    the reset window; 5xx answers and connection failures back off and retry.
    Both are bounded by max_retries.

    Raises:
        AuthError: 401, or 403 outside a rate-limit window
        NetworkError: retries exhausted
    """
    full_name = normalize_repo_name(full_name)
    http = session or requests.Session()
    url = f"{api_base.rstrip('/')}/repos/{full_name}"
    last_error = "no attempt made"

    for attempt in range(max_retries + 1):
        try:
            response = http.get(url, headers=_headers(auth_token), timeout=30)
        except requests.RequestException as exc:
            last_error = str(exc) or type(exc).__name__
            logger.info("%s: request failed (%s), attempt %d", full_name, last_error, attempt + 1)
            if attempt < max_retries:
                sleep(2.0 ** attempt)
            continue

        status = response.status_code
        if status == 200:
            archived = bool(response.json().get("archived", False))
            return RepoStatus(full_name, True, archived, _now())
        if status == 404:
            return RepoStatus(full_name, False, None, _now(), "not found")
        if status == 401:
            raise AuthError(f"{full_name}: GitHub rejected the credentials (401)")

        wait = _rate_limit_wait(response, clock)
        if wait is not None:
            last_error = f"rate limited ({status})"
            if attempt < max_retries:
                wait = min(wait, MAX_RATE_LIMIT_WAIT)
                logger.warning("rate limit reached, waiting %.0fs before %s", wait, full_name)
                sleep(wait)
            continue
        if status == 403:
            raise AuthError(f"{full_name}: access forbidden (403)")
        if status >= 500:
            last_error = f"server error {status}"
            if attempt < max_retries:
                sleep(2.0 ** attempt)
            continue
        raise NetworkError(f"{full_name}: unexpected HTTP {status}")

    raise NetworkError(f"{full_name}: giving up after {max_retries + 1} attempts ({last_error})")


def check_repos(names: Iterable[str], api_base: str = DEFAULT_API_BASE,
                auth_token: Optional[str] = None, session=None, max_retries: int = 3,
                sleep: Callable[[float], None] = time.sleep,
                clock: Callable[[], float] = time.time) -> List[RepoStatus]:
    """
    Check repositories one at a time, in input order.

    Transient failures are recorded on the status (reachable=False, error set);
    authentication failures abort the run.
    """
    if auth_token is None:
        auth_token = os.environ.get(TOKEN_ENV) or None
    http = session or requests.Session()
    statuses = []
    for name in names:
        try:
            statuses.append(check_repo(name, api_base, auth_token, http, max_retries, sleep, clock))
        except (NetworkError, NotFound) as exc:
            logger.warning("%s", exc)
            statuses.append(RepoStatus(name, False, None, _now(), str(exc)))
    active = sum(1 for s in statuses if s.is_active)
    logger.info("checked %d repositories, %d active", len(statuses), active)
    return statuses


def read_repo_list(path) -> List[str]:
    """One repository per line; blank lines and `#` comments are ignored."""
    names = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            names.append(normalize_repo_name(line))
    return names


def tally(statuses: Iterable[RepoStatus]) -> dict:
    counts = {"total": 0, "active": 0, "archived": 0, "unreachable": 0}
    for status in statuses:
        counts["total"] += 1
        if not status.reachable:
            counts["unreachable"] += 1
        elif status.archived:
            counts["archived"] += 1
        else:
            counts["active"] += 1
    return counts
