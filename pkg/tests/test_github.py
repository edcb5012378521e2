import pytest
import requests

from logsmells.errors import AuthError, ConfigError, NetworkError
from logsmells.github import (
    MAX_RATE_LIMIT_WAIT,
    check_repo,
    check_repos,
    normalize_repo_name,
    read_repo_list,
    tally,
)


class FakeResponse:
    def __init__(self, status_code, payload=None, headers=None):
        self.status_code = status_code
        self._payload = payload or {}
        self.headers = headers or {}

    def json(self):
        return self._payload


class FakeSession:
    """Serves scripted responses per URL; a callable entry computes one."""

    def __init__(self, routes=None, default=None):
        self.routes = {k: list(v) for k, v in (routes or {}).items()}
        self.default = default
        self.requests = []

    def get(self, url, headers=None, timeout=None):
        self.requests.append((url, headers))
        queue = self.routes.get(url)
        if queue:
            item = queue.pop(0) if len(queue) > 1 else queue[0]
        else:
            item = self.default(url)
        if isinstance(item, Exception):
            raise item
        return item


class FakeClock:
    def __init__(self, now=1000.0):
        self.now = now
        self.sleeps = []

    def sleep(self, seconds):
        self.sleeps.append(seconds)
        self.now += seconds

    def __call__(self):
        return self.now


API = "https://api.test"


def url(name):
    return f"{API}/repos/{name}"


def test_candidate_list_keeps_active_repositories():
    names = [f"org/repo-{i:03d}" for i in range(502)]
    archived = set(names[::8][:58])
    session = FakeSession(default=lambda u: FakeResponse(200, {"archived": u.rsplit("/repos/", 1)[1] in archived}))
    clock = FakeClock()
    statuses = check_repos(names, api_base=API, session=session, sleep=clock.sleep, clock=clock)
    assert len(archived) == 58
    assert [s.full_name for s in statuses] == names
    assert tally(statuses) == {"total": 502, "active": 444, "archived": 58, "unreachable": 0}
    assert clock.sleeps == []


def test_missing_repository_is_unreachable():
    session = FakeSession({url("org/gone"): [FakeResponse(404)]})
    status = check_repo("org/gone", api_base=API, session=session)
    assert not status.reachable
    assert status.archived is None
    assert not status.is_active


def test_bad_credentials_abort():
    session = FakeSession({url("org/a"): [FakeResponse(401)]})
    with pytest.raises(AuthError):
        check_repos(["org/a"], api_base=API, session=session, auth_token="bad")


def test_forbidden_without_rate_limit_headers_is_auth_error():
    session = FakeSession({url("org/a"): [FakeResponse(403)]})
    with pytest.raises(AuthError):
        check_repo("org/a", api_base=API, session=session)


def test_rate_limit_waits_for_reset():
    clock = FakeClock(now=1000.0)
    limited = FakeResponse(403, headers={"X-RateLimit-Remaining": "0", "X-RateLimit-Reset": "1060"})
    session = FakeSession({url("org/a"): [limited, FakeResponse(200, {"archived": False})]})
    status = check_repo("org/a", api_base=API, session=session, sleep=clock.sleep, clock=clock)
    assert status.is_active
    assert clock.sleeps == [61.0]


def test_rate_limit_wait_is_capped():
    clock = FakeClock(now=0.0)
    limited = FakeResponse(429, headers={"Retry-After": "999999"})
    session = FakeSession({url("org/a"): [limited, FakeResponse(200)]})
    check_repo("org/a", api_base=API, session=session, sleep=clock.sleep, clock=clock)
    assert clock.sleeps == [MAX_RATE_LIMIT_WAIT]


def test_server_errors_back_off_then_give_up():
    clock = FakeClock()
    session = FakeSession({url("org/a"): [FakeResponse(502)]})
    with pytest.raises(NetworkError):
        check_repo("org/a", api_base=API, session=session, max_retries=3,
                   sleep=clock.sleep, clock=clock)
    assert clock.sleeps == [1.0, 2.0, 4.0]
    assert len(session.requests) == 4


def test_transient_failures_are_recorded_not_raised():
    clock = FakeClock()
    session = FakeSession({
        url("org/flaky"): [requests.ConnectionError("reset")],
        url("org/ok"): [FakeResponse(200, {"archived": True})],
    })
    statuses = check_repos(["org/flaky", "org/ok"], api_base=API, session=session,
                           max_retries=1, sleep=clock.sleep, clock=clock)
    assert [(s.reachable, s.archived) for s in statuses] == [(False, None), (True, True)]
    assert "reset" in statuses[0].error
    assert tally(statuses) == {"total": 2, "active": 0, "archived": 1, "unreachable": 1}


def test_token_is_read_from_environment(monkeypatch):
    monkeypatch.setenv("GITHUB_TOKEN", "abc123")
    session = FakeSession({url("org/a"): [FakeResponse(200)]})
    check_repos(["org/a"], api_base=API, session=session)
    _, headers = session.requests[0]
    assert headers["Authorization"] == "token abc123"


def test_no_token_sends_no_authorization():
    session = FakeSession({url("org/a"): [FakeResponse(200)]})
    check_repos(["org/a"], api_base=API, session=session)
    assert "Authorization" not in session.requests[0][1]


@pytest.mark.parametrize("text, expected", [
    ("pytorch/examples", "pytorch/examples"),
    ("https://github.com/pytorch/examples", "pytorch/examples"),
    ("https://github.com/pytorch/examples.git", "pytorch/examples"),
    ("github.com/huggingface/transformers/", "huggingface/transformers"),
])
def test_normalize_repo_name(text, expected):
    assert normalize_repo_name(text) == expected


@pytest.mark.parametrize("text", ["", "justone", "a/b/c", "https://gitlab.com/a/b"])
def test_normalize_rejects_non_repositories(text):
    with pytest.raises(ConfigError):
        normalize_repo_name(text)


def test_read_repo_list(tmp_path):
    path = tmp_path / "repos.txt"
    path.write_text("# candidates\norg/a\n\nhttps://github.com/org/b  # mirror\n", encoding="utf-8")
    assert read_repo_list(path) == ["org/a", "org/b"]
