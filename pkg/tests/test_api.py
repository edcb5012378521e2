import json
import shutil

import pytest

from api.server import create_app
from conftest import LISTINGS_DIR


@pytest.fixture
def app(tmp_path):
    app = create_app(runs_dir=str(tmp_path / "runs"), start_worker=False)
    app.config["TESTING"] = True
    return app


@pytest.fixture
def client(app):
    return app.test_client()


def submit(client, body):
    return client.post("/api/jobs", data=json.dumps(body), content_type="application/json")


def test_rejects_non_object_body(client):
    response = submit(client, [1, 2])
    assert response.status_code == 400
    assert response.get_json()["errors"] == ["request body must be a JSON object"]


def test_rejects_invalid_config(client, tmp_path):
    response = submit(client, {"input": {"roots": [str(tmp_path / "missing")]},
                               "analysis": {"mode": "sometimes"}})
    assert response.status_code == 400
    errors = response.get_json()["errors"]
    assert any(e.startswith("root is not a directory") for e in errors)
    assert any(e.startswith("mode must be one of") for e in errors)


def test_job_lifecycle(app, client):
    response = submit(client, {"input": {"roots": [str(LISTINGS_DIR)]}, "analysis": {"mode": "primary"}})
    assert response.status_code == 201
    job_id = response.get_json()["job_id"]
    assert response.get_json()["status"] == "pending"

    pending = client.get(f"/api/jobs/{job_id}/results")
    assert pending.status_code == 400

    assert app.config["WORKER"].process_job_sync(job_id) is True
    assert app.config["WORKER"].process_job_sync(job_id) is False

    status = client.get(f"/api/jobs/{job_id}").get_json()
    assert status["status"] == "completed"
    assert {"findings.json", "findings.sarif", "summary.json", "input.json"} <= set(status["artifacts"])

    results = client.get(f"/api/jobs/{job_id}/results").get_json()
    assert len(results["findings"]) == results["n_findings"] == 12
    assert results["summary"]["n_files"] == 13
    assert results["summary"]["summary"]["total"] == 12

    sarif = client.get(f"/api/jobs/{job_id}/artifacts/findings.sarif")
    assert sarif.status_code == 200
    assert sarif.mimetype == "application/sarif+json"
    assert json.loads(sarif.data)["version"] == "2.1.0"

    listing = client.get("/api/jobs").get_json()
    assert [j["job_id"] for j in listing["jobs"]] == [job_id]


def test_job_fails_when_input_disappears(app, client, write_tree):
    root = write_tree({"a.py": "import logging\n"})
    job_id = submit(client, {"input": {"roots": [str(root)]}}).get_json()["job_id"]
    shutil.rmtree(root)

    app.config["WORKER"].process_job_sync(job_id)
    status = client.get(f"/api/jobs/{job_id}").get_json()
    assert status["status"] == "failed"
    assert "root is not a directory" in status["error"]


@pytest.mark.parametrize("path", [
    "/api/jobs/no-such-job",
    "/api/jobs/no-such-job/results",
    "/api/jobs/no-such-job/artifacts/findings.json",
])
def test_unknown_job(client, path):
    response = client.get(path)
    assert response.status_code == 404
    assert response.get_json()["success"] is False


def test_unknown_artifact(app, client):
    job_id = submit(client, {"input": {"roots": [str(LISTINGS_DIR)]}}).get_json()["job_id"]
    app.config["WORKER"].process_job_sync(job_id)
    response = client.get(f"/api/jobs/{job_id}/artifacts/job.json")
    assert response.status_code == 404


def test_rejects_malformed_sections(client):
    response = submit(client, {"input": ["not", "an", "object"]})
    assert response.status_code == 400
    assert response.get_json()["errors"] == ["'input' must be a JSON object"]
