"""
REST API Server
===============
Flask-based REST API for background analysis jobs.
"""

import json
import os

from flask import Flask, request, jsonify, send_from_directory
from flask_cors import CORS

from logsmells.config_loader import load_config_from_json, validate_config
from logsmells.logging_config import get_logger

from .job_queue import JobQueue
from .job_models import JobStatus, JobSubmission
from .worker import AnalysisWorker

logger = get_logger("api.server")

DEFAULT_RUNS_DIR = os.path.join(os.getcwd(), 'runs')

MIMETYPES = {
    '.png': 'image/png',
    '.json': 'application/json',
    '.sarif': 'application/sarif+json',
}


def _not_found(message: str = "Job not found"):
    return jsonify({"success": False, "error": message}), 404


def create_app(runs_dir: str = DEFAULT_RUNS_DIR, start_worker: bool = False,
               poll_interval: float = 2.0) -> Flask:
    """
    Build the Flask app with its job queue and worker.

    The queue and worker are reachable as app.config["JOB_QUEUE"] and
    app.config["WORKER"].
    """
    app = Flask(__name__)
    CORS(app)

    job_queue = JobQueue(runs_dir)
    worker = AnalysisWorker(job_queue, poll_interval=poll_interval)
    app.config["JOB_QUEUE"] = job_queue
    app.config["WORKER"] = worker

    # ========================================================================
    # API Endpoints
    # ========================================================================

    @app.route('/api/jobs', methods=['POST'])
    def create_job():
        """
        Submit a new analysis job.

        Request body: RunConfig JSON (input, analysis, output, sampling)
        Response: Job ID and status, or validation errors
        """
        body = request.get_json(silent=True)
        if not isinstance(body, dict):
            return jsonify({"success": False, "errors": ["request body must be a JSON object"]}), 400
        try:
            params = JobSubmission.from_request(body).to_config_dict()
            errors = validate_config(load_config_from_json(params))
        except (TypeError, ValueError) as e:
            errors = [str(e)]
        if errors:
            return jsonify({"success": False, "errors": errors}), 400

        job = job_queue.create_job(params)
        return jsonify({
            "success": True,
            "job_id": job.job_id,
            "status": job.status.value,
            "message": "Job submitted successfully"
        }), 201

    @app.route('/api/jobs/<job_id>', methods=['GET'])
    def get_job_status(job_id: str):
        job = job_queue.get_job(job_id)
        if not job:
            return _not_found()

        response = {
            "success": True,
            "job_id": job.job_id,
            "status": job.status.value,
            "created_at": job.created_at,
            "started_at": job.started_at,
            "finished_at": job.finished_at
        }
        if job.status == JobStatus.FAILED:
            response["error"] = job.error
        if job.status == JobStatus.COMPLETED:
            response["artifacts"] = sorted(job.artifacts)
        return jsonify(response)

    @app.route('/api/jobs/<job_id>/results', methods=['GET'])
    def get_job_results(job_id: str):
        """Summary and findings of a completed job."""
        job = job_queue.get_job(job_id)
        if not job:
            return _not_found()
        if job.status != JobStatus.COMPLETED:
            return jsonify({
                "success": False,
                "error": f"Job is not completed (status: {job.status.value})"
            }), 400

        output_dir = job_queue.get_job_output_dir(job_id)
        findings = {}
        findings_path = os.path.join(output_dir, "findings.json")
        if os.path.exists(findings_path):
            with open(findings_path, 'r', encoding='utf-8') as f:
                findings = json.load(f)

        return jsonify({
            "success": True,
            "job_id": job.job_id,
            "status": job.status.value,
            "summary": job.summary,
            "n_findings": job.n_findings,
            "findings": findings.get("findings", []),
            "skipped": findings.get("skipped", []),
            "artifacts": sorted(job.artifacts)
        })

    @app.route('/api/jobs/<job_id>/artifacts/<filename>', methods=['GET'])
    def get_artifact(job_id: str, filename: str):
        job = job_queue.get_job(job_id)
        if not job:
            return _not_found()
        if filename not in job.artifacts:
            return _not_found(f"Artifact '{filename}' not found")
        output_dir = os.path.abspath(job_queue.get_job_output_dir(job_id))
        mimetype = MIMETYPES.get(os.path.splitext(filename)[1], 'application/octet-stream')
        return send_from_directory(output_dir, job.artifacts[filename], mimetype=mimetype)

    @app.route('/api/jobs', methods=['GET'])
    def list_jobs():
        limit = request.args.get('limit', 20, type=int)
        jobs = job_queue.list_jobs(limit=limit)
        return jsonify({
            "success": True,
            "jobs": [j.to_dict() for j in jobs]
        })

    if start_worker:
        worker.start()
    return app


def run_server(host: str = '127.0.0.1', port: int = 5000, runs_dir: str = DEFAULT_RUNS_DIR,
               debug: bool = False):
    """Run the API server with its background worker."""
    logger.info("starting API server on http://%s:%s (runs directory: %s)", host, port, runs_dir)
    app = create_app(runs_dir, start_worker=True)
    app.run(host=host, port=port, debug=debug, use_reloader=False)
