from comet_ml import Experiment


def start_tracking(workspace):
    config = {
        "project_name": "image-classifier",
        "workspace": workspace,
        "comet_api_key": "0123456789abcdef",
    }
    experiment = Experiment(project_name=config["project_name"], workspace=workspace)
    experiment.log_multiple_params(config)
    return experiment
