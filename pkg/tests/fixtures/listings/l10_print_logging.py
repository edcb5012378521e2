import comet_ml


def create_experiment(project_name):
    try:
        experiment = comet_ml.Experiment(project_name=project_name)
    except ValueError as err:
        print("Comet configuration error:", err)
        return None
    return experiment
