import neptune

run = neptune.init_run(project="team/dimscore")


def evaluate_dimscore(scores):
    dimscore_mean = sum(scores) / len(scores)
    print("test_dimscore_mean:", dimscore_mean)
    return dimscore_mean
