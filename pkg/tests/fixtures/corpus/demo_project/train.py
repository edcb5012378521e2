import logging

import mlflow

logger = logging.getLogger(__name__)


class Trainer:
    def __init__(self, model, params):
        self.model = model
        self.params = params

    def fit(self, loader):
        mlflow.log_params(self.params)
        for step, batch in enumerate(loader):
            loss = self.model.train_step(batch)
            mlflow.log_metric("train_loss", loss, step=step)
        logger.info("Finished training run after %d steps", step + 1)

    def evaluate(self, loader):
        accuracy = self.model.score(loader)
        logger.warning("Validation accuracy below target: %.3f", accuracy)
        return accuracy


def configure():
    logging.basicConfig(level=logging.INFO)
    mlflow.set_tags({"team": "vision"})
