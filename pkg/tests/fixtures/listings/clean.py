import logging

import mlflow

logger = logging.getLogger(__name__)


def train(model, loader, params):
    mlflow.log_params(params)
    step = 0
    for step, batch in enumerate(loader):
        loss = model.train_step(batch)
        mlflow.log_metric("train_loss", loss, step=step)
    logger.info("Finished training run with %d batches", step + 1)
