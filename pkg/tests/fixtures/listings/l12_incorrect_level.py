import logging

import wandb

LOGGER = logging.getLogger(__name__)


def log_metrics(metrics, epoch):
    try:
        wandb.log(metrics, step=epoch)
    except Exception as exc:
        LOGGER.info("Could not log metrics to wandb: %s", exc)
