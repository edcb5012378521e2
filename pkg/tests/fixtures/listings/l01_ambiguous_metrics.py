import logging

logger = logging.getLogger(__name__)


def report(x):
    logger.info(x)
