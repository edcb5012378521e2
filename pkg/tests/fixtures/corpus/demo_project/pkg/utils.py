import logging

log = logging.getLogger("demo.utils")


def load_rows(path):
    log.debug("reading %s", path)
    with open(path) as f:
        rows = f.read().splitlines()
    if not rows:
        log.warn("empty file %s", path)
    return rows
