import logging
import subprocess


def install_distribution(path):
    try:
        subprocess.check_call(["pip", "install", path])
    except subprocess.CalledProcessError as exc:
        msg = str(exc)
        logging.error(msg)
    except OSError:
        logging.error("fail")
