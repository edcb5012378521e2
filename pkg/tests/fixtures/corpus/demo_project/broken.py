import logging

def oops(:
    logging.info("never parsed")
