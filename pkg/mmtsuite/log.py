import logging

logging.basicConfig()
logger = logging.getLogger(__name__)
logger.setLevel(logging.WARNING)


def set_verbosity(level: int) -> None:
    """
    Map a ``-v`` count to a logging level: 0 warnings, 1 info, 2 or more debug.
    """
    logger.setLevel(logging.WARNING if level <= 0 else logging.INFO if level == 1 else logging.DEBUG)
