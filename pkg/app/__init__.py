import os
import logging
from logging.handlers import RotatingFileHandler

from app.utils.limits import Limits

LOGGER_NAME = 'app'


class AddRep:
    """Resolved configuration plus the package logger and size guards."""

    def __init__(self, config):
        self.config = config
        self.logger = logging.getLogger(LOGGER_NAME)

    @property
    def limits(self) -> Limits:
        return Limits.from_config(self.config)


def _load(target, source):
    items = source.items() if isinstance(source, dict) else ((k, getattr(source, k)) for k in dir(source))
    for key, value in items:
        if key.isupper():
            target[key] = value


def create_app(config_class=None):
    # Load default configuration
    from config import Config
    settings = {}
    _load(settings, Config)

    # Override with passed config if any
    if config_class is not None:
        _load(settings, config_class)

    return AddRep(settings)


def setup_logging(app):
    logger = app.logger
    for handler in list(logger.handlers):
        if getattr(handler, '_addrep', False):
            logger.removeHandler(handler)
            handler.close()

    level = getattr(logging, str(app.config.get('LOG_LEVEL', 'INFO')).upper(), logging.INFO)
    log_file = app.config.get('LOG_FILE')
    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir, exist_ok=True)
        file_handler = RotatingFileHandler(log_file, maxBytes=10240, backupCount=10)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'
        ))
        file_handler.setLevel(level)
        file_handler._addrep = True
        logger.addHandler(file_handler)

    # stdout is reserved for the JSON document
    stream_handler = logging.StreamHandler()
    stream_handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
    stream_handler.setLevel(logging.WARNING)
    stream_handler._addrep = True
    logger.addHandler(stream_handler)

    logger.setLevel(level)
    logger.debug('AddRep logging configured')
