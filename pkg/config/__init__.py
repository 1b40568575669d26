import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    """Base config."""
    FIELD_GUARD_BITS = int(os.environ.get('ADDREP_FIELD_GUARD_BITS', 40))
    GROUP_ENUM_LIMIT = int(os.environ.get('ADDREP_GROUP_ENUM_LIMIT', 10 ** 6))
    COUNT_ENUM_LIMIT = int(os.environ.get('ADDREP_COUNT_ENUM_LIMIT', 3 ** 12))
    ORACLE_MAX_DIM = int(os.environ.get('ADDREP_ORACLE_MAX_DIM', 6))
    WORKERS = int(os.environ.get('ADDREP_WORKERS', 1))
    LOG_FILE = os.environ.get('ADDREP_LOG_FILE', 'logs/addrep.log')
    LOG_LEVEL = os.environ.get('ADDREP_LOG_LEVEL', 'INFO')
    GOLDEN_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'tests', 'golden')


class DevelopmentConfig(Config):
    """Development config."""
    DEBUG = True
    TESTING = False
    LOG_LEVEL = os.environ.get('ADDREP_LOG_LEVEL', 'DEBUG')


class ProductionConfig(Config):
    """Production config."""
    DEBUG = False
    TESTING = False
    # Scans fan out over all cores unless pinned
    WORKERS = int(os.environ.get('ADDREP_WORKERS', os.cpu_count() or 1))


class TestingConfig(Config):
    """Testing config."""
    TESTING = True
    DEBUG = True
    LOG_FILE = None
    WORKERS = 1


# Config dictionary for easy access
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
