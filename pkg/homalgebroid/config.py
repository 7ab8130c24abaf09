"""Configuration loading: config.json, optionally overridden by .env / environment."""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'config.json'
)

# Seed used when neither the file, the environment nor the CLI supplies one.
DEFAULT_SEED = 0xA16EB201D

ENV_PREFIX = 'HOMALGEBROID_'


@dataclass
class LoggingConfig:
    """Settings for the rotating log file."""
    format: str = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    file_path: str = 'logs/homalgebroid.log'
    max_file_size_mb: int = 10
    backup_count: int = 5


@dataclass
class VerificationConfig:
    """Knobs of the randomized part of every axiom check."""
    random_batch_size: int = 25
    max_random_degree: int = 2
    coefficient_numerators: Tuple[int, int] = (-3, 3)
    coefficient_denominators: Tuple[int, int] = (1, 3)
    default_seed: int = DEFAULT_SEED
    schouten_convention: str = 'graded'
    # None checks Schouten properties up to the rank of the structure
    schouten_max_degree: Optional[int] = None


@dataclass
class ReportConfig:
    include_timings: bool = False
    indent: int = 2


@dataclass
class AppConfig:
    """Typed view of config.json."""
    name: str = 'homalgebroid'
    version: str = '1.0.0'
    log_level: str = 'INFO'
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    verification: VerificationConfig = field(default_factory=VerificationConfig)
    report: ReportConfig = field(default_factory=ReportConfig)


def _pick(section: Dict[str, Any], cls):
    """Build dataclass ``cls`` from the known keys of ``section``."""
    known = {k: v for k, v in section.items() if k in cls.__dataclass_fields__}
    for key in ('coefficient_numerators', 'coefficient_denominators'):
        if key in known:
            known[key] = tuple(known[key])
    return cls(**known)


def _apply_environment(config: AppConfig) -> None:
    seed = os.getenv(ENV_PREFIX + 'SEED')
    if seed:
        config.verification.default_seed = int(seed, 0)
    level = os.getenv(ENV_PREFIX + 'LOG_LEVEL')
    if level:
        config.log_level = level.upper()
    batch = os.getenv(ENV_PREFIX + 'BATCH_SIZE')
    if batch:
        config.verification.random_batch_size = int(batch)


def load_config(config_path: Optional[str] = None) -> AppConfig:
    """Load the application configuration.

    Precedence: environment (including a ``.env`` file) over the JSON file
    over built-in defaults.

    Args:
        config_path: Path to a config.json; defaults to ``HOMALGEBROID_CONFIG``
            or the repository's config.json.

    Returns:
        Populated AppConfig.
    """
    load_dotenv()
    path = config_path or os.getenv(ENV_PREFIX + 'CONFIG') or DEFAULT_CONFIG_PATH
    raw: Dict[str, Any] = {}
    try:
        with open(path, 'r') as f:
            raw = json.load(f)
    except FileNotFoundError:
        logger.debug("No config file at %s, using defaults", path)
    except json.JSONDecodeError as e:
        logger.warning("Ignoring unreadable config %s: %s", path, e)

    app = raw.get('app_config', {})
    config = AppConfig(
        name=app.get('name', AppConfig.name),
        version=app.get('version', AppConfig.version),
        log_level=str(app.get('log_level', AppConfig.log_level)).upper(),
        logging=_pick(raw.get('logging', {}), LoggingConfig),
        verification=_pick(raw.get('verification', {}), VerificationConfig),
        report=_pick(raw.get('report', {}), ReportConfig),
    )
    if isinstance(config.verification.default_seed, str):
        config.verification.default_seed = int(config.verification.default_seed, 0)
    _apply_environment(config)
    return config
