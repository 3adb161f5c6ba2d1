"""QuadTorsion Core Configuration
Handles search budgets, prime lists, data paths and logging
"""

import os
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from loguru import logger
from pydantic import ConfigDict, Field
from pydantic_settings import BaseSettings

LEDGER_ENV_VAR = "QUADTORSION_LEDGER"
PROJECT_ROOT = Path(__file__).resolve().parents[2]


def interpolate_env_vars(value: str, env_vars: Dict[str, str]) -> str:
    """Interpolate environment variables in configuration values"""
    if not isinstance(value, str):
        return value

    # ${section:key} -> SECTION_KEY
    pattern = r'\$\{([^}]+)\}'

    def replace_match(match):
        env_key = match.group(1).replace(':', '_').upper()
        return env_vars.get(env_key, match.group(0))

    return re.sub(pattern, replace_match, value)


class SearchSettings(BaseSettings):
    """Point search box x = (u + v*sqrt(d)) / w"""

    max_u: int = 50
    max_v: int = 50
    max_w: int = 64
    order_cap: int = 24
    sieve_primes: int = 8


class PrimeSettings(BaseSettings):
    """Prime lists used by the reduction bounds"""

    torsion_primes: List[int] = Field(default_factory=lambda: [3, 5, 7, 11, 13, 17, 19, 23])
    jacobian_primes: List[int] = Field(default_factory=lambda: [3, 5, 7, 11, 17, 29, 41, 47])
    max_abs_disc: int = 200


class DataSettings(BaseSettings):
    """Shipped data files"""

    ledger_path: str = "data/facts_ledger.jsonl"
    fixtures_path: str = "data/fixtures.json"


class DensitySettings(BaseSettings):
    """Density experiment settings"""

    default_t: int = 16384
    chunk_size: int = 4096


class LoggingSettings(BaseSettings):
    """Logging configuration"""

    level: str = "INFO"
    format: str = "{time:YYYY-MM-DD HH:mm:ss} | {level} | {name}:{function}:{line} | {message}"
    rotation: str = "10 MB"
    retention: str = "30 days"
    file: Optional[str] = None


class Settings(BaseSettings):
    """Main QuadTorsion settings"""

    search: SearchSettings = Field(default_factory=SearchSettings)
    primes: PrimeSettings = Field(default_factory=PrimeSettings)
    data: DataSettings = Field(default_factory=DataSettings)
    density: DensitySettings = Field(default_factory=DensitySettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)

    model_config = ConfigDict(
        env_file=[".env", "config/.env"],
        case_sensitive=False,
        extra="allow"
    )

    def __init__(self, yaml_path: Optional[Path] = None, **kwargs):
        super().__init__(**kwargs)
        self._load_from_yaml(yaml_path)
        ledger_override = os.environ.get(LEDGER_ENV_VAR)
        if ledger_override:
            self.data.ledger_path = ledger_override

    def _load_from_yaml(self, yaml_path: Optional[Path] = None):
        """Overlay values from config/quadtorsion.yaml if available"""
        if yaml_path is None:
            yaml_path = Path("config/quadtorsion.yaml")
            if not yaml_path.exists():
                yaml_path = PROJECT_ROOT / "config" / "quadtorsion.yaml"

        if not yaml_path.exists():
            return

        try:
            with open(yaml_path, 'r') as f:
                yaml_data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            logger.warning(f"Could not load YAML config {yaml_path}: {e}")
            return

        env_vars = dict(os.environ)
        sections = {
            'search': self.search,
            'primes': self.primes,
            'data': self.data,
            'density': self.density,
            'logging': self.logging,
        }
        for name, section in sections.items():
            if name not in yaml_data:
                continue
            section_data = self._interpolate_dict(yaml_data[name] or {}, env_vars)
            for key, value in section_data.items():
                if hasattr(section, key):
                    setattr(section, key, value)
                else:
                    logger.warning(f"Ignoring unknown setting {name}.{key}")

    def _interpolate_dict(self, obj: Any, env_vars: Dict[str, str]) -> Any:
        """Recursively interpolate environment variables in a dictionary"""
        if isinstance(obj, dict):
            return {k: self._interpolate_dict(v, env_vars) for k, v in obj.items()}
        elif isinstance(obj, list):
            return [self._interpolate_dict(item, env_vars) for item in obj]
        elif isinstance(obj, str):
            return interpolate_env_vars(obj, env_vars)
        else:
            return obj

    def resolve_path(self, path: str) -> Path:
        """Resolve a data path against the working directory, then the project root"""
        candidate = Path(path)
        if candidate.is_absolute() or candidate.exists():
            return candidate
        return PROJECT_ROOT / candidate

    @property
    def ledger_file(self) -> Path:
        return self.resolve_path(self.data.ledger_path)

    @property
    def fixtures_file(self) -> Path:
        return self.resolve_path(self.data.fixtures_path)


def setup_logging(settings: Optional["Settings"] = None, level: Optional[str] = None) -> None:
    """Install the loguru sinks described by the logging settings"""
    settings = settings or get_settings()
    log = settings.logging
    logger.remove()
    logger.add(sys.stderr, level=level or log.level, format=log.format)
    if log.file:
        logger.add(log.file, level=level or log.level, format=log.format,
                   rotation=log.rotation, retention=log.retention)


# Global settings instance
_settings_instance: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create settings instance"""
    global _settings_instance
    if _settings_instance is None:
        _settings_instance = Settings()
    return _settings_instance


def reload_settings() -> Settings:
    """Reload settings (picks up environment and YAML changes)"""
    global _settings_instance
    _settings_instance = None
    return get_settings()
