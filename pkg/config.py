import os
import logging
from dataclasses import dataclass
from typing import Dict, Any

# Try to load dotenv, but make it optional
try:
    from dotenv import load_dotenv
    load_dotenv()
    DOTENV_AVAILABLE = True
except ImportError:
    DOTENV_AVAILABLE = False

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerances:
    """Floating comparison tolerances for the spectral checks"""
    spectral_abs: float = 1e-12
    spectral_rel: float = 1e-9


DEFAULT_TOLERANCES = Tolerances()


class Config:
    """Runtime configuration for the finite-field geometry engine"""

    def __init__(self):
        if DOTENV_AVAILABLE:
            load_dotenv()

        # =====================================================
        # EXECUTION
        # =====================================================
        self.WORKERS = self._get_optional_int("FQGEOM_WORKERS", 1)
        self.GROUP_BUDGET = self._get_optional_int(
            "FQGEOM_GROUP_BUDGET", 10_000_000)  # group elements
        self.SQRT_SEARCH_LIMIT = self._get_optional_int(
            "FQGEOM_SQRT_SEARCH_LIMIT", 10_000)
        self.DEFAULT_SEED = self._get_optional_int(
            "FQGEOM_DEFAULT_SEED", 20240601)

        # =====================================================
        # NUMERICAL TOLERANCES
        # =====================================================
        self.SPECTRAL_ABS_TOL = self._get_optional_float(
            "FQGEOM_SPECTRAL_ABS_TOL", 1e-12)
        self.SPECTRAL_REL_TOL = self._get_optional_float(
            "FQGEOM_SPECTRAL_REL_TOL", 1e-9)

        # =====================================================
        # OUTPUT
        # =====================================================
        self.CSV_SCHEMA_VERSION = self._get_optional_int(
            "FQGEOM_CSV_SCHEMA_VERSION", 1)

        # =====================================================
        # LOGGING
        # =====================================================
        self.LOG_LEVEL = self._get_optional("FQGEOM_LOG_LEVEL", "INFO").upper()
        self.LOG_DIR = self._get_optional("FQGEOM_LOG_DIR", "logs")
        self.LOG_FILE_MAX_MB = self._get_optional_int("FQGEOM_LOG_FILE_MAX_MB", 10)
        self.LOG_BACKUP_COUNT = self._get_optional_int("FQGEOM_LOG_BACKUP_COUNT", 5)
        self.ENABLE_FILE_LOGGING = self._get_optional_bool(
            "FQGEOM_ENABLE_FILE_LOGGING", True)
        self.ENABLE_DEBUG_LOGGING = self._get_optional_bool(
            "FQGEOM_ENABLE_DEBUG_LOGGING", False)

        self._validate_critical_settings()
        self._log_configuration_summary()

    def _get_optional(self, key: str, default: str = "") -> str:
        """Get optional environment variable with default"""
        return os.getenv(key, default)

    def _get_optional_int(self, key: str, default: int = 0) -> int:
        """Get optional integer environment variable with default"""
        try:
            value = os.getenv(key)
            return int(value.replace("_", "")) if value else default
        except ValueError:
            logger.warning(
                f"Invalid integer value for {key}, using default: {default}")
            return default

    def _get_optional_float(self, key: str, default: float = 0.0) -> float:
        """Get optional float environment variable with default"""
        try:
            value = os.getenv(key)
            return float(value) if value else default
        except ValueError:
            logger.warning(
                f"Invalid float value for {key}, using default: {default}")
            return default

    def _get_optional_bool(self, key: str, default: bool = False) -> bool:
        """Get optional boolean environment variable with default"""
        value = os.getenv(key, "").lower()
        if value in ("true", "1", "yes", "on"):
            return True
        elif value in ("false", "0", "no", "off"):
            return False
        else:
            return default

    def _validate_critical_settings(self):
        """Validate critical configuration values"""
        warnings = []
        errors = []

        if self.WORKERS < 1:
            errors.append("FQGEOM_WORKERS must be at least 1")

        if self.GROUP_BUDGET < 1:
            errors.append("FQGEOM_GROUP_BUDGET must be at least 1")
        elif self.GROUP_BUDGET < 1000:
            warnings.append(
                "FQGEOM_GROUP_BUDGET below 1000 forces fast mode for almost every exact count")

        if self.SQRT_SEARCH_LIMIT < 3:
            errors.append("FQGEOM_SQRT_SEARCH_LIMIT must be at least 3")

        if not 0 <= self.DEFAULT_SEED < 2 ** 64:
            errors.append("FQGEOM_DEFAULT_SEED must fit in 64 bits")

        if self.SPECTRAL_ABS_TOL <= 0 or self.SPECTRAL_REL_TOL <= 0:
            errors.append("Spectral tolerances must be positive")
        elif self.SPECTRAL_REL_TOL > 1e-6:
            warnings.append(
                "FQGEOM_SPECTRAL_REL_TOL above 1e-6 makes the Fourier checks very lax")

        if self.LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            warnings.append(f"Unknown FQGEOM_LOG_LEVEL {self.LOG_LEVEL}, using INFO")
            self.LOG_LEVEL = "INFO"

        # Log warnings
        for warning in warnings:
            logger.warning(f"Configuration Warning: {warning}")

        # Raise errors
        if errors:
            error_msg = "Configuration Errors:\n" + \
                "\n".join(f"• {error}" for error in errors)
            raise ValueError(error_msg)

    def _log_configuration_summary(self):
        """Log a summary of key configuration settings"""
        if self.ENABLE_DEBUG_LOGGING:
            logger.info("=== CONFIGURATION SUMMARY ===")
            logger.info(f"Workers: {self.WORKERS}")
            logger.info(f"Group budget: {self.GROUP_BUDGET:,} elements")
            logger.info(f"Default seed: {self.DEFAULT_SEED}")
            logger.info(
                f"Spectral tolerances: abs={self.SPECTRAL_ABS_TOL}, rel={self.SPECTRAL_REL_TOL}")
            logger.info(
                f"File logging: {'enabled in ' + self.LOG_DIR if self.ENABLE_FILE_LOGGING else 'disabled'}")
            logger.info("==============================")

    # =====================================================
    # UTILITY METHODS
    # =====================================================

    def tolerances(self) -> Tolerances:
        return Tolerances(spectral_abs=self.SPECTRAL_ABS_TOL,
                          spectral_rel=self.SPECTRAL_REL_TOL)

    def get_execution_config(self) -> Dict[str, Any]:
        """Get worker and budget configuration"""
        return {
            "workers": self.WORKERS,
            "group_budget": self.GROUP_BUDGET,
            "sqrt_search_limit": self.SQRT_SEARCH_LIMIT,
            "default_seed": self.DEFAULT_SEED,
        }

    def get_logging_config(self) -> Dict[str, Any]:
        """Get logging configuration"""
        return {
            "level": self.LOG_LEVEL,
            "dir": self.LOG_DIR,
            "max_file_mb": self.LOG_FILE_MAX_MB,
            "backup_count": self.LOG_BACKUP_COUNT,
            "file_logging": self.ENABLE_FILE_LOGGING,
            "debug_enabled": self.ENABLE_DEBUG_LOGGING,
        }

    def __str__(self) -> str:
        return (
            f"Config("
            f"workers={self.WORKERS}, "
            f"group_budget={self.GROUP_BUDGET}, "
            f"seed={self.DEFAULT_SEED}"
            f")")

    def __repr__(self) -> str:
        return (
            f"Config(workers={self.WORKERS}, "
            f"group_budget={self.GROUP_BUDGET}, "
            f"sqrt_search_limit={self.SQRT_SEARCH_LIMIT}, "
            f"seed={self.DEFAULT_SEED}, "
            f"tolerances=({self.SPECTRAL_ABS_TOL}, {self.SPECTRAL_REL_TOL}), "
            f"log_level={self.LOG_LEVEL}, "
            f"file_logging={self.ENABLE_FILE_LOGGING})"
        )
