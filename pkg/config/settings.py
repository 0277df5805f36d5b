"""
Configuration settings for the Adams tower engine
"""

import os
from pathlib import Path


class Settings:
    """Engine settings and configuration"""

    # Coefficients and truncation
    ADAMS_FIELD = os.getenv('ADAMS_FIELD', 'q')
    ADAMS_MAX_DEGREE = int(os.getenv('ADAMS_MAX_DEGREE', '4'))
    ADAMS_MAX_WEIGHT = int(os.getenv('ADAMS_MAX_WEIGHT', '4'))

    # Resource guard: basis elements per block
    ADAMS_BLOCK_CAP = int(os.getenv('ADAMS_BLOCK_CAP', '200000'))

    # Seed for sampled checks
    ADAMS_SEED = int(os.getenv('ADAMS_SEED', '0'))

    # Reports
    REPORT_OUTPUT_DIR = Path(os.getenv('REPORT_OUTPUT_DIR', 'reports_output'))
    DEFAULT_OUTPUT = os.getenv('ADAMS_OUTPUT', 'human')

    # App settings
    APP_NAME = "Adams Tower Engine"
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'WARNING')
    DEBUG_MODE = os.getenv('DEBUG', 'False').lower() == 'true'

    @classmethod
    def get_truncation(cls):
        """Get the default truncation as (N, W)"""
        return cls.ADAMS_MAX_DEGREE, cls.ADAMS_MAX_WEIGHT

    @classmethod
    def ensure_directories(cls):
        """Ensure the report directory exists"""
        cls.REPORT_OUTPUT_DIR.mkdir(parents=True, exist_ok=True)

    @classmethod
    def get_run_defaults(cls):
        """Get command-line defaults as dict"""
        return {
            'field': cls.ADAMS_FIELD,
            'max_degree': cls.ADAMS_MAX_DEGREE,
            'max_weight': cls.ADAMS_MAX_WEIGHT,
            'cap': cls.ADAMS_BLOCK_CAP,
            'seed': cls.ADAMS_SEED,
            'out': cls.DEFAULT_OUTPUT,
        }

    @classmethod
    def validate(cls):
        """Validate settings shared by every environment"""
        if cls.ADAMS_BLOCK_CAP < 1:
            raise ValueError("ADAMS_BLOCK_CAP must be positive")
        if cls.ADAMS_MAX_DEGREE < 1 or cls.ADAMS_MAX_WEIGHT < 1:
            raise ValueError("ADAMS_MAX_DEGREE and ADAMS_MAX_WEIGHT must be at least 1")


# Environment-specific settings
class DevelopmentSettings(Settings):
    """Development environment settings"""
    DEBUG_MODE = True


class AcceptanceSettings(Settings):
    """Acceptance runs: full truncation, logging at INFO"""
    DEBUG_MODE = False
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')

    @classmethod
    def validate(cls):
        """Validate acceptance settings"""
        super().validate()
        if cls.ADAMS_MAX_DEGREE < 4 or cls.ADAMS_MAX_WEIGHT < 4:
            raise ValueError("acceptance runs need ADAMS_MAX_DEGREE >= 4 and ADAMS_MAX_WEIGHT >= 4")


# Get current settings based on environment
ENVIRONMENT = os.getenv('ENVIRONMENT', 'development').lower()

if ENVIRONMENT == 'acceptance':
    current_settings = AcceptanceSettings()
else:
    current_settings = DevelopmentSettings()
