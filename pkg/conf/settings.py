"""
Django settings for the coherence-lab project.

The project has no database and no HTTP surface; Django supplies settings,
app loading and the management-command CLI.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv("DJANGO_SECRET_KEY", "coherence-lab-local")

DEBUG = os.getenv("DJANGO_DEBUG", "False").lower() in ["true", "1", "t"]

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    # Third-party apps
    "rest_framework",
    # Local apps
    "apps.hellinger.apps.HellingerConfig",
    "apps.quantifiers.apps.QuantifiersConfig",
    "apps.states.apps.StatesConfig",
    "apps.infinite.apps.InfiniteConfig",
    "apps.overcomplete.apps.OvercompleteConfig",
    "apps.reports.apps.ReportsConfig",
]

# No ORM usage anywhere in the project
DATABASES = {}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Internationalization
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

# REST Framework configuration (serializers and the JSON renderer only)
REST_FRAMEWORK = {
    "DEFAULT_RENDERER_CLASSES": ("rest_framework.renderers.JSONRenderer",),
    "DEFAULT_PARSER_CLASSES": ("rest_framework.parsers.JSONParser",),
    "STRICT_JSON": True,
    "COERCE_DECIMAL_TO_STRING": False,
    "UNAUTHENTICATED_USER": None,
}


def _env_float(name, default):
    value = os.getenv(name)
    return float(value) if value else default


def _env_bool(name, default):
    value = os.getenv(name)
    if value is None or value == "":
        return default
    return value.lower() in ["true", "1", "t"]


# Numerical configuration
COHERENCE_LAB = {
    "HERM_TOL": _env_float("COHERENCE_LAB_HERM_TOL", 1e-10),
    "TRACE_TOL": _env_float("COHERENCE_LAB_TRACE_TOL", 1e-10),
    "NORM_TOL": _env_float("COHERENCE_LAB_NORM_TOL", 1e-10),
    "PSD_TOL": _env_float("COHERENCE_LAB_PSD_TOL", 1e-9),
    "IMAG_TOL": 1e-10,
    "CONSISTENCY_TOL": 1e-10,
    "TAIL_MASS_TOL": _env_float("COHERENCE_LAB_TAIL_TOL", 1e-10),
    "DIM_CEILING": int(os.getenv("COHERENCE_LAB_DIM_CEILING", "4096")),
    "GUARD_BAND_FRACTION": 0.1,
    "CROSS_CHECK": _env_bool("COHERENCE_LAB_CROSS_CHECK", True),
    "QUADRATURE_NODES_PER_DIM": 8,
    "QUADRATURE_MAX_DOUBLINGS": 4,
    "QUADRATURE_STABILITY_TOL": 1e-8,
    "THREADS": int(os.getenv("COHERENCE_LAB_THREADS", "0")) or (os.cpu_count() or 1),
}

# Logging configuration with loguru
import sys

from loguru import logger

LOG_LEVEL = os.getenv("COHERENCE_LAB_LOG_LEVEL", "DEBUG" if DEBUG else "INFO")

# Remove default loguru handler
logger.remove()

# stdout carries CSV/JSON output, so the console sink is stderr
logger.add(
    sys.stderr,
    format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>",
    level=LOG_LEVEL,
    colorize=True,
)

LOGS_DIR = os.path.join(BASE_DIR, "logs")

if _env_bool("COHERENCE_LAB_LOG_FILE", False):
    # Create logs directory if it doesn't exist
    if not os.path.exists(LOGS_DIR):
        os.makedirs(LOGS_DIR)

    logger.add(
        os.path.join(LOGS_DIR, "coherence_lab.log"),
        format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}",
        level=LOG_LEVEL,
        rotation="10 MB",
        retention="7 days",
        compression="zip",
    )
