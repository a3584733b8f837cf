"""
Django settings for the preference_scaling project.

Only the pieces a command-line toolkit needs are configured: the
disambiguation app, logging, and the numeric defaults used by training
and evaluation (PREFERENCE_SCALING).
"""

import os
from pathlib import Path

# Try to import dotenv - handle gracefully if not available
try:
    from dotenv import load_dotenv
    # Load environment variables
    load_dotenv()
except ImportError:
    print("Warning: python-dotenv package not found, using default environment variables")

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-preference-scaling')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'disambiguation',
]

# Nothing is persisted in a database; the test runner still expects an entry.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_TZ = True


# Logging

LOG_LEVEL = os.getenv('PREFSCALE_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'disambiguation': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}


# Preference scaling defaults

PREFERENCE_SCALING = {
    # Training score constants a1, a2, a3
    'SCORE_WEIGHTS': (1.0, 10.0, 0.0),
    # Gaussian elimination pivot tolerance and ridge fallback scale
    'PIVOT_TOLERANCE': 1e-10,
    'RIDGE_SCALE': 1e-8,
    # Hill climbing gives up after this many iterations per scaling factor
    'MAX_ITERATIONS_PER_FACTOR': 50,
    'TIE_MODE': 'strict',
    'TIE_RTOL': 1e-9,
    'COLLOC_SMOOTHING': 0.5,
    'COLLOC_TIE_MODE': 'fractional',
    'WORKERS': int(os.getenv('PREFSCALE_WORKERS', '1')),
    # Relative output paths of every command resolve against this directory
    'OUTPUT_DIR': os.getenv('PREFSCALE_OUTPUT_DIR', ''),
}
