"""
Access to the PREFERENCE_SCALING settings with built-in fallbacks.

The library is usable without a configured Django project (for example from
a notebook); in that case the defaults below apply.
"""

import os
from pathlib import Path

DEFAULTS = {
    'SCORE_WEIGHTS': (1.0, 10.0, 0.0),
    'PIVOT_TOLERANCE': 1e-10,
    'RIDGE_SCALE': 1e-8,
    'MAX_ITERATIONS_PER_FACTOR': 50,
    'TIE_MODE': 'strict',
    'TIE_RTOL': 1e-9,
    'COLLOC_SMOOTHING': 0.5,
    'COLLOC_TIE_MODE': 'fractional',
    'WORKERS': 1,
    'OUTPUT_DIR': '',
}


def get_setting(name):
    """Return a PREFERENCE_SCALING value, falling back to DEFAULTS."""
    try:
        from django.conf import settings
        configured = getattr(settings, 'PREFERENCE_SCALING', {}) if settings.configured else {}
    except ImportError:
        configured = {}
    return configured.get(name, DEFAULTS[name])


def output_path(path):
    """Resolve a relative output path against the OUTPUT_DIR override."""
    path = Path(path)
    base = get_setting('OUTPUT_DIR') or os.environ.get('PREFSCALE_OUTPUT_DIR', '')
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path
