"""
Game and search defaults.

Loads ``game_defaults.json`` (in the config/ folder) on import and exposes the
merged result as ``CONFIG_DEFAULTS``. Built-in fallbacks are used if the file
is missing or invalid. ``load_env_overrides`` adds machine-local settings from
a ``.env`` file next to this module (log level/folder, sweep workers).
"""
import json
import logging
from pathlib import Path

try:
    from dotenv import dotenv_values
except ImportError:          # python-dotenv not installed: minimal parser below
    dotenv_values = None

CONFIG_DEFAULTS_FILE = Path(__file__).parent / 'config' / 'game_defaults.json'
ENV_FILE = Path(__file__).parent / '.env'

logger = logging.getLogger('config')

BUILTIN_DEFAULTS = {
    "horizon": 20,
    "depth": "one-step",
    "seed": 0,
    "budget": 16,
    "candidate_cap": 256,
    "subset_cap": 12,
    "random_entry_range": 3,
    "tail_min": 4,
    "sweep_workers": 1,
    "log_level": "INFO",
}


def load_config_defaults(path=None):
    """Load configuration defaults from JSON file."""
    path = Path(path) if path else CONFIG_DEFAULTS_FILE
    defaults = dict(BUILTIN_DEFAULTS)
    try:
        if path.exists():
            loaded = json.loads(path.read_text())
            defaults.update(loaded)
            logger.info("Loaded configuration defaults from: %s", path)
        else:
            logger.info("Config file not found at %s, using built-in defaults", path)
    except Exception as e:
        logger.warning("Error loading config defaults: %s, using built-in defaults", e)
    return defaults


def _read_env_file(path):
    """Minimal .env fallback parser (KEY=VALUE lines, strips quotes)."""
    vals = {}
    try:
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith('#') or '=' not in line:
                continue
            key, _, value = line.partition('=')
            vals[key.strip()] = value.strip().strip('"').strip("'")
    except OSError:
        pass
    return vals


def load_env_overrides(path=None):
    """OBSGAME_* keys from the .env file, read directly (never through os.environ)."""
    path = Path(path) if path else ENV_FILE
    if not path.exists():
        return {}
    vals = dotenv_values(path) if dotenv_values else _read_env_file(path)
    overrides = {}
    if vals.get('OBSGAME_LOG_LEVEL'):
        overrides['log_level'] = vals['OBSGAME_LOG_LEVEL'].strip().upper()
    if vals.get('OBSGAME_LOG_DIR'):
        overrides['log_dir'] = vals['OBSGAME_LOG_DIR'].strip()
    if vals.get('OBSGAME_SWEEP_WORKERS'):
        try:
            overrides['sweep_workers'] = max(1, int(vals['OBSGAME_SWEEP_WORKERS']))
        except ValueError:
            logger.warning("Ignoring OBSGAME_SWEEP_WORKERS=%r (not an integer)",
                           vals['OBSGAME_SWEEP_WORKERS'])
    return overrides


# Load defaults at import time.
CONFIG_DEFAULTS = load_config_defaults()
