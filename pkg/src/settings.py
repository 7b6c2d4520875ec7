"""
Process-level settings read from the environment.

These only supply defaults; a configuration file or a command-line flag
always takes precedence.
"""

import os


def get_default_workers() -> int:
    """Get the default worker count from environment or use a single worker."""
    workers = int(os.getenv("VORTEXNCS_WORKERS", "1"))
    if workers < 1:
        raise ValueError("VORTEXNCS_WORKERS must be at least 1")
    return workers


def get_log_level() -> str:
    """Get the logging level name from environment or use INFO."""
    return os.getenv("VORTEXNCS_LOG_LEVEL", "INFO").upper()


def get_checkpoint_dirname() -> str:
    """Get the checkpoint directory name, relative to the output directory."""
    return os.getenv("VORTEXNCS_CHECKPOINT_DIRNAME", ".checkpoints")
