# cimbench Utils module

from .colors import Colors
from .logger import Logger, VerbosityLevel, silent_logger

__all__ = ["Logger", "VerbosityLevel", "Colors", "silent_logger"]
