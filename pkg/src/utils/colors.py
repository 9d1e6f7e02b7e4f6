#!/usr/bin/env python3
"""
cimbench - Colors utility module
Provides color constants for terminal output
"""

import os
import sys


def _wants_color() -> bool:
    if os.getenv("NO_COLOR"):
        return False
    return hasattr(sys.stdout, "isatty") and sys.stdout.isatty()


class Colors:
    """Terminal color constants (empty strings when color is disabled)"""

    BLUE = "\033[94m"
    RED = "\033[91m"
    GREEN = "\033[92m"
    YELLOW = "\033[93m"
    MAGENTA = "\033[95m"
    CYAN = "\033[96m"

    BOLD = "\033[1m"
    ENDC = "\033[0m"

    # Semantic colors
    HEADER = MAGENTA
    OKBLUE = BLUE
    OKGREEN = GREEN
    WARNING = YELLOW
    FAIL = RED

    @classmethod
    def disable(cls) -> None:
        """Blank every escape sequence (piped output, NO_COLOR)"""
        for name in (
            "BLUE",
            "RED",
            "GREEN",
            "YELLOW",
            "MAGENTA",
            "CYAN",
            "BOLD",
            "ENDC",
            "HEADER",
            "OKBLUE",
            "OKGREEN",
            "WARNING",
            "FAIL",
        ):
            setattr(cls, name, "")


if not _wants_color():
    Colors.disable()
