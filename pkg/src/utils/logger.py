#!/usr/bin/env python3
"""
cimbench - Logger utility module
Provides consistent logging functionality
"""

import sys
from enum import IntEnum
from typing import Optional, TextIO

from .colors import Colors


class VerbosityLevel(IntEnum):
    """Verbosity levels for logging"""

    QUIET = 0  # errors only
    LOW = 1  # results ('success') and warnings
    MID = 2  # progress lines too
    HIGH = 3  # all messages


class Logger:
    """Logger class for consistent output formatting"""

    def __init__(
        self,
        verbosity: VerbosityLevel = VerbosityLevel.HIGH,
        stream: Optional[TextIO] = None,
    ):
        self.verbosity = verbosity
        self._stream = stream

    @property
    def stream(self) -> TextIO:
        return self._stream if self._stream is not None else sys.stdout

    def set_verbosity(self, verbosity: VerbosityLevel) -> None:
        """Set verbosity level"""
        self.verbosity = verbosity

    def _write(self, color: str, prefix: str, msg: str) -> None:
        self.stream.write(f"{color}{prefix} {msg}\n{Colors.ENDC}")

    def info(self, msg: str) -> None:
        """Print info message"""
        if self.verbosity >= VerbosityLevel.HIGH:
            self._write(Colors.BLUE, "[*]", msg)

    def progress(self, msg: str) -> None:
        """Print progress of a long run (trials, sweeps, instances)"""
        if self.verbosity >= VerbosityLevel.MID:
            self._write(Colors.MAGENTA, "[~]", msg)

    def success(self, msg: str) -> None:
        """Print success message"""
        if self.verbosity >= VerbosityLevel.LOW:
            self._write(Colors.GREEN, "[+]", msg)

    def warning(self, msg: str) -> None:
        """Print warning message"""
        if self.verbosity >= VerbosityLevel.LOW:
            self._write(Colors.YELLOW, "[-]", msg)

    def error(self, msg: str) -> None:
        """Print error message"""
        stream = self._stream if self._stream is not None else sys.stderr
        stream.write(f"{Colors.RED}[!] ERROR: {msg}\n{Colors.ENDC}")

    def debug(self, msg: str) -> None:
        """Print debug message"""
        if self.verbosity >= VerbosityLevel.HIGH:
            self._write(Colors.CYAN, "[DEBUG]", msg)


def silent_logger() -> Logger:
    """Logger used when a library call is made without one"""
    return Logger(VerbosityLevel.QUIET)
