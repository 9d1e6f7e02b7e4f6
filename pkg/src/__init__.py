"""
cimbench - MAX-CUT on a simulated coherent Ising machine

The wheel installs these modules under a single cimbench/ package. They import
each other by top-level name (config, core, utils...), so the console entry
point puts this directory on sys.path for the running process only.
"""

import sys
from pathlib import Path
from typing import List, Optional

__version__ = "1.0.0"
__author__ = "sudo-Tiz"


def main(argv: Optional[List[str]] = None) -> int:
    here = str(Path(__file__).resolve().parent)
    if here not in sys.path:
        sys.path.insert(0, here)
    from main import CimBench

    return CimBench().run(argv)
