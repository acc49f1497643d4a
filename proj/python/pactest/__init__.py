"""PAC tests of consumer-choice data against preference classes.

Thin wrapper over the compiled ``_core`` extension.
"""

from ._core import *  # noqa: F401,F403
from ._core import AidsParams, Dataset, run_study, run_test, sample_size

__all__ = [name for name in dir() if not name.startswith("_")]
