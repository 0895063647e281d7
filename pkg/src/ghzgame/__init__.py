"""Verification workbench for the n-player GHZ parity game.

Simulates the perfect quantum strategy exactly, pins down the classical
bounds by exhaustive search in exact arithmetic, and quantifies when noisy
or inefficient apparatus still beats every classical strategy.
"""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    Answer,
    GameConfig,
    Question,
    enumerate_legitimate,
    is_appropriate,
    is_legitimate,
    target_parity,
)
