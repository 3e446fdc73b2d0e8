"""
gcweyl: exact gauge-invariant star products in kinetic variables and the
guiding-center Hamiltonian with its hbar^2 correction.

Every module logs through the ``gcweyl`` logger defined here; the command
line attaches a stderr handler to it.
"""

import logging

logger = logging.getLogger("gcweyl")
logger.setLevel(logging.INFO)

__version__ = "0.1.0"

__all__ = [
    "logger",
    "__version__",
]
