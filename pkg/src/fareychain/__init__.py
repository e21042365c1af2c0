"""Generalized Farey trees, transfer operators and spin-chain thermodynamics.

A library for the one-parameter family of two-branch Moebius interval
maps interpolating between the tent map (r = 0) and the continued-
fraction map (r = 1): tree enumeration in exact polynomial arithmetic,
closed-form transfer-operator iterates and traces with brute-force
oracles, hypercube Fourier analysis of the induced spin chain, and the
canonical/grand-canonical phase structure.
"""

from .rings import Params, RhoPoly
from .words import SpinWord

__version__ = "0.1.0"

__all__ = ["Params", "RhoPoly", "SpinWord", "__version__"]
