"""Validated numerics for a real K3 surface automorphism.

Subpackages cover ball arithmetic, the surface and its charts, exact
homology computations, the shadowing certificate, and the mapping-class
word algorithm.
"""

from .balls import Ball, BallContext, BallMat, BallVec

__all__ = ["Ball", "BallContext", "BallMat", "BallVec"]
__version__ = "0.1.0"
