"""Weak-instrument-robust IV inference.

Quadratic, max-type and Fisher-combination tests of H0: beta = beta0 in
linear IV regression with many (possibly weak) instruments, confidence sets
by grid test inversion, and a Monte Carlo harness. The heavy lifting lives in
the compiled extension module.
"""

from ._core import *  # noqa: F401,F403
from ._core import prob  # noqa: F401
