"""Robin p-Laplacian energy solver: P1 meshes, four variational solvers,
boundary flux recovery and asymptotic-rate verification."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
