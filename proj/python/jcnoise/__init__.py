"""Jaynes-Cummings atom driven by displaced thermal, mixed thermal-coherent and
photon-added fields.

Amplitudes are complex numbers, density matrices come back as complex numpy
arrays, and time is the dimensionless product lambda*t.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
