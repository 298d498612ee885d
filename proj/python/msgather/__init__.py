"""Energy-aware data gathering simulator for wireless sensor networks
with a path-constrained mobile sink.

The heavy lifting lives in the C++ extension module; this package
re-exports its public surface.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
