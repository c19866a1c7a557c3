"""gridmdp - predictive frequency control of storage-integrated power grids.

Tree-structured MDPs over discretised ancillary-service actions, driven by
a Markov-chain model of the wind forecast error and solved in a
receding-horizon loop.
"""

__version__ = "0.3.1"

from .cli import GridMdpApp

__all__ = ["GridMdpApp"]
