from ._ucbench import *  # noqa: F401,F403
from ._ucbench import __version__  # noqa: F401
