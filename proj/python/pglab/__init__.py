from ._pglab import *  # noqa: F401,F403
from ._pglab import __version__  # noqa: F401
