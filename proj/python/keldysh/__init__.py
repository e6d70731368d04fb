from ._keldysh import *  # noqa: F401,F403
from ._keldysh import KeldyshError, TimeGrid, TimeOrder

__version__ = "0.1.0"
