from ._eqm1d import *  # noqa: F401,F403
