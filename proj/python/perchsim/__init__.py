from ._perchsim import *  # noqa: F401,F403
from ._perchsim import __doc__  # noqa: F401
