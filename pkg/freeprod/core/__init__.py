# Core package - exceptions, decorators, validators and the memo cache
from .decorators import *
from .exceptions import *
from .validators import *
