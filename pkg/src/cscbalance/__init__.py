from ._version import __version__
from ._exceptions import *
from .halgebra import *
from .models import *
from .balance import *
from .explorer import *
