from .profiles import *
from .projective import *
from .lebrun import *
from .descriptors import *
