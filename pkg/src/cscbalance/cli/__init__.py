from .documents import *
from .jsonout import dumps
