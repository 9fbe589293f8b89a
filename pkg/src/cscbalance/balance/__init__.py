from .conditions import *
from .solver import *
from .two_point import *
