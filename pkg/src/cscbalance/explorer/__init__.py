from .experiments import *
from .classify import *
