from .algebra import *
