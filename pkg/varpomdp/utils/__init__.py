from . import misc
from . import exceptions
