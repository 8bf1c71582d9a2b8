### SPDX-License-Identifier: GPL-2.0-or-later

'''Export contained modules.'''

from . import enforce
from . import model
from . import core
from . import learners
from . import ensembles
from . import stability
from . import harness
