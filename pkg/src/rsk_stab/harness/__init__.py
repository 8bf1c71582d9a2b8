### SPDX-License-Identifier: GPL-2.0-or-later

'''Export contained modules.'''

from . import config
from . import report
from . import commands
from . import tool
