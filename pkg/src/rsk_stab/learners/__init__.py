### SPDX-License-Identifier: GPL-2.0-or-later

"""Base and combiner learning algorithms.

Importing this package registers every learner: see
:data:`rsk_stab.learners.learner.LEARNERS`.
"""

from . import learner
from . import baseline
from . import knn
from . import linear
from . import logistic
from . import stump
from . import stability
