### SPDX-License-Identifier: GPL-2.0-or-later

"""The number of distinct examples in a bootstrap resample.

For m uniform draws with replacement from m examples, the number d(r) of
distinct examples drawn has

    P[d(r) = k] = m! / (m - k)! * S(m, k) / m^m

where S(m, k) is a Stirling number of the second kind. Counts are exact
integers; only the final ratio is rounded.
"""

from fractions import Fraction
from functools import lru_cache

@lru_cache(maxsize=8)
def stirling2_row(m):
    """Return the tuple (S(m, 0), .., S(m, m)) of Stirling numbers."""
    row = [1]
    for n in range(1, m + 1):
        previous = row + [0]
        row = [0] * (n + 1)
        for k in range(1, n + 1):
            row[k] = k * previous[k] + previous[k - 1]
    return tuple(row)

def occupancy_counts(m):
    """Return the number of resamples with k distinct examples, k = 1..m."""
    if m < 1:
        raise ValueError(f'dataset size must be at least 1, got {m}')
    stirling = stirling2_row(m)
    counts = []
    falling = 1
    for k in range(1, m + 1):
        falling *= m - k + 1
        counts.append(falling * stirling[k])
    return counts

def occupancy_distribution(m):
    """Return [P[d(r) = k] for k = 1..m] for a size `m` bootstrap."""
    total = m ** m
    return [float(Fraction(_, total)) for _ in occupancy_counts(m)]
