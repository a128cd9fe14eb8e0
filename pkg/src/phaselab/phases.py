"""Angle bookkeeping: principal values and distances on the circle."""

import math

import numpy as np

TWO_PI = 2.0 * math.pi

# angles within this distance of -pi are reported as +pi
BRANCH_SNAP = 1e-9


def principal_angle(x, snap=BRANCH_SNAP):
    """Reduce an angle (scalar or array) to the interval (-pi, pi].

    Values landing within ``snap`` of the excluded endpoint -pi are moved
    to +pi, so that e.g. ``-pi + 1e-16`` and ``pi`` print identically.
    """
    y = math.pi - np.mod(math.pi - np.asarray(x, dtype=float), TWO_PI)
    y = np.where(y <= -math.pi + snap, y + TWO_PI, y)
    if y.ndim == 0:
        return float(y)
    return y


def angle_distance(a, b):
    """Distance between two angles on the circle, in [0, pi]."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI)
    d = np.minimum(d, TWO_PI - d)
    if d.ndim == 0:
        return float(d)
    return d
