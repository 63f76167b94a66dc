"""Numerical limits shared across modules.

``GATEUNIV_DENSE_THRESHOLD`` in the environment overrides the default
dense/matrix-free switch point.
"""

import os

MAX_TOTAL_DIM = 2**21
EIGEN_TOL = 1e-8
EIGEN_GAP = 1e-4
UNITARY_TOL = 1e-10
DET_TOL = 1e-8


def dense_threshold() -> int:
    value = os.environ.get("GATEUNIV_DENSE_THRESHOLD")
    if value is None:
        return 4096
    return int(value)
