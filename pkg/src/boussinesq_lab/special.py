"""Gamma-function phases and branch-aware logarithms."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import loggamma


def arg_gamma(z: complex) -> float:
    """Continuous-branch argument of Gamma(z), i.e. Im log Gamma(z)."""
    return float(np.imag(loggamma(complex(z))))


def log0(k: complex) -> complex:
    """Logarithm with its cut on the positive real axis, arg in [0, 2*pi)."""
    k = complex(k)
    if k == 0:
        raise ValueError("log0 undefined at 0")
    arg = math.atan2(k.imag, k.real)
    if arg < 0:
        arg += 2.0 * math.pi
    return complex(math.log(abs(k)), arg)
