"""Stable complementary-error-function evaluations.

Everything downstream writes exponential-times-erfc products through the
scaled function erfcx(x) = exp(x^2) erfc(x), which stays in (0, 1] for
x >= 0 and never overflows. ``erfc`` here is the usual
(2/sqrt(pi)) * integral_x^inf exp(-y^2) dy.
"""

from __future__ import annotations

import numpy as np
import scipy.special as _sp


def erfc(x):
    """Complementary error function, relative error ~1e-16 (scipy)."""
    return _sp.erfc(x)


def erfcx(x):
    """exp(x^2) erfc(x) without overflow."""
    return _sp.erfcx(x)


def log_erfcx(x):
    """log(erfcx(x)), valid for large positive x where erfcx underflows not."""
    return np.log(_sp.erfcx(x))


def log_erfc(x):
    """log(erfc(x)) = log(erfcx(x)) - x^2; safe for large positive x."""
    x = np.asarray(x, dtype=float)
    return np.log(_sp.erfcx(x)) - x * x
