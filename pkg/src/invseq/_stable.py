"""Shared numerically stable kernels.

Every module works with the per-coordinate denominator

    D_i(alpha) = i^(1+2*alpha) + n * kappa_i^2

which is the prior-precision-plus-data-precision term after multiplying
the textbook expressions through by kappa_i^2.  Powers are always taken
in log space (i^(1+2a) = exp((1+2a)*log i), exactly 1 at i = 1) so that
large alpha never overflows.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit


def log_denominator(alpha: float, log_i: np.ndarray, log_nk2: np.ndarray) -> np.ndarray:
    """log(i^(1+2*alpha) + n*kappa_i^2), elementwise."""
    return np.logaddexp((1.0 + 2.0 * alpha) * log_i, log_nk2)


def signal_weights(alpha: float, log_i: np.ndarray, log_nk2: np.ndarray):
    """Return (w, 1-w) with w = n*kappa_i^2 / (i^(1+2*alpha) + n*kappa_i^2).

    w is the fraction of the posterior precision contributed by the data;
    both w and 1-w are computed through the logistic function so neither
    underflows to a rounded 0/1 pair inconsistently.
    """
    s = log_nk2 - (1.0 + 2.0 * alpha) * log_i
    return expit(s), expit(-s)


def softplus(s: np.ndarray) -> np.ndarray:
    """log(1 + exp(s)) without overflow."""
    return np.logaddexp(0.0, s)
