"""Special functions used by the closed-form range inversions."""

import logging

import numpy as np
from scipy import special as sp

from .arrays import FloatArray, Real, as_float_array, like
from .errors import LambertDomainError

logger = logging.getLogger(__name__)

BRANCH_POINT = -float(np.exp(-1.0))
BRANCH_TOLERANCE = 1e-12

_MAX_HALLEY_STEPS = 100


def lambert_w0(x: Real) -> Real:
    """
    Principal real branch of the Lambert W function, the solution of w·e^w = x.

    Seeds with a series around the branch point -1/e for |x + 1/e| <= 1.5 and
    with ln(x) - ln(ln(x)) elsewhere, then refines with Halley steps until
    the update drops below 0.7e-16·(2 + |w|).

    Inputs within 1e-12 of -1/e return exactly -1.

    Raises:
        LambertDomainError: if any element lies below -1/e.
    """
    z = as_float_array(x)
    if np.any(z < BRANCH_POINT - BRANCH_TOLERANCE):
        low = float(np.min(z))
        raise LambertDomainError(
            f"Lambert W0 is undefined for x < -1/e (got {low!r})"
        )

    at_branch = np.abs(z - BRANCH_POINT) <= BRANCH_TOLERANCE
    z_safe = np.where(at_branch, 0.0, z)

    with np.errstate(invalid="ignore", divide="ignore"):
        tmp = np.log(z_safe + (z_safe == 0))
        w = tmp - np.log(tmp + (tmp == 0))
        near = np.abs(z_safe - BRANCH_POINT) <= 1.5
        series = np.sqrt(2.0 * np.e * z_safe + 2.0) - 1.0
    w = np.where(near, series, w)

    finite = np.isfinite(z_safe)
    for _ in range(_MAX_HALLEY_STEPS):
        ew = np.exp(w)
        f = w * ew - z_safe
        w1 = w + 1.0
        dw = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1))
        dw = np.where(finite, dw, 0.0)
        w = w - dw
        if np.all(np.abs(dw) < 0.7e-16 * (2.0 + np.abs(w))):
            break
    else:
        logger.debug("Lambert W0 Halley iteration hit the step limit")

    result: FloatArray = np.where(at_branch, -1.0, w)
    result = np.where(np.isnan(z), np.nan, result)
    return like(x, result)


def erfc_inv(y: Real) -> Real:
    """
    Inverse of the complementary error function on (0, 2).

    Safeguarded Newton on log(erfc(x)) = log(y): log-erfc is concave and
    decreasing, so a Newton step never lands left of the root and bisection
    inside the running bracket catches overshoot. Iteration stops once the
    relative residual of erfc reaches rounding level.
    """
    v = as_float_array(y)
    if np.any((v < 0.0) | (v > 2.0)):
        raise ValueError(f"erfc_inv is defined on [0, 2] (got {v!r})")

    # erfc(-x) = 2 - erfc(x) folds the upper half onto (0, 1].
    upper = v > 1.0
    target = np.where(upper, 2.0 - v, v)
    interior = (target > 0.0) & (target < 1.0)
    safe_target = np.where(interior, target, 0.5)
    log_target = np.log(safe_target)

    lo = np.zeros_like(safe_target)
    hi = np.full_like(safe_target, 27.0)
    x = np.zeros_like(safe_target)
    for _ in range(100):
        g = np.log(sp.erfcx(x)) - x * x - log_target
        done = np.abs(g) <= 1e-15 * np.maximum(1.0, np.abs(log_target))
        if np.all(done | ~interior):
            break
        lo = np.where(g > 0.0, x, lo)
        hi = np.where(g <= 0.0, x, hi)
        slope = -2.0 / (np.sqrt(np.pi) * sp.erfcx(x))
        step = x - g / slope
        outside = (step <= lo) | (step >= hi)
        x = np.where(done, x, np.where(outside, 0.5 * (lo + hi), step))

    result = np.where(interior, x, np.where(target >= 1.0, 0.0, np.inf))
    result = np.where(upper, -result, result)
    return like(y, result)
