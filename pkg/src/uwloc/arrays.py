from typing import TypeVar, cast

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]

# Scalar in, scalar out; array in, array out.
Real = TypeVar("Real", float, FloatArray)


def as_float_array(value: float | FloatArray) -> FloatArray:
    return np.asarray(value, dtype=np.float64)


def like(template: Real, value: FloatArray) -> Real:
    """Returns ``value`` shaped like ``template``: a float for scalar input."""
    if np.ndim(template) == 0:
        return cast(Real, float(value))
    return cast(Real, value)
