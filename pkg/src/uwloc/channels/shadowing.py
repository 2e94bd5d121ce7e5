import numpy as np

from ..arrays import Real, as_float_array, like
from .params import ShadowingModel


def shadowed_power_sample(
    true_power_db: Real, model: ShadowingModel, rng: np.random.Generator
) -> Real:
    """
    Mean of N shadowed readings of ``true_power_db``.

    Each reading adds zero-mean Gaussian shadowing with standard deviation φ dB;
    averaging N readings is the unbiased estimator of the true level. Array
    input draws an independent set of N readings per element.
    """
    level = as_float_array(true_power_db)
    draws = rng.normal(0.0, model.std_dev, size=(*level.shape, model.mean_estimator_count))
    return like(true_power_db, level + draws.mean(axis=-1))
