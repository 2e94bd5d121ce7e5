import logging
from abc import ABC, abstractmethod
from enum import Enum

import numpy as np

from ..arrays import FloatArray, Real, as_float_array, like
from ..errors import NonPositiveDistanceError, RangeOutOfBracketError

logger = logging.getLogger(__name__)


class Technology(str, Enum):
    OPTICAL = "optical"
    MI = "mi"
    ACOUSTIC = "acoustic"


class LinkModel(ABC):
    """Abstract base class for a ranging link working on received levels in dB."""

    def __init__(self, bracket: tuple[float, float]) -> None:
        r_min, r_max = bracket
        if not 0 < r_min < r_max:
            raise ValueError(f"Invalid inversion bracket {bracket}")
        self.bracket = (float(r_min), float(r_max))
        self._level_bracket: tuple[float, float] | None = None

    # --- Public API (with caching) ---

    def level_bracket(self) -> tuple[float, float]:
        """
        Lowest and highest received level reachable inside the distance
        bracket, computed once per link.
        """
        if self._level_bracket is None:
            r_min, r_max = self.bracket
            low = float(self._level_db(as_float_array(r_max)))
            high = float(self._level_db(as_float_array(r_min)))
            self._level_bracket = (low, high)
        return self._level_bracket

    def received_db(self, r: Real) -> Real:
        """Received level (dB) at distance ``r``; strictly decreasing in ``r``."""
        d = as_float_array(r)
        if np.any(d <= 0):
            raise NonPositiveDistanceError(
                f"{self.technology.value} link evaluated at non-positive distance"
            )
        return like(r, self._level_db(d))

    def invert_db(self, level_db: Real, *, clip: bool = False) -> Real:
        """
        Distance whose received level equals ``level_db``.

        Levels outside the bracket raise unless ``clip`` is set, in which case
        they saturate at the bracket ends.
        """
        level = as_float_array(level_db)
        low, high = self.level_bracket()
        slack = 1e-12 * max(1.0, abs(low), abs(high))
        outside = (level < low - slack) | (level > high + slack)
        if np.any(outside):
            if not clip:
                raise RangeOutOfBracketError(
                    f"{self.technology.value} level outside achievable range "
                    f"[{low:.6g}, {high:.6g}] dB",
                    self.bracket,
                )
            logger.debug(
                f"Clipping {int(np.count_nonzero(outside))} {self.technology.value} "
                "levels into the inversion bracket"
            )
        level = np.clip(level, low, high)
        r = np.clip(self._invert_level_db(level), *self.bracket)
        return like(level_db, r)

    def max_range(self, min_level_db: float) -> float:
        """Largest distance that still delivers ``min_level_db``."""
        return float(self.invert_db(float(min_level_db), clip=True))

    # --- Abstract methods for subclasses to implement ---

    @property
    @abstractmethod
    def technology(self) -> Technology:
        pass

    @abstractmethod
    def _level_db(self, r: FloatArray) -> FloatArray:
        """Forward model in dB for positive distances."""
        pass

    @abstractmethod
    def _invert_level_db(self, level_db: FloatArray) -> FloatArray:
        """Inverse of ``_level_db`` for levels inside the bracket."""
        pass
