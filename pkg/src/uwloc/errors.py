"""Exception hierarchy for uwloc.

Input problems derive from ``ValueError`` as well, so callers that only catch
``ValueError`` keep working.
"""

from collections.abc import Sequence


class UwlocError(Exception):
    """Base class for every error raised by uwloc."""


class LambertDomainError(UwlocError, ValueError):
    """Argument lies below the branch point -1/e of the principal branch."""


class NonPositiveDistanceError(UwlocError, ValueError):
    """A range model was evaluated at a distance that is not strictly positive."""


class RangeOutOfBracketError(UwlocError, ValueError):
    """An observed level cannot be produced by any distance in the bracket."""

    def __init__(self, message: str, bracket: tuple[float, float]) -> None:
        super().__init__(message)
        self.bracket = bracket


class GeometryError(UwlocError, ValueError):
    """Degenerate geometry: coplanar anchors, zero divergence angle, empty region."""


class BerTargetError(UwlocError, ValueError):
    """Requested bit error rate is outside the open interval (0, 0.5)."""


class CoincidentNodesError(UwlocError, ValueError):
    """Two node positions coincide where a likelihood needs their distance."""


class ConfigError(UwlocError, ValueError):
    """A scenario configuration key or value is invalid."""


class UnknownRecipeError(UwlocError, KeyError):
    """No figure recipe is registered under the requested id."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class OutputError(UwlocError, OSError):
    """A result file could not be written."""


class DisconnectedGraphError(UwlocError):
    """The range graph splits into more than one connected component."""

    def __init__(self, components: Sequence[Sequence[int]]) -> None:
        self.components = [list(c) for c in components]
        sizes = ", ".join(str(len(c)) for c in self.components)
        preview = "; ".join(
            "{" + ", ".join(str(i) for i in c[:6]) + (", ..." if len(c) > 6 else "") + "}"
            for c in self.components[:4]
        )
        super().__init__(
            f"Range graph is disconnected into {len(self.components)} components "
            f"(sizes {sizes}): {preview}"
        )


class SingularFisherError(UwlocError):
    """The Fisher information of the unknown nodes is not invertible."""

    def __init__(self, null_nodes: Sequence[int]) -> None:
        self.null_nodes = sorted(set(null_nodes))
        super().__init__(
            f"Fisher information is singular; unidentifiable nodes: {self.null_nodes}"
        )


class NumericalError(UwlocError, ArithmeticError):
    """A linear-algebra routine (eigensolver, factorization) failed to converge."""
