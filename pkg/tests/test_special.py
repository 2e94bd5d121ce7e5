import math

import numpy as np
import pytest
from scipy import special as sp

from uwloc.errors import LambertDomainError
from uwloc.special import BRANCH_POINT, erfc_inv, lambert_w0


def test_lambert_w0_identity_over_wide_range() -> None:
    """Test that W0(x)·exp(W0(x)) reproduces x across twelve decades."""
    x = np.logspace(-6, 6, 400)
    w = lambert_w0(x)
    residual = np.abs(w * np.exp(w) - x) / np.maximum(1.0, x)
    assert residual.max() <= 1e-10


def test_lambert_w0_matches_scipy() -> None:
    """Test that the principal branch agrees with scipy.special.lambertw."""
    x = np.concatenate([np.linspace(-0.36, 0.0, 50), np.logspace(-3, 8, 60)])
    expected = sp.lambertw(x, 0).real
    np.testing.assert_allclose(lambert_w0(x), expected, rtol=1e-12, atol=1e-14)


def test_lambert_w0_known_values() -> None:
    """Test W0 at 0, e and the branch point."""
    assert lambert_w0(0.0) == pytest.approx(0.0, abs=1e-15)
    assert lambert_w0(math.e) == pytest.approx(1.0, rel=1e-14)
    assert lambert_w0(BRANCH_POINT) == -1.0


def test_lambert_w0_scalar_in_scalar_out() -> None:
    """Test that a float argument yields a plain float."""
    assert isinstance(lambert_w0(1.0), float)
    assert isinstance(lambert_w0(np.array([1.0, 2.0])), np.ndarray)


def test_lambert_w0_below_branch_point_raises() -> None:
    """Test that arguments below -1/e are rejected."""
    with pytest.raises(LambertDomainError):
        lambert_w0(-0.5)
    with pytest.raises(ValueError):
        lambert_w0(np.array([1.0, -1.0]))


def test_erfc_inv_matches_scipy() -> None:
    """Test erfc_inv against scipy.special.erfcinv on (0, 2)."""
    y = np.concatenate([np.logspace(-300, -1, 80), np.linspace(0.05, 1.95, 80)])
    np.testing.assert_allclose(erfc_inv(y), sp.erfcinv(y), rtol=1e-12, atol=1e-15)


def test_erfc_inv_endpoints_and_domain() -> None:
    """Test erfc_inv at 0, 1, 2 and outside its domain."""
    assert erfc_inv(1.0) == 0.0
    assert erfc_inv(0.0) == math.inf
    assert erfc_inv(2.0) == -math.inf
    with pytest.raises(ValueError):
        erfc_inv(2.5)
    with pytest.raises(ValueError):
        erfc_inv(-0.1)


def test_erfc_inv_inverts_erfc() -> None:
    """Test that erfc(erfc_inv(y)) returns y."""
    y = np.array([1e-12, 2e-6, 0.3, 1.4])
    np.testing.assert_allclose(sp.erfc(erfc_inv(y)), y, rtol=1e-12)
