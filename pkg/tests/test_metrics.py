import math

import numpy as np
import pytest

from uwloc.metrics import EnergyParams, energy_error_product, node_tx_energy, rmse, total_energy


@pytest.fixture
def energy() -> EnergyParams:
    return EnergyParams(e_bit=2e-6, e_fundamental=1e-3, wavelength=0.5)


def test_rmse_is_mean_of_norms() -> None:
    """Test that the error metric averages Euclidean norms rather than squaring them."""
    truth = np.zeros((2, 3))
    est = np.array([[3.0, 4.0, 0.0], [0.0, 0.0, 1.0]])
    assert rmse(truth, est) == pytest.approx(3.0)


def test_rmse_edge_cases() -> None:
    """Test the empty and mismatched inputs."""
    assert rmse(np.zeros((0, 3)), np.zeros((0, 3))) == 0.0
    with pytest.raises(ValueError, match="shape"):
        rmse(np.zeros((2, 3)), np.zeros((3, 3)))


def test_node_tx_energy(energy: EnergyParams) -> None:
    """Test E_B (4 pi r / lambda)^2 for scalars and arrays."""
    assert node_tx_energy(energy, 1.0) == pytest.approx(2e-6 * (8.0 * math.pi) ** 2)
    values = node_tx_energy(energy, np.array([1.0, 2.0]))
    assert values[1] == pytest.approx(4.0 * values[0])


def test_total_energy_multiplies_by_node_count(energy: EnergyParams) -> None:
    """Test K E_F + K sum(E_R) over the nodes."""
    ranges = np.array([1.0, 2.0, 3.0])
    tx = float(np.sum(node_tx_energy(energy, ranges)))
    assert total_energy(energy, ranges) == pytest.approx(3 * 1e-3 + 3 * tx)
    with pytest.raises(ValueError):
        total_energy(energy, [])


def test_energy_error_product_matches_factored_form(energy: EnergyParams) -> None:
    """Test that the product equals transmit energy times the mean error."""
    rng = np.random.default_rng(0)
    truth = rng.uniform(0.0, 10.0, size=(6, 3))
    est = truth + rng.normal(0.0, 0.3, size=(6, 3))
    ranges = rng.uniform(2.0, 8.0, size=6)

    product = energy_error_product(energy, ranges, truth, est)
    factored = float(np.sum(node_tx_energy(energy, ranges))) * rmse(truth, est)
    assert product == pytest.approx(factored)


def test_energy_error_product_grows_with_range(energy: EnergyParams) -> None:
    """Test that at fixed error a larger range costs more."""
    truth = np.zeros((3, 3))
    est = np.ones((3, 3))
    short = energy_error_product(energy, np.full(3, 2.0), truth, est)
    long = energy_error_product(energy, np.full(3, 4.0), truth, est)
    assert long == pytest.approx(4.0 * short)


def test_energy_error_product_shape_check(energy: EnergyParams) -> None:
    """Test that one range per node is required."""
    with pytest.raises(ValueError, match="one range per node"):
        energy_error_product(energy, np.ones(2), np.zeros((3, 3)), np.zeros((3, 3)))


def test_energy_params_validation() -> None:
    """Test that negative energies and non-positive wavelengths are rejected."""
    with pytest.raises(ValueError):
        EnergyParams(e_bit=-1.0)
    with pytest.raises(ValueError):
        EnergyParams(wavelength=0.0)


def test_rmse_ignores_node_order() -> None:
    """Test that permuting nodes in both arrays leaves the error unchanged."""
    rng = np.random.default_rng(3)
    truth = rng.uniform(0.0, 100.0, size=(20, 3))
    est = truth + rng.normal(0.0, 2.0, size=truth.shape)
    for _ in range(5):
        order = rng.permutation(20)
        assert rmse(truth[order], est[order]) == pytest.approx(rmse(truth, est))


@pytest.mark.parametrize("e_fundamental", [0.0, 1e-3])
def test_energy_grows_with_transmit_power(e_fundamental: float) -> None:
    """Test that a larger per-bit transmit energy raises total energy and the product."""
    rng = np.random.default_rng(4)
    truth = rng.uniform(0.0, 10.0, size=(5, 3))
    est = truth + rng.normal(0.0, 0.2, size=truth.shape)
    ranges = np.full(5, 6.0)
    levels = [EnergyParams(e_bit=e, e_fundamental=e_fundamental) for e in (1e-7, 1e-6, 1e-5, 1e-4)]

    totals = [total_energy(params, ranges) for params in levels]
    products = [energy_error_product(params, ranges, truth, est) for params in levels]
    assert np.all(np.diff(totals) > 0.0)
    assert np.all(np.diff(products) > 0.0)
