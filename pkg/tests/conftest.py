import pytest
import sys
import os

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.schemas.model import SystemParams


@pytest.fixture
def second_order_params():
    """Second-order regime (V=100, Ng=1, Omega_a=50, Omega_m=100, Gamma_m=10, chi=0)."""
    return SystemParams(v=100.0, ng=1.0, omega_a=50.0, omega_m=100.0, gamma_m=10.0, chi=0.0, lambda_coll=0.0)


@pytest.fixture
def first_order_params():
    """Symmetric first-order regime (Omega_a=5000, Omega_m=10000, Gamma_m=1000)."""
    return SystemParams(v=100.0, ng=1.0, omega_a=5000.0, omega_m=10000.0, gamma_m=1000.0, chi=0.0, lambda_coll=0.0)


@pytest.fixture
def asymmetric_params():
    """Asymmetric regime (chi=0.25, otherwise as second_order)."""
    return SystemParams(v=100.0, ng=1.0, omega_a=50.0, omega_m=100.0, gamma_m=10.0, chi=0.25, lambda_coll=0.0)


@pytest.fixture
def weak_damping_params():
    """Weakly damped, non-interacting set used for the spectrum and entanglement checks."""
    return SystemParams(v=100.0, ng=0.0, omega_a=50.0, omega_m=100.0, gamma_m=1.0, chi=0.0, lambda_coll=0.0)


@pytest.fixture
def fast_mode_params():
    """Fast membrane and atoms (Omega_m=1e5, Omega_a=5e4, Gamma_m=1e3, Ng=0)."""
    return SystemParams(v=100.0, ng=0.0, omega_a=5e4, omega_m=1e5, gamma_m=1e3, chi=0.0, lambda_coll=0.0)


@pytest.fixture
def shallow_first_order_params():
    """Shallow lattice with a moderate first-order transition, cheap to sweep."""
    return SystemParams(v=20.0, ng=1.0, omega_a=100.0, omega_m=200.0, gamma_m=20.0, chi=0.0, lambda_coll=0.0)


@pytest.fixture
def second_order_config_text():
    """Config file content for the second_order parameter set."""
    return "v = 100\nng = 1\nomega_a = 50\nomega_m = 100\ngamma_m = 10\nchi = 0\nlambda = 30\n"
