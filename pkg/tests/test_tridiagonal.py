import pytest
import sys
import os
import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.utils.tridiagonal import apply_cyclic_tridiagonal, solve_cyclic_tridiagonal


def _dense(lower, diag, upper):
    """Dense cyclic tridiagonal matrix with the same coefficient layout."""
    n = diag.size
    matrix = np.zeros((n, n), dtype=np.result_type(lower, diag, upper))
    for j in range(n):
        matrix[j, (j - 1) % n] += lower[j]
        matrix[j, j] += diag[j]
        matrix[j, (j + 1) % n] += upper[j]
    return matrix


class TestCyclicTridiagonal:
    """Test cases for the periodic tridiagonal solver."""

    @pytest.mark.parametrize("n", [3, 4, 17, 128])
    def test_matches_dense_solve(self, n):
        """Test the solution equals numpy's dense solve for a diagonally dominant complex system."""
        rng = np.random.default_rng(n)
        lower = rng.normal(size=n) + 1j * rng.normal(size=n)
        upper = rng.normal(size=n) + 1j * rng.normal(size=n)
        diag = 6.0 + rng.normal(size=n) + 1j * rng.normal(size=n)
        rhs = rng.normal(size=n) + 1j * rng.normal(size=n)

        x = solve_cyclic_tridiagonal(lower, diag, upper, rhs)
        expected = np.linalg.solve(_dense(lower, diag, upper), rhs)
        assert np.allclose(x, expected, rtol=1e-10, atol=1e-12)

    def test_scalar_coefficients(self):
        """Test scalar coefficients broadcast over all rows."""
        n = 64
        rhs = np.sin(np.linspace(0.0, 2.0 * np.pi, n, endpoint=False))
        x = solve_cyclic_tridiagonal(1.0, 10.0, 1.0, rhs)
        assert np.allclose(apply_cyclic_tridiagonal(1.0, 10.0, 1.0, x), rhs, atol=1e-12)

    def test_apply_matches_dense_product(self):
        """Test apply_cyclic_tridiagonal equals the dense matrix product, corners included."""
        rng = np.random.default_rng(3)
        n = 9
        lower, diag, upper, x = (rng.normal(size=n) for _ in range(4))
        assert np.allclose(apply_cyclic_tridiagonal(lower, diag, upper, x), _dense(lower, diag, upper) @ x)

    def test_real_input_stays_real(self):
        """Test a real system returns a real solution."""
        x = solve_cyclic_tridiagonal(-1.0, 4.0, -1.0, np.ones(8))
        assert np.isrealobj(x)
        assert np.allclose(x, 0.5)

    @pytest.mark.parametrize("n", [1, 2])
    def test_too_small(self, n):
        """Test fewer than three rows raise ValueError."""
        with pytest.raises(ValueError):
            solve_cyclic_tridiagonal(1.0, 4.0, 1.0, np.ones(n))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
