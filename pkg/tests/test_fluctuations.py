import pytest
import sys
import os
import numpy as np
from scipy.linalg import solve_continuous_lyapunov

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.core.exceptions import ComplexRootError, DomainError, UnstableDriftError
from app.schemas.dynamics import SweepDirection, SweepResult
from app.schemas.fluctuations import BdgMatrix, QuadratureCovariance
from app.schemas.model import SteadyState
from app.services.fluctuation_service import fluctuation_service
from app.services.model_service import model_service
from app.services.steadystate_service import steadystate_service


def _normal_phase(params):
    """Unpolarised stationary point (gamma0 = 0, alpha0 = 0) at the given coupling."""
    sigma0 = steadystate_service.solve_width(0.0, params)
    return SteadyState(
        alpha0=0j,
        gamma0=0.0,
        sigma0=sigma0,
        energy0=model_service.reduced_potential(0.0, sigma0, params),
    )


def _two_mode_squeezed(r):
    """Covariance of a two-mode squeezed vacuum, basis (q1, q2, p1, p2)."""
    ch, sh = 0.5 * np.cosh(2.0 * r), 0.5 * np.sinh(2.0 * r)
    return QuadratureCovariance(c=np.array([
        [ch, sh, 0.0, 0.0],
        [sh, ch, 0.0, 0.0],
        [0.0, 0.0, ch, -sh],
        [0.0, 0.0, -sh, ch],
    ]))


def _sweep_from_states(params, lambdas, steadies, direction):
    """SweepResult whose long-time states are the given stationary points."""
    return SweepResult(
        params=params,
        direction=direction,
        lambdas=list(lambdas),
        gamma_inf=[abs(s.gamma0) for s in steadies],
        alpha_inf=[s.alpha0 for s in steadies],
        sigma_inf=[s.sigma0 for s in steadies],
        converged=[True] * len(steadies),
        states=[s.to_mean_field_state() for s in steadies],
    )


def _sweep_from_steady_states(params, lambdas, direction):
    """SweepResult whose long-time states are the exact global minimizers."""
    steadies = [steadystate_service.find_steady_state(params.with_coupling(lam)) for lam in lambdas]
    return _sweep_from_states(params, lambdas, steadies, direction)


def _polarised_minimum(params):
    """Local minimum of E(gamma) at the largest gamma > 0, refined on (gamma, sigma)."""
    surface = steadystate_service.energy_surface(params)
    e = surface.energies
    interior = np.flatnonzero((e[1:-1] < e[:-2]) & (e[1:-1] <= e[2:])) + 1
    k = int(interior[np.argmax(surface.gammas[interior])])
    result = steadystate_service.stationary_point(float(surface.gammas[k]), float(surface.sigmas[k]), params)
    assert result is not None and result[2]
    gamma0, sigma0, _ = result
    assert gamma0 > 0.0
    return SteadyState(
        alpha0=model_service.membrane_amplitude(gamma0, sigma0, params),
        gamma0=gamma0,
        sigma0=sigma0,
        energy0=model_service.reduced_potential(gamma0, sigma0, params),
    )


class TestBdgMatrix:
    """Test cases for the Bogoliubov-de Gennes stability matrix."""

    def test_block_structure(self, asymmetric_params):
        """Test M = [[H, G], [-G, -H*]] with symmetric H, G and zero diagonal G."""
        params = asymmetric_params.with_coupling(60.0)
        bdg = fluctuation_service.bdg_matrix(steadystate_service.find_steady_state(params), params)
        assert np.allclose(bdg.h, bdg.h.T)
        assert np.allclose(bdg.g, bdg.g.T)
        assert np.allclose(np.diag(bdg.g), 0.0)
        assert np.allclose(bdg.m[:3, :3], bdg.h)
        assert np.allclose(bdg.m[3:, 3:], -bdg.h.conj())
        assert np.allclose(bdg.m[3:, :3], -bdg.g)

    def test_uncoupled_frequencies(self, weak_damping_params):
        """Test lambda = 0 gives bare membrane Omega_m - i Gamma_m and transition Omega_a."""
        steady = _normal_phase(weak_damping_params)
        values, weights = fluctuation_service.spectrum_candidates(steady, weak_damping_params)
        membrane = values[np.argmax(weights[:, 0])]
        transition = values[np.argmax(weights[:, 1])]
        assert membrane == pytest.approx(weak_damping_params.omega_m - 1j * weak_damping_params.gamma_m, abs=1e-9)
        assert transition == pytest.approx(weak_damping_params.omega_a, abs=1e-9)

    def test_normal_phase_characteristic_equation(self, fast_mode_params):
        """Test membrane/transition eigenvalues solve ((s+G)^2+Wm^2)(s^2+Wa^2) = lam^2 e^{-2 sigma^2} Wa Wm."""
        lambda_s2 = steadystate_service.lambda_s2(fast_mode_params)
        params = fast_mode_params.with_coupling(0.5 * lambda_s2)
        steady = _normal_phase(params)
        values, weights = fluctuation_service.spectrum_candidates(steady, params)
        hybrid = values[weights[:, 2] < 0.5]
        assert hybrid.size == 2

        p = params
        target = p.lambda_coll ** 2 * np.exp(-2.0 * steady.sigma0 ** 2) * p.omega_a * p.omega_m
        scale = p.omega_m ** 2 * p.omega_a ** 2
        for nu in hybrid:
            s = -1j * nu
            lhs = ((s + p.gamma_m) ** 2 + p.omega_m ** 2) * (s ** 2 + p.omega_a ** 2)
            assert abs(lhs - target) / scale < 1e-8

    def test_transition_mode_softens_at_lambda_s2(self, fast_mode_params):
        """Test the transition branch reaches zero frequency at the critical coupling."""
        params = fast_mode_params.with_coupling(steadystate_service.lambda_s2(fast_mode_params))
        values, _ = fluctuation_service.spectrum_candidates(_normal_phase(params), params)
        assert np.min(np.abs(values)) < 1.0

    @staticmethod
    def _transition_frequency(params):
        """Smallest positive frequency of the membrane/transition pair in the normal phase."""
        values, weights = fluctuation_service.spectrum_candidates(_normal_phase(params), params)
        hybrid = values[weights[:, 2] < 0.5]
        return float(np.min(hybrid.real))

    @staticmethod
    def _two_mode_root(params):
        """Lower root of ((s+G)^2+Wm^2)(s^2+Wa^2) = lam^2 e^{-2 sigma^2} Wa Wm with nu = i s."""
        p = params
        sigma0 = steadystate_service.solve_width(0.0, p)
        target = p.lambda_coll ** 2 * np.exp(-2.0 * sigma0 ** 2) * p.omega_a * p.omega_m
        a, m, g = p.omega_a ** 2, p.omega_m ** 2, p.gamma_m
        coefficients = [1.0, 2.0 * g, g ** 2 + m + a, 2.0 * g * a, a * (g ** 2 + m) - target]
        nus = 1j * np.roots(coefficients)
        return float(np.min(nus.real[nus.real > 0.0]))

    @pytest.mark.parametrize("ratio", [0.2, 0.5, 0.8])
    def test_transition_frequency_follows_two_mode_law(self, weak_damping_params, ratio):
        """Test omega_2 below lambda_c is the lower root of the membrane/transition characteristic polynomial."""
        lambda_c = steadystate_service.lambda_s2(weak_damping_params)
        params = weak_damping_params.with_coupling(ratio * lambda_c)
        assert self._transition_frequency(params) == pytest.approx(self._two_mode_root(params), rel=1e-8)

    def test_softening_formula_at_weak_coupling(self, weak_damping_params):
        """Test omega_2 = Omega_a sqrt(1 - (lambda/lambda_c)^2) within 1% at lambda = 0.2 lambda_c."""
        lambda_c = steadystate_service.lambda_s2(weak_damping_params)
        params = weak_damping_params.with_coupling(0.2 * lambda_c)
        expected = params.omega_a * np.sqrt(1.0 - 0.2 ** 2)
        assert self._transition_frequency(params) == pytest.approx(expected, rel=1e-2)

    @pytest.mark.parametrize("ratio", [0.2, 0.5, 0.8])
    def test_softening_formula_for_fast_membrane(self, weak_damping_params, ratio):
        """Test omega_2 = Omega_a sqrt(1 - (lambda/lambda_c)^2) within 1% once Omega_m >> Omega_a."""
        base = weak_damping_params.with_updates(omega_m=5000.0)
        params = base.with_coupling(ratio * steadystate_service.lambda_s2(base))
        expected = params.omega_a * np.sqrt(1.0 - ratio ** 2)
        assert self._transition_frequency(params) == pytest.approx(expected, rel=1e-2)

    def test_softening_formula_overestimates_slow_membrane(self, weak_damping_params):
        """Test the exact omega_2 lies below Omega_a sqrt(1 - (lambda/lambda_c)^2) when Omega_m = 2 Omega_a."""
        lambda_c = steadystate_service.lambda_s2(weak_damping_params)
        for ratio in (0.5, 0.8):
            params = weak_damping_params.with_coupling(ratio * lambda_c)
            formula = params.omega_a * np.sqrt(1.0 - ratio ** 2)
            assert self._transition_frequency(params) < formula


class TestCovariance:
    """Test cases for the stationary Lyapunov covariance."""

    @pytest.mark.parametrize("n_bath", [0.0, 3.0])
    def test_thermal_membrane(self, weak_damping_params, n_bath):
        """Test lambda = 0 leaves the membrane thermal with variance N_m + 1/2 and atoms in vacuum."""
        params = weak_damping_params.with_updates(n_bath=n_bath)
        bdg = fluctuation_service.bdg_matrix(_normal_phase(params), params)
        cov = fluctuation_service.stationary_covariance(bdg, params)
        expected = np.diag([n_bath + 0.5, 0.5, 0.5, n_bath + 0.5, 0.5, 0.5])
        assert np.allclose(cov.c, expected, atol=1e-10)

    def test_matches_scipy_in_normal_phase(self, second_order_params):
        """Test the connected block matches scipy's Lyapunov solver and the breathing mode is vacuum."""
        params = second_order_params.with_coupling(0.5 * steadystate_service.lambda_s2(second_order_params))
        bdg = fluctuation_service.bdg_matrix(steadystate_service.find_steady_state(params), params)
        cov = fluctuation_service.stationary_covariance(bdg, params)

        index = np.array([0, 1, 3, 4])
        drift = fluctuation_service.quadrature_drift(bdg)[np.ix_(index, index)]
        diffusion = fluctuation_service.diffusion_matrix(params)[np.ix_(index, index)]
        reference = solve_continuous_lyapunov(drift, -diffusion)
        assert np.allclose(cov.c[np.ix_(index, index)], reference, atol=1e-9)
        assert cov.c[2, 2] == pytest.approx(0.5)
        assert cov.c[5, 5] == pytest.approx(0.5)

    def test_lyapunov_residual_in_ordered_phase(self, second_order_params):
        """Test A C + C A^T + D = 0 with all three modes connected."""
        params = second_order_params.with_coupling(1.3 * steadystate_service.lambda_s2(second_order_params))
        bdg = fluctuation_service.bdg_matrix(steadystate_service.find_steady_state(params), params)
        cov = fluctuation_service.stationary_covariance(bdg, params)
        drift = fluctuation_service.quadrature_drift(bdg)
        residual = drift @ cov.c + cov.c @ drift.T + fluctuation_service.diffusion_matrix(params)
        assert np.max(np.abs(residual)) < 1e-8 * max(1.0, np.max(np.abs(drift)))
        assert np.allclose(cov.c, cov.c.T)
        assert fluctuation_service.physicality_margin(cov) > -1e-9

    def test_unstable_drift(self, weak_damping_params):
        """Test an amplifying membrane mode raises UnstableDriftError."""
        h = np.zeros((3, 3), dtype=complex)
        h[0, 0] = 10.0 + 1.0j
        bdg = BdgMatrix.from_blocks(h, np.zeros((3, 3), dtype=complex))
        with pytest.raises(UnstableDriftError):
            fluctuation_service.stationary_covariance(bdg, weak_damping_params)


class TestLogarithmicNegativity:
    """Test cases for the two-mode logarithmic negativity."""

    @pytest.mark.parametrize("r", [0.1, 0.5, 1.2])
    def test_two_mode_squeezed_vacuum(self, r):
        """Test E_N = 2r for a two-mode squeezed vacuum."""
        assert fluctuation_service.logarithmic_negativity(_two_mode_squeezed(r)) == pytest.approx(2.0 * r, rel=1e-9)

    def test_vacuum_is_separable(self):
        """Test the vacuum has E_N = 0."""
        cov = QuadratureCovariance(c=0.5 * np.eye(6))
        assert fluctuation_service.logarithmic_negativity(cov, (0, 2)) == 0.0

    def test_unphysical_covariance(self):
        """Test a negative variance raises ComplexRootError."""
        c = 0.5 * np.eye(6)
        c[3, 3] = -1.0
        with pytest.raises(ComplexRootError):
            fluctuation_service.logarithmic_negativity(QuadratureCovariance(c=c), (0, 1))

    @pytest.mark.parametrize("mode_pair", [(0, 0), (0, 3), (-1, 1)])
    def test_invalid_mode_pair(self, mode_pair):
        """Test equal or out-of-range mode indices raise DomainError."""
        with pytest.raises(DomainError):
            fluctuation_service.logarithmic_negativity(QuadratureCovariance(c=0.5 * np.eye(6)), mode_pair)

    def test_physicality_margin_of_vacuum(self):
        """Test the vacuum saturates the uncertainty relation."""
        cov = QuadratureCovariance(c=0.5 * np.eye(6))
        assert fluctuation_service.physicality_margin(cov) == pytest.approx(0.0, abs=1e-12)


class TestExcitationSpectrum:
    """Test cases for branch tracking of the collective excitations."""

    def test_branches_below_transition(self, fast_mode_params):
        """Test branch labels, bare values at lambda = 0 and softening of the transition branch."""
        lambda_s2 = steadystate_service.lambda_s2(fast_mode_params)
        grid = np.linspace(0.0, 0.95 * lambda_s2, 20)
        branches = fluctuation_service.excitation_spectrum(fast_mode_params, grid)

        assert [b.label for b in branches] == ["omega_1", "omega_2", "omega_3"]
        membrane, transition, _ = branches
        assert membrane.omega[0] == pytest.approx(fast_mode_params.omega_m, abs=1e-6)
        assert membrane.decay[0] == pytest.approx(fast_mode_params.gamma_m, abs=1e-6)
        assert transition.omega[0] == pytest.approx(fast_mode_params.omega_a, abs=1e-6)
        assert transition.omega[-1] < 0.5 * fast_mode_params.omega_a
        assert np.all(np.diff(transition.omega) < 0.0)
        assert all(len(b.nu) == grid.size for b in branches)

    def test_empty_grid(self, weak_damping_params):
        """Test an empty coupling grid raises DomainError."""
        with pytest.raises(DomainError):
            fluctuation_service.excitation_spectrum(weak_damping_params, [])

    def test_negative_coupling(self, weak_damping_params):
        """Test a negative coupling in the grid raises DomainError."""
        with pytest.raises(DomainError):
            fluctuation_service.excitation_spectrum(weak_damping_params, [0.0, -1.0])

    def test_along_hysteresis_matches_minimal_branch(self, weak_damping_params):
        """Test sweep states equal to the global minimizers reproduce the minimal spectrum."""
        lambdas = np.linspace(10.0, 50.0, 5)
        forward = _sweep_from_steady_states(weak_damping_params, lambdas, SweepDirection.FORWARD)
        backward = _sweep_from_steady_states(weak_damping_params, lambdas[::-1], SweepDirection.BACKWARD)
        spectrum = fluctuation_service.spectrum_along_hysteresis(weak_damping_params, forward, backward)

        for along, minimal in zip(spectrum.forward, spectrum.minimal):
            assert np.allclose(along.nu, minimal.nu, atol=1e-9)
        for along, minimal in zip(spectrum.backward, spectrum.minimal):
            assert np.allclose(along.nu, minimal.nu, atol=1e-9)

    def test_first_order_branches_split_inside_hysteresis(self, first_order_params):
        """Test forward and backward spectra leave the minimal spectrum only where their state is metastable."""
        params = first_order_params
        spinodal = steadystate_service.spinodal_coupling(params)
        lambda_s1 = steadystate_service.lambda_s1(params)
        lambda_s2 = steadystate_service.lambda_s2(params)
        assert spinodal < lambda_s1 < lambda_s2

        lambdas = [0.9 * spinodal, 0.5 * (spinodal + lambda_s1), 0.5 * (lambda_s1 + lambda_s2), 1.1 * lambda_s2]
        global_minima = [steadystate_service.find_steady_state(params.with_coupling(lam)) for lam in lambdas]
        assert global_minima[1].gamma0 == 0.0
        assert global_minima[2].gamma0 > 0.0

        # forward stays unpolarised up to lambda_s2, backward stays polarised down to the spinodal
        forward_states = list(global_minima)
        forward_states[2] = _normal_phase(params.with_coupling(lambdas[2]))
        backward_states = list(global_minima)
        backward_states[1] = _polarised_minimum(params.with_coupling(lambdas[1]))

        forward = _sweep_from_states(params, lambdas, forward_states, SweepDirection.FORWARD)
        backward = _sweep_from_states(params, lambdas[::-1], backward_states[::-1], SweepDirection.BACKWARD)
        spectrum = fluctuation_service.spectrum_along_hysteresis(params, forward, backward)

        def frequencies(branches):
            return np.sort(np.array([branch.nu for branch in branches]).T, axis=1)

        minimal = frequencies(spectrum.minimal)
        along_forward = frequencies(spectrum.forward)
        along_backward = frequencies(spectrum.backward)
        atol = 1e-9 * params.omega_m
        split = 1e-3 * params.omega_a

        for k in (0, 1, 3):
            assert np.allclose(along_forward[k], minimal[k], atol=atol)
        assert np.max(np.abs(along_forward[2] - minimal[2])) > split
        for k in (0, 2, 3):
            assert np.allclose(along_backward[k], minimal[k], atol=atol)
        assert np.max(np.abs(along_backward[1] - minimal[1])) > split


class TestEntanglementCurve:
    """Test cases for E_N along the coupling axis."""

    def test_thermal_noise_reduces_entanglement(self, weak_damping_params):
        """Test E_N vanishes at lambda = 0, is positive near lambda_s2 and decreases with N_m."""
        lambda_s2 = steadystate_service.lambda_s2(weak_damping_params)
        grid = [0.0, 0.5 * lambda_s2, 0.9 * lambda_s2]
        points = fluctuation_service.entanglement_curve(weak_damping_params, grid, [0.0, 10.0])

        assert len(points) == 6
        cold = [p for p in points if p.n_bath == 0.0]
        hot = [p for p in points if p.n_bath == 10.0]
        assert [p.lambda_coll for p in cold] == pytest.approx(grid)
        assert cold[0].e_n == pytest.approx(0.0, abs=1e-10)
        assert cold[-1].e_n > 0.0
        for c, h in zip(cold, hot):
            assert h.e_n <= c.e_n + 1e-12
            assert len(c.nu) == 3

    def test_empty_bath_list(self, weak_damping_params):
        """Test an empty n_bath list raises DomainError."""
        with pytest.raises(DomainError):
            fluctuation_service.entanglement_curve(weak_damping_params, [0.0], [])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
