import logging
from typing import Tuple, Union

import numpy as np

from app.core.exceptions import DomainError, NonPositiveRadicandError
from app.schemas.model import MeanFieldState, SteadyState, SystemParams

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

SQRT_8PI = float(np.sqrt(8.0 * np.pi))
SQRT_2PI = float(np.sqrt(2.0 * np.pi))
GAMMA_SLACK = 1e-12


class ModelService:
    """
    Service class untuk ekspresi closed-form model hibrida.

    Berisi potensial nonequilibrium (penuh dan tereduksi), amplitudo
    membran steady state, residual lebar, frekuensi breathing, dan
    kedalaman lattice efektif. Semua method murni (tanpa state),
    aman dipanggil paralel dari worker mana pun.
    """

    def coupling_factor(self, gamma: ArrayLike, params: SystemParams) -> ArrayLike:
        """
        Faktor kopling c(γ) = χγ² + γ√(1−γ²).

        Args:
            gamma: Polarisasi real (skalar atau array), |γ| ≤ 1
            params: Parameter sistem

        Returns:
            Nilai c(γ) dengan bentuk yang sama dengan input
        """
        gamma = np.clip(gamma, -1.0, 1.0)
        return params.chi * gamma ** 2 + gamma * np.sqrt(1.0 - gamma ** 2)

    def single_particle_energy(self, sigma: ArrayLike, params: SystemParams) -> ArrayLike:
        """Energi kinetik + lattice per atom: ω_R/(2σ²) − (V/2)e^{−σ²}."""
        return params.omega_r / (2.0 * sigma ** 2) - 0.5 * params.v * np.exp(-sigma ** 2)

    def interaction_energy(self, sigma: ArrayLike, params: SystemParams) -> ArrayLike:
        """Energi kontak Ng/(√(8π)σ)."""
        return params.ng / (SQRT_8PI * sigma)

    def width_energy(self, sigma: ArrayLike, params: SystemParams) -> ArrayLike:
        """Bagian E yang tidak bergantung pada γ (fungsi f(σ))."""
        return self.single_particle_energy(sigma, params) + self.interaction_energy(sigma, params)

    def width_energy_derivatives(self, sigma: float, params: SystemParams) -> Tuple[float, float, float]:
        """
        Turunan pertama sampai ketiga f(σ) terhadap σ.

        Returns:
            Tuple (f′, f″, f‴)
        """
        w = params.omega_r
        e = np.exp(-sigma ** 2)
        f1 = -w / sigma ** 3 + params.v * sigma * e - params.ng / (SQRT_8PI * sigma ** 2)
        f2 = 3.0 * w / sigma ** 4 + params.v * (1.0 - 2.0 * sigma ** 2) * e + params.ng / (SQRT_2PI * sigma ** 3)
        f3 = (
            -12.0 * w / sigma ** 5
            + params.v * (4.0 * sigma ** 3 - 6.0 * sigma) * e
            - 3.0 * params.ng / (SQRT_2PI * sigma ** 4)
        )
        return float(f1), float(f2), float(f3)

    def reduced_potential_array(self, gamma: ArrayLike, sigma: ArrayLike, params: SystemParams) -> ArrayLike:
        """
        Versi vektor dari reduced_potential, tanpa validasi domain.

        Dipakai untuk scan grid dan bisection vektor.
        """
        c = self.coupling_factor(gamma, params)
        detuning = 0.5 * params.omega_a * (2.0 * np.asarray(gamma) ** 2 - 1.0)
        coupling = params.nonequilibrium_coupling * c ** 2 * np.exp(-2.0 * sigma ** 2)
        return detuning + self.width_energy(sigma, params) - coupling

    def reduced_potential(self, gamma: float, sigma: float, params: SystemParams) -> float:
        """
        Potensial nonequilibrium tereduksi E[γ, σ].

        Args:
            gamma: Polarisasi real, |γ| ≤ 1
            sigma: Lebar kondensat, σ > 0
            params: Parameter sistem

        Returns:
            float: E[γ, σ] dalam satuan ω_R

        Raises:
            DomainError: Jika |γ| > 1 atau σ ≤ 0
        """
        self._validate(gamma, sigma)
        return float(self.reduced_potential_array(gamma, sigma, params))

    def membrane_amplitude(self, gamma: float, sigma: float, params: SystemParams) -> complex:
        """
        Amplitudo membran steady state α₀ = √Nλ·c(γ)·e^{−σ²}/(Ω_m − iΓ_m).

        Raises:
            DomainError: Jika |γ| > 1 atau σ ≤ 0
        """
        self._validate(gamma, sigma)
        c = float(self.coupling_factor(gamma, params))
        return complex(params.lambda_coll * c * np.exp(-sigma ** 2) / (params.omega_m - 1j * params.gamma_m))

    def full_potential(self, state: MeanFieldState, params: SystemParams) -> float:
        """
        Potensial efektif penuh E(α, γ₋, γ₊, σ).

        Suku atom tunggal berbobot norm n = |γ₋|²+|γ₊|² dan suku kontak
        berbobot n², sehingga gradien konsisten dengan persamaan gerak
        untuk state yang tidak ternormalisasi sekalipun.
        """
        n, overlap, e = self._state_moments(state, params)
        alpha = state.alpha
        return float(
            params.omega_m * abs(alpha) ** 2
            + 0.5 * params.omega_a * (abs(state.gamma_plus) ** 2 - abs(state.gamma_minus) ** 2)
            + n * self.single_particle_energy(state.sigma, params)
            + n ** 2 * self.interaction_energy(state.sigma, params)
            - 2.0 * params.lambda_coll * alpha.real * overlap * e
        )

    def potential_gradient(self, state: MeanFieldState, params: SystemParams) -> Tuple[complex, complex, complex, float]:
        """
        Gradien closed-form dari full_potential.

        Returns:
            Tuple (∂E/∂α*, ∂E/∂γ₋*, ∂E/∂γ₊*, ∂E/∂σ)
        """
        return self.gradient_components(
            state.alpha, state.gamma_minus, state.gamma_plus, state.sigma, params
        )

    def gradient_components(
        self, alpha: complex, gamma_minus: complex, gamma_plus: complex, sigma: float, params: SystemParams
    ) -> Tuple[complex, complex, complex, float]:
        """Gradien dengan argumen skalar (jalur cepat untuk integrator)."""
        lam = params.lambda_coll
        n = abs(gamma_minus) ** 2 + abs(gamma_plus) ** 2
        overlap = params.chi * abs(gamma_plus) ** 2 + (gamma_plus.conjugate() * gamma_minus).real
        e = np.exp(-sigma ** 2)
        drive = lam * alpha.real * e
        diagonal = self.single_particle_energy(sigma, params) + 2.0 * n * self.interaction_energy(sigma, params)

        d_alpha = params.omega_m * alpha - lam * overlap * e
        d_minus = (diagonal - 0.5 * params.omega_a) * gamma_minus - drive * gamma_plus
        d_plus = (diagonal + 0.5 * params.omega_a) * gamma_plus - 2.0 * drive * (params.chi * gamma_plus + 0.5 * gamma_minus)
        d_sigma = (
            n * (-params.omega_r / sigma ** 3 + params.v * sigma * e)
            - n ** 2 * params.ng / (SQRT_8PI * sigma ** 2)
            + 4.0 * sigma * drive * overlap
        )
        return complex(d_alpha), complex(d_minus), complex(d_plus), float(d_sigma)

    def width_residual(self, sigma: float, gamma: float, params: SystemParams) -> float:
        """
        Fungsi bantu F[σ, γ] = ∂E/∂σ.

        Akar fisis σ₀(γ) adalah titik di mana F naik dari negatif ke positif.

        Raises:
            DomainError: Jika |γ| > 1 atau σ ≤ 0
        """
        self._validate(gamma, sigma)
        c = float(self.coupling_factor(gamma, params))
        f1, _, _ = self.width_energy_derivatives(sigma, params)
        return float(f1 + 4.0 * params.nonequilibrium_coupling * c ** 2 * sigma * np.exp(-2.0 * sigma ** 2))

    def scaled_width_residual(self, sigma: ArrayLike, coupling_sq: ArrayLike, params: SystemParams) -> ArrayLike:
        """
        Residual lebar dikali σ³ (tanpa singularitas di σ → 0).

        Args:
            sigma: Lebar (skalar atau array)
            coupling_sq: c(γ)² (skalar atau array, broadcast dengan sigma)
            params: Parameter sistem
        """
        s4 = sigma ** 4
        return (
            params.v * s4 * np.exp(-sigma ** 2)
            + 4.0 * params.nonequilibrium_coupling * coupling_sq * s4 * np.exp(-2.0 * sigma ** 2)
            - params.omega_r
            - params.ng * sigma / SQRT_8PI
        )

    def breathing_frequency(self, sigma0: float, params: SystemParams) -> float:
        """
        Frekuensi mode breathing ω_σ = √(4ω_R f″(σ₀)).

        Raises:
            DomainError: Jika σ₀ ≤ 0
            NonPositiveRadicandError: Jika radikan ≤ 0 (lebar tidak stabil)
        """
        if sigma0 <= 0:
            raise DomainError(f"Lebar harus positif, diberikan sigma0={sigma0}")
        _, f2, _ = self.width_energy_derivatives(sigma0, params)
        radicand = 4.0 * params.omega_r * f2
        if radicand <= 0:
            raise NonPositiveRadicandError(
                f"Radikan frekuensi breathing tidak positif ({radicand:.6g}) pada sigma0={sigma0:.6g}"
            )
        return float(np.sqrt(radicand))

    def effective_lattice_depth(self, steady: SteadyState, params: SystemParams) -> float:
        """V_eff = V + 4Ω_a(λ/λ_Ω)²γ₀²(1−γ₀²)e^{−σ₀²}."""
        g2 = steady.gamma0 ** 2
        return float(
            params.v
            + 4.0 * params.nonequilibrium_coupling * g2 * (1.0 - g2) * np.exp(-steady.sigma0 ** 2)
        )

    def displacement_mode_frequency(self, sigma0: float, params: SystemParams) -> float:
        """Frekuensi mode displacement ω_ζ = √(4ω_R V)·e^{−σ₀²}."""
        if sigma0 <= 0:
            raise DomainError(f"Lebar harus positif, diberikan sigma0={sigma0}")
        return float(np.sqrt(4.0 * params.omega_r * params.v) * np.exp(-sigma0 ** 2))

    def _state_moments(self, state: MeanFieldState, params: SystemParams) -> Tuple[float, float, float]:
        """Norm, overlap P = χ|γ₊|² + Re(γ₊*γ₋) dan e^{−σ²} dari sebuah state."""
        n = abs(state.gamma_minus) ** 2 + abs(state.gamma_plus) ** 2
        overlap = params.chi * abs(state.gamma_plus) ** 2 + (state.gamma_plus.conjugate() * state.gamma_minus).real
        return n, overlap, float(np.exp(-state.sigma ** 2))

    def _validate(self, gamma: float, sigma: float) -> None:
        """Cek domain |γ| ≤ 1 dan σ > 0."""
        if not np.isfinite(gamma) or abs(gamma) > 1.0 + GAMMA_SLACK:
            raise DomainError(f"Polarisasi harus |gamma| <= 1, diberikan gamma={gamma}")
        if not np.isfinite(sigma) or sigma <= 0:
            raise DomainError(f"Lebar harus positif, diberikan sigma={sigma}")


model_service = ModelService()
