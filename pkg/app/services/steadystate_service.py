import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar, root

from app.core.config import settings
from app.core.exceptions import (
    DomainError,
    ModeMismatchError,
    NoBracketError,
    NoConvergenceError,
    NoRootError,
    NoSecondaryMinimumError,
    SimulationError,
)
from app.schemas.landau import (
    CriticalMode,
    ExperimentalEstimate,
    LandauExpansion,
    PhaseAxis,
    PhaseDiagramCell,
    SensitivityRow,
    TransitionOrder,
)
from app.schemas.model import EnergySurface, SteadyState, SystemParams
from app.services.model_service import SQRT_8PI, model_service

logger = logging.getLogger(__name__)

GAMMA_EDGE = 1e-12

# Parameter realisasi eksperimen; yang tidak disebutkan memakai default model
EXPERIMENTAL_PARAMS = {
    "v": 100.0,
    "ng": 1.0,
    "omega_a": 20.0,
    "omega_m": 70.0,
    "gamma_m": 0.7,
    "chi": 1.0,
    "lambda_coll": 0.0,
}
SENSITIVITY_SCAN = {
    "gamma_m": (0.07, 0.7, 7.0),
    "v": (50.0, 100.0, 200.0),
    "ng": (0.0, 1.0, 5.0),
}


class SteadyStateService:
    """
    Service class untuk steady state dan teori Landau.

    Menyelesaikan persamaan lebar, meminimalkan potensial nonequilibrium
    secara global, menghitung koefisien Landau, kopling kritis, orde
    transisi, dan diagram fase.
    """

    def __init__(self):
        """Inisialisasi service dengan default dari settings."""
        self.width_bracket = settings.WIDTH_BRACKET
        self.grid_points = settings.STEADY_GRID_POINTS

    def solve_width(self, gamma: float, params: SystemParams) -> float:
        """
        Lebar steady state σ₀(γ), akar fisis pertama dari residual lebar.

        Args:
            gamma: Polarisasi real, |γ| ≤ 1
            params: Parameter sistem

        Returns:
            float: σ₀(γ)

        Raises:
            DomainError: Jika |γ| > 1
            NoBracketError: Jika residual tidak berganti tanda di bracket
        """
        if not np.isfinite(gamma) or abs(gamma) > 1.0 + GAMMA_EDGE:
            raise DomainError(f"Polarisasi harus |gamma| <= 1, diberikan gamma={gamma}")

        coupling_sq = float(model_service.coupling_factor(gamma, params)) ** 2
        lo, hi = self.width_bracket
        sigmas = np.geomspace(lo, hi, settings.WIDTH_SCAN_POINTS)
        residual = model_service.scaled_width_residual(sigmas, coupling_sq, params)

        crossings = np.flatnonzero(residual >= 0.0)
        if residual[0] >= 0.0 or crossings.size == 0:
            raise NoBracketError(
                f"Residual lebar tidak berganti tanda di [{lo}, {hi}] untuk gamma={gamma}"
            )
        k = int(crossings[0])
        if residual[k] == 0.0:
            return float(sigmas[k])

        return float(brentq(
            model_service.scaled_width_residual,
            sigmas[k - 1],
            sigmas[k],
            args=(coupling_sq, params),
            xtol=1e-15,
        ))

    def solve_width_grid(self, gammas: np.ndarray, params: SystemParams) -> np.ndarray:
        """
        σ₀(γ) untuk banyak γ sekaligus lewat bisection vektor.

        Akar untuk γ ≠ 0 selalu berada di [σ_min, σ₀(0)] karena suku kopling
        hanya menaikkan residual.
        """
        sigma_ref = self.solve_width(0.0, params)
        coupling_sq = np.asarray(model_service.coupling_factor(gammas, params)) ** 2
        lo = np.full(coupling_sq.shape, self.width_bracket[0])
        hi = np.full(coupling_sq.shape, sigma_ref)
        for _ in range(settings.WIDTH_BISECTION_ITERATIONS):
            mid = 0.5 * (lo + hi)
            positive = model_service.scaled_width_residual(mid, coupling_sq, params) >= 0.0
            hi = np.where(positive, mid, hi)
            lo = np.where(positive, lo, mid)
        return 0.5 * (lo + hi)

    def energy_surface(self, params: SystemParams, n_grid: Optional[int] = None) -> EnergySurface:
        """
        Permukaan energi E(γ) = E[γ, σ₀(γ)] pada grid uniform di [−1, 1].

        Raises:
            DomainError: Jika n_grid < 3
            NoBracketError: Propagasi dari solve_width
        """
        n_grid = n_grid or self.grid_points
        if n_grid < 3:
            raise DomainError(f"n_grid minimal 3, diberikan {n_grid}")
        gammas = np.linspace(-1.0, 1.0, n_grid)
        sigmas = self.solve_width_grid(gammas, params)
        energies = model_service.reduced_potential_array(gammas, sigmas, params)
        return EnergySurface(gammas=gammas, energies=energies, sigmas=sigmas)

    def find_steady_state(self, params: SystemParams, n_grid: Optional[int] = None) -> SteadyState:
        """
        Minimum global potensial nonequilibrium.

        Scan grid padat lalu refinement Brent/golden-section terbatas di
        sekitar titik grid terendah. Hasil refinement dipoles dengan brentq
        pada turunan envelope dE/dγ agar γ₀ menjadi titik tetap sampai
        presisi mesin. Untuk χ=0 dipilih γ₀ ≥ 0.

        Args:
            params: Parameter sistem
            n_grid: Jumlah titik grid (default dari settings)

        Returns:
            SteadyState: (α₀, γ₀, σ₀, E₀)
        """
        surface = self.energy_surface(params, n_grid)
        gammas, energies = surface.gammas, surface.energies
        n = gammas.size
        i = int(np.argmin(energies))
        symmetric = params.chi == 0.0
        if symmetric and gammas[i] < 0.0:
            i = n - 1 - i

        lo = gammas[max(i - 1, 0)]
        hi = gammas[min(i + 1, n - 1)]
        if symmetric:
            lo = max(lo, 0.0)

        gamma0 = self._refine_minimum(lo, hi, float(gammas[i]), params)
        gamma0 = self._polish_gamma(gamma0, float(gammas[1] - gammas[0]), params)
        if symmetric:
            gamma0 = abs(gamma0)
            if gamma0 > 0.0 and self._energy_at(gamma0, params) >= self._energy_at(0.0, params):
                gamma0 = 0.0

        sigma0 = self.solve_width(gamma0, params)
        steady = SteadyState(
            alpha0=model_service.membrane_amplitude(gamma0, sigma0, params),
            gamma0=gamma0,
            sigma0=sigma0,
            energy0=model_service.reduced_potential(gamma0, sigma0, params),
        )
        logger.debug(f"Steady state at lambda={params.lambda_coll:.6g}: gamma0={gamma0:.10g}, sigma0={sigma0:.10g}")
        return steady

    def critical_log(self, params: SystemParams) -> float:
        """
        Akar u = log(λ_s2/λ_Ω) dari persamaan implisit kopling kritis.

        Raises:
            NoRootError: Jika tidak ada akar di (0, u_max]
        """
        def residual(u: float) -> float:
            return params.v * u ** 2 * np.exp(-u) - params.omega_r - params.ng * np.sqrt(u) / SQRT_8PI

        grid = np.linspace(0.0, settings.CRITICAL_LOG_MAX, 401)[1:]
        values = np.array([residual(u) for u in grid])
        crossings = np.flatnonzero(values >= 0.0)
        if crossings.size == 0:
            raise NoRootError(
                f"Persamaan kopling kritis tidak punya akar u di (0, {settings.CRITICAL_LOG_MAX}] "
                f"(lattice V={params.v} terlalu dangkal)"
            )
        k = int(crossings[0])
        if values[k] == 0.0:
            return float(grid[k])
        lower = grid[k - 1] if k > 0 else 1e-12
        return float(brentq(residual, lower, grid[k], xtol=1e-15))

    def lambda_s2(self, params: SystemParams) -> float:
        """
        Kopling kritis transisi kontinu λ_s2 = λ_Ω·e^{u}.

        Raises:
            NoRootError: Jika persamaan implisit tidak punya solusi
        """
        return float(params.lambda_omega * np.exp(self.critical_log(params)))

    def landau_coefficients(self, params: SystemParams) -> LandauExpansion:
        """
        Koefisien Landau a₀…a₆ dan turunan implisit lebar di γ=0.

        Returns:
            LandauExpansion: Koefisien closed-form pada kopling params.lambda_coll
        """
        sigma0 = self.solve_width(0.0, params)
        ratio = (params.lambda_coll / self.lambda_s2(params)) ** 2
        _, f2, f3 = model_service.width_energy_derivatives(sigma0, params)
        omega_sigma = model_service.breathing_frequency(sigma0, params)

        omega_a = params.omega_a
        chi = params.chi
        amplitude = omega_a * ratio
        d2 = -8.0 * amplitude * sigma0 / f2
        d3 = 6.0 * chi * d2
        d4 = (
            12.0 * (chi ** 2 - 1.0) * d2
            - 6.0 * (4.0 * sigma0 - 1.0 / sigma0) * d2 ** 2
            - 3.0 * (f3 / f2) * d2 ** 2
        )

        return LandauExpansion(
            a0=float(-0.5 * omega_a + model_service.width_energy(sigma0, params)),
            a2=omega_a * (1.0 - ratio),
            a3=-2.0 * chi * amplitude,
            a4=amplitude * (1.0 - chi ** 2 + sigma0 * d2),
            a5=chi * amplitude * (1.0 + 4.0 * sigma0 * d2),
            a6=(
                amplitude * (0.5 * (1.0 - 4.0 * sigma0 ** 2) * d2 ** 2 - 2.0 * sigma0 * (1.0 - 3.0 * chi ** 2) * d2)
                + f3 * d2 ** 3 / 48.0
            ),
            sigma0=sigma0,
            d2_sigma=d2,
            d3_sigma=d3,
            d4_sigma=d4,
            omega_sigma=omega_sigma,
        )

    def omega_c(self, params: SystemParams) -> float:
        """
        Frekuensi atom kritis Ω_c = ω_σ²/(32ω_R·log(λ_s2/λ_Ω)) secara self-consistent.

        Karena λ_s2 bergantung pada Ω_a lewat λ_Ω, nilai dicari sebagai titik
        tetap Ω_a = Ω_c(Ω_a) dengan iterasi teredam.

        Raises:
            NoConvergenceError: Jika iterasi tidak konvergen
        """
        current = params.omega_a
        damping = settings.OMEGA_C_DAMPING
        for iteration in range(settings.OMEGA_C_MAX_ITER):
            updated = self._omega_c_at(params.with_updates(omega_a=current))
            if abs(updated - current) <= settings.OMEGA_C_REL_TOL * abs(updated):
                logger.debug(f"Omega_c converged after {iteration + 1} iterations: {updated:.10g}")
                return float(updated)
            current = (1.0 - damping) * current + damping * updated
        raise NoConvergenceError(
            f"Iterasi Omega_c tidak konvergen setelah {settings.OMEGA_C_MAX_ITER} iterasi"
        )

    def first_order_minima(self, le: LandauExpansion) -> Tuple[float, float]:
        """
        Minimum polinomial Landau orde enam simetris.

        Returns:
            Tuple (γ₁ = 0, γ₂,₃²)

        Raises:
            DomainError: Jika syarat a4 < 0, a2 > 0, a6 > 0 tidak terpenuhi
            NoSecondaryMinimumError: Jika radikan negatif
        """
        if not (le.a4 < 0.0 and le.a2 > 0.0 and le.a6 > 0.0):
            raise DomainError(
                f"Butuh a4 < 0, a2 > 0, a6 > 0; diberikan a2={le.a2}, a4={le.a4}, a6={le.a6}"
            )
        center = -le.a4 / (3.0 * le.a6)
        radicand = center ** 2 - le.a2 / (3.0 * le.a6)
        if radicand < 0.0:
            if radicand > -1e-12 * center ** 2:
                radicand = 0.0
            else:
                raise NoSecondaryMinimumError(f"Radikan minimum sekunder negatif: {radicand:.6g}")
        return 0.0, float(center + np.sqrt(radicand))

    def lambda_s1(self, params: SystemParams, mode: CriticalMode = CriticalMode.EXACT_NUMERIC) -> float:
        """
        Kopling koeksistensi transisi orde pertama simetris λ_s1.

        Args:
            params: Parameter sistem (χ = 0)
            mode: paper_formula (relasi implisit 13a₂a₆ = 4a₄²) atau exact_numeric

        Raises:
            DomainError: Jika χ ≠ 0
            ModeMismatchError: Jika Ω_a < Ω_c
            NoRootError: Jika relasi implisit tidak punya akar
        """
        if params.chi != 0.0:
            raise DomainError(f"lambda_s1 hanya didefinisikan untuk chi=0, diberikan chi={params.chi}")
        omega_c = self.omega_c(params)
        if params.omega_a < omega_c * (1.0 - 1e-9):
            raise ModeMismatchError(
                f"lambda_s1 butuh Omega_a >= Omega_c, diberikan Omega_a={params.omega_a:.6g}, Omega_c={omega_c:.6g}"
            )
        lambda_s2 = self.lambda_s2(params)

        if mode == CriticalMode.EXACT_NUMERIC:
            return self.coexistence_coupling(params)

        inverse_ratio = omega_c / params.omega_a
        if inverse_ratio >= 1.0 - 1e-12:
            return lambda_s2
        log_ratio = self.critical_log(params)

        def relation(r: float) -> float:
            return (inverse_ratio - r) ** 2 - (13.0 / 24.0) * (1.0 - r) * (
                12.0 * inverse_ratio + (1.0 / log_ratio - 4.0) * r
            )

        if relation(inverse_ratio) * relation(1.0) > 0.0:
            raise NoRootError("Relasi implisit lambda_s1 tidak punya akar di (Omega_c/Omega_a, 1]")
        r = brentq(relation, inverse_ratio, 1.0, xtol=1e-15)
        return float(lambda_s2 * np.sqrt(r))

    def lambda_a1(self, params: SystemParams, mode: CriticalMode = CriticalMode.EXACT_NUMERIC) -> float:
        """
        Kopling koeksistensi transisi orde pertama asimetris λ_a1.

        Mode paper_formula menyelesaikan 4a₂a₄ = a₃² pada truncation kuartik,
        yaitu (1−r)(1−χ²−(Ω_a/Ω_c)r) = χ²r, valid untuk Ω_a < (1−χ²)Ω_c.

        Raises:
            DomainError: Jika χ = 0
            ModeMismatchError: Mode paper_formula di luar jendela validitas
            NoRootError: Jika tidak ada akar r ∈ (0, 1]
        """
        if params.chi == 0.0:
            raise DomainError("lambda_a1 butuh chi != 0")
        if mode == CriticalMode.EXACT_NUMERIC:
            return self.coexistence_coupling(params)

        omega_c = self.omega_c(params)
        window = (1.0 - params.chi ** 2) * omega_c
        if params.omega_a >= window:
            raise ModeMismatchError(
                f"Mode paper_formula butuh Omega_a < (1-chi^2) Omega_c = {window:.6g}, diberikan {params.omega_a:.6g}"
            )
        q = params.omega_a / omega_c
        b = 1.0 - params.chi ** 2
        r = 2.0 * b / ((1.0 + q) + np.sqrt((1.0 + q) ** 2 - 4.0 * q * b))
        if not 0.0 < r <= 1.0:
            raise NoRootError(f"Akar r={r:.6g} untuk lambda_a1 di luar (0, 1]")
        return float(self.lambda_s2(params) * np.sqrt(r))

    def coexistence_coupling(self, params: SystemParams) -> float:
        """
        λ di mana minimum global E(γ) pertama kali pindah dari γ=0.

        Bisection pada λ dengan minimisasi dalam; memakai permukaan energi
        penuh, bukan truncation Landau. Hasil sama dengan λ_s2 bila onset
        kontinu.
        """
        lambda_s2 = self.lambda_s2(params)
        reference = self._energy_at(0.0, params)
        tolerance = settings.COEXISTENCE_ENERGY_TOL * max(1.0, abs(reference))

        def broken(lam: float) -> bool:
            return self.find_steady_state(params.with_coupling(lam)).energy0 < reference - tolerance

        if not broken(lambda_s2):
            return lambda_s2

        lo = 0.5 * lambda_s2
        for _ in range(60):
            if not broken(lo):
                break
            lo *= 0.5
        else:
            raise NoRootError("Tidak menemukan kopling bawah dengan minimum global di gamma=0")

        hi = lambda_s2
        while hi - lo > settings.COUPLING_REL_TOL * hi:
            mid = 0.5 * (lo + hi)
            if broken(mid):
                hi = mid
            else:
                lo = mid
        result = 0.5 * (lo + hi)
        logger.info(f"Coexistence coupling {result:.10g} (lambda_s2={lambda_s2:.10g})")
        return float(result)

    def classify_order(self, params: SystemParams) -> TransitionOrder:
        """
        Orde transisi: asimetris jika χ ≠ 0, selain itu dari tanda a4 di λ_s2.
        """
        if params.chi != 0.0:
            return TransitionOrder.FIRST_ASYMMETRIC
        at_critical = self.landau_coefficients(params.with_coupling(self.lambda_s2(params)))
        if at_critical.a4 >= 0.0:
            return TransitionOrder.SECOND
        return TransitionOrder.FIRST_SYMMETRIC

    def critical_coupling(
        self, params: SystemParams, mode: CriticalMode = CriticalMode.EXACT_NUMERIC
    ) -> Tuple[TransitionOrder, float]:
        """
        Orde transisi beserta kopling kritis yang relevan.

        Jika mode paper_formula di luar jendela validitasnya, dipakai
        exact_numeric.
        """
        order = self.classify_order(params)
        if order == TransitionOrder.SECOND:
            return order, self.lambda_s2(params)
        compute = self.lambda_s1 if order == TransitionOrder.FIRST_SYMMETRIC else self.lambda_a1
        try:
            return order, compute(params, mode)
        except ModeMismatchError as e:
            logger.warning(f"{e}; falling back to exact_numeric")
            return order, compute(params, CriticalMode.EXACT_NUMERIC)

    def phase_diagram(
        self,
        params: SystemParams,
        axis: PhaseAxis,
        scan_range: Tuple[float, float],
        n: int,
        omega_a_range: Tuple[float, float],
        m: int,
        mode: CriticalMode = CriticalMode.EXACT_NUMERIC,
        max_workers: int = 1,
    ) -> List[PhaseDiagramCell]:
        """
        Diagram fase n×m pada bidang (V atau Ng, Ω_a).

        Sel independen; urutan hasil scan-major (indeks sel), tidak
        bergantung pada jumlah worker.

        Raises:
            DomainError: Jika n atau m < 2
        """
        if n < 2 or m < 2:
            raise DomainError(f"Diagram fase butuh n, m >= 2, diberikan n={n}, m={m}")
        field = "v" if axis == PhaseAxis.V else "ng"
        tasks = [
            (params, field, float(value), float(omega_a), mode)
            for value in np.linspace(scan_range[0], scan_range[1], n)
            for omega_a in np.linspace(omega_a_range[0], omega_a_range[1], m)
        ]
        logger.info(f"Phase diagram: {len(tasks)} cells over {axis.value} x Omega_a with {max_workers} worker(s)")
        if max_workers > 1:
            with ProcessPoolExecutor(max_workers=max_workers) as executor:
                return list(executor.map(_phase_cell, tasks))
        return [_phase_cell(task) for task in tasks]

    def backward_jump_landau(self, params: SystemParams) -> float:
        """
        Lompatan mundur dari kondisi Landau: 4a₂a₆ = a₄² (χ=0) atau 32a₂a₄ = 9a₃² (χ≠0).

        Raises:
            NoRootError: Jika kondisi tidak terpenuhi di bawah λ_s2
        """
        lambda_s2 = self.lambda_s2(params)

        def condition(lam: float) -> float:
            le = self.landau_coefficients(params.with_coupling(lam))
            if params.chi == 0.0:
                return 4.0 * le.a2 * le.a6 - le.a4 ** 2
            return 32.0 * le.a2 * le.a4 - 9.0 * le.a3 ** 2

        previous = lambda_s2
        previous_value = condition(previous)
        for k in range(1, 400):
            lam = lambda_s2 * (1.0 - k / 400.0)
            value = condition(lam)
            if value >= 0.0 > previous_value:
                return float(brentq(condition, lam, previous, xtol=1e-12 * lambda_s2))
            previous, previous_value = lam, value
        raise NoRootError("Kondisi lompatan mundur Landau tidak punya akar di bawah lambda_s2")

    def spinodal_coupling(self, params: SystemParams, n_grid: Optional[int] = None) -> float:
        """
        λ terkecil di mana E(γ) punya minimum lokal di γ ≠ 0 (spinodal eksak).
        """
        lambda_s2 = self.lambda_s2(params)

        def has_secondary(lam: float) -> bool:
            return self._has_nonzero_local_minimum(params.with_coupling(lam), n_grid)

        if not has_secondary(lambda_s2):
            return lambda_s2
        lo = 0.5 * lambda_s2
        for _ in range(60):
            if not has_secondary(lo):
                break
            lo *= 0.5
        else:
            raise NoRootError("Tidak menemukan kopling tanpa minimum sekunder")
        hi = lambda_s2
        while hi - lo > 1e-7 * hi:
            mid = 0.5 * (lo + hi)
            if has_secondary(mid):
                hi = mid
            else:
                lo = mid
        return float(0.5 * (lo + hi))

    def stationary_point(
        self, gamma_guess: float, sigma_guess: float, params: SystemParams
    ) -> Optional[Tuple[float, float, bool]]:
        """
        Titik stasioner E[γ, σ] terdekat dari tebakan (Newton/hybrid).

        Solusi diterima berdasarkan residual gradien, bukan flag success dari
        hybr: tebakan yang sudah tepat di titik stasioner sering dilaporkan
        "not making good progress".

        Returns:
            Tuple (γ, σ, is_minimum) atau None jika residual gradien besar
        """
        def gradient(x: np.ndarray) -> np.ndarray:
            return self._reduced_gradient(float(x[0]), float(x[1]), params)

        guess = np.array([np.clip(gamma_guess, -1.0 + 1e-9, 1.0 - 1e-9), sigma_guess])
        try:
            solution = root(gradient, guess, method="hybr", options={"xtol": 1e-13})
        except (ValueError, FloatingPointError):
            return None
        if not np.all(np.isfinite(solution.x)):
            return None
        gamma, sigma = float(solution.x[0]), float(solution.x[1])
        if abs(gamma) >= 1.0 or sigma <= 0.0:
            return None
        residual = float(np.max(np.abs(gradient(solution.x))))
        if residual > settings.STATIONARY_GRADIENT_TOL * self._gradient_scale(params):
            logger.debug(f"Stationary point rejected: gradient residual {residual:.3g} ({solution.message})")
            return None

        step = 1e-6
        hessian = np.empty((2, 2))
        for j in range(2):
            delta = np.zeros(2)
            delta[j] = step
            hessian[:, j] = (gradient(solution.x + delta) - gradient(solution.x - delta)) / (2.0 * step)
        hessian = 0.5 * (hessian + hessian.T)
        is_minimum = bool(np.all(np.linalg.eigvalsh(hessian) > 0.0))
        return gamma, sigma, is_minimum

    def _reduced_gradient(self, gamma: float, sigma: float, params: SystemParams) -> np.ndarray:
        """Gradien (∂E/∂γ, ∂E/∂σ) dari potensial tereduksi."""
        if abs(gamma) >= 1.0 or sigma <= 0.0:
            return np.array([1e6, 1e6])
        root_term = np.sqrt(1.0 - gamma ** 2)
        c = params.chi * gamma ** 2 + gamma * root_term
        dc = 2.0 * params.chi * gamma + root_term - gamma ** 2 / root_term
        w = np.exp(-2.0 * sigma ** 2)
        k = params.nonequilibrium_coupling
        f1, _, _ = model_service.width_energy_derivatives(sigma, params)
        return np.array([
            2.0 * params.omega_a * gamma - 2.0 * k * c * dc * w,
            f1 + 4.0 * k * c ** 2 * sigma * w,
        ])

    def _gradient_scale(self, params: SystemParams) -> float:
        """Skala energi untuk toleransi gradien relatif."""
        return 1.0 + params.omega_a + params.v + abs(params.nonequilibrium_coupling)

    def _has_nonzero_local_minimum(self, params: SystemParams, n_grid: Optional[int]) -> bool:
        """Cek minimum lokal interior grid yang tidak berada di sekitar γ=0."""
        surface = self.energy_surface(params, n_grid)
        energies = surface.energies
        spacing = surface.gammas[1] - surface.gammas[0]
        interior = (energies[1:-1] < energies[:-2]) & (energies[1:-1] <= energies[2:])
        candidates = surface.gammas[1:-1][interior]
        return bool(np.any(np.abs(candidates) > 1.5 * spacing))

    def _energy_at(self, gamma: float, params: SystemParams) -> float:
        """E(γ) dengan σ₀(γ) yang diselesaikan ulang."""
        return model_service.reduced_potential(gamma, self.solve_width(gamma, params), params)

    def _refine_minimum(self, lo: float, hi: float, grid_gamma: float, params: SystemParams) -> float:
        """Refinement bounded di [lo, hi]; kembali ke titik grid jika tidak lebih baik."""
        if hi <= lo:
            return grid_gamma
        result = minimize_scalar(
            lambda g: self._energy_at(float(g), params),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": settings.STEADY_REFINE_TOL},
        )
        if result.fun <= self._energy_at(grid_gamma, params):
            return float(result.x)
        return grid_gamma

    def _envelope_slope(self, gamma: float, params: SystemParams) -> float:
        """dE/dγ sepanjang σ = σ₀(γ); suku ∂E/∂σ hilang di sana."""
        return float(self._reduced_gradient(gamma, self.solve_width(gamma, params), params)[0])

    def _polish_gamma(self, gamma0: float, spacing: float, params: SystemParams) -> float:
        """
        Akar dE/dγ di sekitar γ₀ hasil refinement.

        Bracket dilebarkan dari 1e-7 sampai satu jarak grid; jika tidak ada
        pergantian tanda (minimum di tepi), γ₀ dikembalikan apa adanya.
        """
        edge = 1.0 - GAMMA_EDGE
        step = 1e-7
        while step <= spacing:
            lo = max(gamma0 - step, -edge)
            hi = min(gamma0 + step, edge)
            slope_lo = self._envelope_slope(lo, params)
            slope_hi = self._envelope_slope(hi, params)
            if slope_lo == 0.0:
                return float(lo)
            if slope_hi == 0.0:
                return float(hi)
            if slope_lo < 0.0 < slope_hi:
                return float(brentq(self._envelope_slope, lo, hi, args=(params,), xtol=1e-15))
            step *= 10.0
        logger.debug(f"No sign change of dE/dgamma around gamma0={gamma0:.10g}, keeping refined value")
        return gamma0

    def experimental_estimate(
        self,
        overrides: Optional[Dict[str, float]] = None,
        mode: CriticalMode = CriticalMode.EXACT_NUMERIC,
        with_scan: bool = True,
    ) -> ExperimentalEstimate:
        """
        Kopling kritis untuk parameter eksperimen (Ω_m=70, Ω_a=20, χ=1).

        Parameter yang tidak disebutkan (Γ_m, V, Ng) diambil dari default
        model; scan sensitivitas memvariasikan masing-masing secara
        terpisah.

        Args:
            overrides: Nilai pengganti untuk field SystemParams
            mode: Mode perhitungan λ_a1
            with_scan: Jalankan scan sensitivitas

        Returns:
            ExperimentalEstimate: Orde, kopling kritis, dan baris scan
        """
        params = SystemParams(**{**EXPERIMENTAL_PARAMS, **(overrides or {})})
        order, lambda_crit = self.critical_coupling(params, mode)
        logger.info(f"Experimental estimate: {order.value} transition at lambda={lambda_crit:.6g}")

        rows = []
        if with_scan:
            for field, values in SENSITIVITY_SCAN.items():
                for value in values:
                    try:
                        row_order, row_lambda = self.critical_coupling(params.with_updates(**{field: value}), mode)
                    except SimulationError as e:
                        logger.warning(f"Sensitivity point {field}={value:g} failed: {e}")
                        row_order, row_lambda = TransitionOrder.NONE, float("nan")
                    rows.append(SensitivityRow(field=field, value=value, order=row_order, lambda_crit=row_lambda))
        return ExperimentalEstimate(
            omega_a=params.omega_a,
            omega_m=params.omega_m,
            chi=params.chi,
            order=order,
            lambda_crit=lambda_crit,
            sensitivity=rows,
        )

    def _omega_c_at(self, params: SystemParams) -> float:
        """Ω_c closed-form pada Ω_a yang diberikan."""
        sigma0 = self.solve_width(0.0, params)
        omega_sigma = model_service.breathing_frequency(sigma0, params)
        return omega_sigma ** 2 / (32.0 * params.omega_r * self.critical_log(params))


def _phase_cell(task: Tuple[SystemParams, str, float, float, CriticalMode]) -> PhaseDiagramCell:
    """Klasifikasi satu sel diagram fase (fungsi level modul agar bisa di-pickle)."""
    params, field, value, omega_a, mode = task
    try:
        cell_params = params.with_updates(**{field: value, "omega_a": omega_a})
        order, lambda_crit = steadystate_service.critical_coupling(cell_params, mode)
        omega_c = steadystate_service.omega_c(cell_params)
        return PhaseDiagramCell(omega_a=omega_a, scan_value=value, order=order, lambda_crit=lambda_crit, omega_c=omega_c)
    except (SimulationError, ValueError) as e:
        logger.warning(f"Phase diagram cell ({field}={value:.6g}, omega_a={omega_a:.6g}) failed: {e}")
        return PhaseDiagramCell(omega_a=omega_a, scan_value=value, order=TransitionOrder.NONE, lambda_crit=float("nan"))


steadystate_service = SteadyStateService()
