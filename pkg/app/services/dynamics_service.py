import logging
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from app.core.config import settings
from app.core.exceptions import (
    DomainError,
    NoConvergenceError,
    NonPositiveRadicandError,
    SimulationError,
    StepTooLargeError,
)
from app.schemas.dynamics import JumpPoints, SweepDirection, SweepResult
from app.schemas.landau import TransitionOrder
from app.schemas.model import MeanFieldState, SystemParams
from app.services.model_service import model_service
from app.services.steadystate_service import steadystate_service

logger = logging.getLogger(__name__)

StateDerivative = Tuple[complex, complex, complex, float, float]


class DynamicsService:
    """
    Service class untuk dinamika mean-field persamaan kumulan.

    Mengintegrasikan persamaan gerak (α, γ₋, γ₊, σ, σ̇), merelaksasi ke
    titik tetap, menjalankan sweep kopling adiabatik, dan mendeteksi
    titik lompatan histeresis.
    """

    def eom_rhs(self, state: MeanFieldState, params: SystemParams, co_rotating: bool = True) -> StateDerivative:
        """
        Ruas kanan persamaan gerak.

        α̇ = −i∂E/∂α* − Γ_mα, γ̇_τ = −i(∂E/∂γ_τ* − μγ_τ), σ̈ = −4ω_R ∂E/∂σ.
        Dengan co_rotating=True potensial kimia kondensat
        μ = Re Σγ_τ*∂E/∂γ_τ* / Σ|γ_τ|² dikurangkan (pilihan gauge U(1)
        global), sehingga steady state menjadi titik tetap sejati.

        Args:
            state: State mean-field
            params: Parameter sistem
            co_rotating: Pakai frame yang ikut berotasi dengan μ

        Returns:
            Tuple (α̇, γ̇₋, γ̇₊, σ̇, σ̈)

        Raises:
            DomainError: Jika state tidak valid (norm nol)
        """
        if state.norm <= 0.0:
            raise DomainError("State dengan norm nol tidak valid")
        derivative = self._rhs_vector(state.to_vector(), params, co_rotating)
        return (
            complex(derivative[0]),
            complex(derivative[1]),
            complex(derivative[2]),
            float(derivative[3].real),
            float(derivative[4].real),
        )

    def integrate(
        self,
        state: MeanFieldState,
        params: SystemParams,
        t_final: float,
        dt: Optional[float] = None,
        co_rotating: bool = True,
    ) -> MeanFieldState:
        """
        Integrasi RK4 langkah tetap sampai t_final.

        Args:
            state: State awal
            params: Parameter sistem
            t_final: Waktu akhir (≥ 0)
            dt: Langkah waktu, default 0.01/max(Ω_m, Ω_a, ω_σ)
            co_rotating: Frame persamaan gerak

        Returns:
            MeanFieldState: State di t_final

        Raises:
            DomainError: Jika dt melanggar batas stabilitas
            StepTooLargeError: Jika norm drift > batas
        """
        if t_final < 0:
            raise DomainError(f"t_final harus >= 0, diberikan {t_final}")
        fastest = self._fastest_frequency(state.sigma, params)
        dt = dt if dt is not None else settings.RK4_DT_FACTOR / fastest
        if dt <= 0 or dt >= settings.RK4_DT_LIMIT_FACTOR / fastest:
            raise DomainError(
                f"dt={dt:.3g} harus < {settings.RK4_DT_LIMIT_FACTOR}/max(Omega_m, Omega_a, omega_sigma) = "
                f"{settings.RK4_DT_LIMIT_FACTOR / fastest:.3g}"
            )

        n_steps = int(np.ceil(t_final / dt)) if t_final > 0 else 0
        h = t_final / n_steps if n_steps else 0.0
        y = state.to_vector()
        initial_norm = state.norm
        for _ in range(n_steps):
            k1 = self._rhs_vector(y, params, co_rotating)
            k2 = self._rhs_vector(y + 0.5 * h * k1, params, co_rotating)
            k3 = self._rhs_vector(y + 0.5 * h * k2, params, co_rotating)
            k4 = self._rhs_vector(y + h * k3, params, co_rotating)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        final = MeanFieldState.from_vector(y)
        drift = abs(final.norm - initial_norm)
        if drift > settings.NORM_DRIFT_LIMIT:
            raise StepTooLargeError(f"Norm drift {drift:.3g} melebihi batas {settings.NORM_DRIFT_LIMIT}")
        logger.debug(f"Integrated {n_steps} RK4 steps (dt={h:.3g}), norm drift {drift:.3g}")
        return final

    def relax(self, state: MeanFieldState, params: SystemParams) -> MeanFieldState:
        """
        Relaksasi ke titik tetap yang stabil.

        Integrasi DOP853 per chunk. Setelah setiap chunk, persamaan stasioner
        potensial tereduksi diselesaikan dari (γ, σ) saat ini; hasilnya
        diterima jika merupakan minimum lokal dan trajektori sudah berada
        di sekitarnya. Konvergensi langsung juga diterima bila laju
        perubahan maksimum < toleransi.

        Raises:
            DomainError: Jika Γ_m ≤ 0
            NoConvergenceError: Jika t_max = 10⁴/Γ_m terlampaui (membawa state terakhir)
        """
        if params.gamma_m <= 0:
            raise DomainError("relax butuh gamma_m > 0")
        t_max = settings.RELAX_T_MAX_FACTOR / params.gamma_m
        chunk = settings.RELAX_CHUNK_FACTOR / max(params.omega_m, params.omega_a, params.gamma_m)
        y = state.to_vector()
        elapsed = 0.0

        while True:
            current = MeanFieldState.from_vector(y)
            polished = self._polish(current, params)
            if polished is not None:
                logger.debug(f"Relaxation polished at t={elapsed:.4g}")
                return polished
            rate = np.max(np.abs(self._rhs_vector(y, params, True)))
            if rate < settings.RELAX_TOLERANCE:
                return current
            if elapsed >= t_max:
                raise NoConvergenceError(
                    f"Relaksasi tidak konvergen sampai t_max={t_max:.4g} (laju {rate:.3g})",
                    state=current,
                )
            solution = solve_ivp(
                lambda t, v: self._rhs_vector(v, params, True),
                (0.0, chunk),
                y,
                method="DOP853",
                rtol=settings.RELAX_RTOL,
                atol=settings.RELAX_ATOL,
            )
            if not solution.success:
                raise NoConvergenceError(f"Integrator gagal: {solution.message}", state=current)
            y = solution.y[:, -1]
            elapsed += chunk

    def adiabatic_sweep(
        self,
        params: SystemParams,
        lambda_lo: float,
        lambda_hi: float,
        n_steps: int,
        direction: SweepDirection,
    ) -> SweepResult:
        """
        Sweep kopling adiabatik maju atau mundur.

        Tiap langkah: titik tetap sebelumnya digeser 1e-6 di γ₊, lalu
        direlaksasi. Sweep maju dimulai dari γ₊ = 0; sweep mundur dari
        minimum global di λ_hi. Titik yang tidak konvergen dicatat dengan
        flag dan sweep berlanjut.

        Raises:
            DomainError: Jika n_steps < 10 atau lambda_lo >= lambda_hi
        """
        if n_steps < 10:
            raise DomainError(f"n_steps minimal 10, diberikan {n_steps}")
        if not lambda_lo < lambda_hi:
            raise DomainError(f"Butuh lambda_lo < lambda_hi, diberikan {lambda_lo}, {lambda_hi}")

        lambdas = np.linspace(lambda_lo, lambda_hi, n_steps)
        if direction == SweepDirection.BACKWARD:
            lambdas = lambdas[::-1]
            seed = steadystate_service.find_steady_state(params.with_coupling(lambdas[0])).to_mean_field_state()
        else:
            sigma = steadystate_service.solve_width(0.0, params)
            seed = MeanFieldState(alpha=0j, gamma_minus=1 + 0j, gamma_plus=0j, sigma=sigma, sigma_dot=0.0)

        gamma_inf, alpha_inf, sigma_inf, converged, states = [], [], [], [], []
        for lam in lambdas:
            point_params = params.with_coupling(float(lam))
            try:
                final = self.relax(self._perturb(seed), point_params)
                ok = True
            except NoConvergenceError as e:
                logger.warning(f"Sweep point lambda={lam:.6g} not converged: {e}")
                final = e.state if e.state is not None else seed
                ok = False
            gamma_inf.append(float(min(1.0, abs(final.gamma_plus) / np.sqrt(final.norm))))
            alpha_inf.append(final.alpha)
            sigma_inf.append(final.sigma)
            converged.append(ok)
            states.append(final)
            seed = final

        logger.info(
            f"{direction.value} sweep over [{lambda_lo:.6g}, {lambda_hi:.6g}] done, "
            f"{sum(not c for c in converged)} unconverged point(s)"
        )
        return SweepResult(
            params=params,
            direction=direction,
            lambdas=[float(lam) for lam in lambdas],
            gamma_inf=gamma_inf,
            alpha_inf=alpha_inf,
            sigma_inf=sigma_inf,
            converged=converged,
            states=states,
        )

    def detect_jumps(
        self,
        forward: SweepResult,
        backward: SweepResult,
        threshold: Optional[float] = None,
        with_references: bool = True,
    ) -> JumpPoints:
        """
        Titik lompatan λ_F (sweep maju) dan λ_B (sweep mundur).

        λ yang dilaporkan adalah titik pertama setelah |Δγ∞| > threshold.
        Tanpa lompatan, atau bila kedua cabang berimpit (onset kontinu
        yang curam di grid kasar), λ_F = λ_B = λ_s2 dengan jump_found=False.

        Args:
            forward: Hasil sweep maju
            backward: Hasil sweep mundur
            threshold: Ambang lompatan (default 0.05)
            with_references: Hitung juga λ_B dari kondisi Landau dan spinodal eksak

        Raises:
            DomainError: Jika grid λ kedua sweep berbeda
        """
        threshold = threshold if threshold is not None else settings.JUMP_THRESHOLD
        if not np.allclose(sorted(forward.lambdas), sorted(backward.lambdas)):
            raise DomainError("Sweep maju dan mundur harus memakai grid lambda yang sama")

        lambda_f = self._first_jump(forward, threshold)
        lambda_b = self._first_jump(backward, threshold)
        params = forward.params
        branch_gap = np.max(np.abs(
            np.array(forward.ascending().gamma_inf) - np.array(backward.ascending().gamma_inf)
        ))
        if lambda_f is None or lambda_b is None or branch_gap < settings.BRANCH_MATCH_TOL:
            lambda_s2 = steadystate_service.lambda_s2(params)
            logger.info(f"No jump above threshold {threshold}; reporting lambda_s2={lambda_s2:.6g}")
            return JumpPoints(lambda_f=lambda_s2, lambda_b=lambda_s2, jump_found=False)

        landau_value = spinodal_value = None
        if with_references and steadystate_service.classify_order(params) != TransitionOrder.SECOND:
            try:
                landau_value = steadystate_service.backward_jump_landau(params)
            except SimulationError as e:
                logger.warning(f"Landau backward-jump condition unavailable: {e}")
            spinodal_value = steadystate_service.spinodal_coupling(params)
        return JumpPoints(
            lambda_f=lambda_f,
            lambda_b=lambda_b,
            jump_found=True,
            lambda_b_landau=landau_value,
            lambda_b_spinodal=spinodal_value,
        )

    def hysteresis_area(self, forward: SweepResult, backward: SweepResult) -> float:
        """Luas loop histeresis ∫|γ_maju − γ_mundur| dλ (trapesium)."""
        fwd = forward.ascending()
        bwd = backward.ascending()
        difference = np.abs(np.array(fwd.gamma_inf) - np.array(bwd.gamma_inf))
        return float(np.trapz(difference, fwd.lambdas))

    def _rhs_vector(self, y: np.ndarray, params: SystemParams, co_rotating: bool) -> np.ndarray:
        """Ruas kanan pada vektor kompleks [α, γ₋, γ₊, σ, σ̇]."""
        alpha, gamma_minus, gamma_plus = complex(y[0]), complex(y[1]), complex(y[2])
        sigma = float(y[3].real)
        sigma_dot = float(y[4].real)
        d_alpha, d_minus, d_plus, d_sigma = model_service.gradient_components(
            alpha, gamma_minus, gamma_plus, sigma, params
        )
        if co_rotating:
            norm = abs(gamma_minus) ** 2 + abs(gamma_plus) ** 2
            mu = (gamma_minus.conjugate() * d_minus + gamma_plus.conjugate() * d_plus).real / norm
            d_minus -= mu * gamma_minus
            d_plus -= mu * gamma_plus
        return np.array([
            -1j * d_alpha - params.gamma_m * alpha,
            -1j * d_minus,
            -1j * d_plus,
            sigma_dot,
            -4.0 * params.omega_r * d_sigma,
        ], dtype=complex)

    def _polish(self, state: MeanFieldState, params: SystemParams) -> Optional[MeanFieldState]:
        """Titik tetap stabil di sekitar state, atau None jika belum cukup dekat."""
        radius = settings.RELAX_POLISH_RADIUS
        result = steadystate_service.stationary_point(state.signed_gamma, state.sigma, params)
        if result is None:
            return None
        gamma, sigma, is_minimum = result
        if not is_minimum:
            return None
        try:
            omega_sigma = model_service.breathing_frequency(sigma, params)
        except NonPositiveRadicandError:
            return None
        alpha = model_service.membrane_amplitude(gamma, sigma, params)
        distance = max(
            abs(state.signed_gamma - gamma),
            np.hypot(state.sigma - sigma, state.sigma_dot / omega_sigma),
            abs(state.alpha - alpha) / (1.0 + abs(alpha)),
        )
        if distance > radius:
            return None
        return MeanFieldState(
            alpha=alpha,
            gamma_minus=complex(np.sqrt(1.0 - gamma ** 2)),
            gamma_plus=complex(gamma),
            sigma=sigma,
            sigma_dot=0.0,
        )

    def _perturb(self, state: MeanFieldState) -> MeanFieldState:
        """Geser γ₊ sebesar 1e-6 lalu normalisasi ulang."""
        gamma_plus = state.gamma_plus + settings.SWEEP_PERTURBATION
        norm = np.sqrt(abs(state.gamma_minus) ** 2 + abs(gamma_plus) ** 2)
        return state.model_copy(update={
            "gamma_minus": state.gamma_minus / norm,
            "gamma_plus": gamma_plus / norm,
        })

    def _first_jump(self, sweep: SweepResult, threshold: float) -> Optional[float]:
        """λ pertama setelah lompatan |Δγ∞| > threshold, dalam urutan sweep."""
        jumps = np.abs(np.diff(sweep.gamma_inf))
        above = np.flatnonzero(jumps > threshold)
        if above.size == 0:
            return None
        return float(sweep.lambdas[int(above[0]) + 1])

    def _fastest_frequency(self, sigma: float, params: SystemParams) -> float:
        """max(Ω_m, Ω_a, ω_σ); ω_σ diabaikan bila radikannya tidak positif."""
        fastest = max(params.omega_m, params.omega_a)
        try:
            fastest = max(fastest, model_service.breathing_frequency(sigma, params))
        except NonPositiveRadicandError:
            pass
        return fastest


dynamics_service = DynamicsService()
