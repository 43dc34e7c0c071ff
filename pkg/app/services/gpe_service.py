import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import curve_fit

from app.core.config import settings
from app.core.exceptions import DomainError, FitFailedError, GridTooCoarseError, NoConvergenceError, SimulationError
from app.schemas.gpe import AnsatzComparison, GpeField, WidthFit
from app.schemas.model import SystemParams
from app.services.steadystate_service import steadystate_service
from app.utils.tridiagonal import apply_cyclic_tridiagonal, solve_cyclic_tridiagonal

logger = logging.getLogger(__name__)

MIN_GRID_POINTS = 64
ROUNDOFF_FLOOR = 100.0 * np.finfo(float).eps

# Laplacian kompak orde empat: B·ψ″ = A·ψ, A = tri(1, −2, 1)/h², B = tri(1, 10, 1)/12
COMPACT_OFF = 1.0 / 12.0
COMPACT_DIAG = 10.0 / 12.0


class GpeService:
    """
    Service class untuk solver Gross-Pitaevskii dua komponen.

    Ground state dicari dengan evolusi imaginary time Crank-Nicolson
    (Laplacian kompak orde empat, boundary periodik) dengan amplitudo
    membran self-consistent. Dipakai sebagai oracle independen untuk
    ansatz Gaussian mode tunggal.
    """

    def solve_ground(
        self,
        params: SystemParams,
        n_grid: Optional[int] = None,
        dtau: Optional[float] = None,
        check_grid: bool = False,
        max_steps: Optional[int] = None,
    ) -> GpeField:
        """
        Ground state GPE pada satu periode lattice z ∈ [−π/2, π/2).

        Args:
            params: Parameter sistem
            n_grid: Jumlah titik grid (default 512, minimal 64)
            dtau: Langkah imaginary time (default 1e-4)
            check_grid: Ulangi dengan 2n titik dan bandingkan energi akhir
            max_steps: Batas langkah (default 10⁵)

        Returns:
            GpeField: Medan ternormalisasi beserta α, energi, dan jejak energi

        Raises:
            DomainError: Jika n_grid < 64 atau dtau ≤ 0
            NoConvergenceError: Jika batas langkah tercapai
            GridTooCoarseError: Jika energi berubah > 1e-6 relatif saat grid digandakan
        """
        n_grid = n_grid if n_grid is not None else settings.GPE_GRID_POINTS
        dtau = dtau if dtau is not None else settings.GPE_DTAU
        max_steps = max_steps if max_steps is not None else settings.GPE_MAX_STEPS
        if n_grid < MIN_GRID_POINTS:
            raise DomainError(f"n_grid minimal {MIN_GRID_POINTS}, diberikan {n_grid}")
        if dtau <= 0:
            raise DomainError(f"dtau harus positif, diberikan {dtau}")

        field = self._evolve(params, n_grid, dtau, max_steps)
        if check_grid:
            fine = self._evolve(params, 2 * n_grid, dtau, max_steps)
            change = abs(fine.energy - field.energy) / abs(fine.energy)
            if change > settings.GPE_GRID_TOL:
                raise GridTooCoarseError(
                    f"Energi berubah {change:.3g} (relatif) dari n={n_grid} ke n={2 * n_grid}"
                )
            logger.info(f"Grid check passed: relative energy change {change:.3g}")
        return field

    def fit_widths(self, field: GpeField, strict: bool = False) -> WidthFit:
        """
        Fit Gaussian |ψ_τ|² ≈ A_τ·exp(−z²/σ_τ²) pada sumur tengah |z| ≤ π/4.

        Komponen dengan norm < 1e-8 atau fit yang gagal diberi lebar 0
        dan flag False.

        Raises:
            FitFailedError: Jika strict=True dan fit komponen ψ₋ gagal
        """
        h = field.spacing
        fraction = float(np.clip(h * np.sum(np.abs(field.psi_plus) ** 2), 0.0, 1.0))
        sigma_minus, minus_ok = self._fit_component(field.grid, field.psi_minus, h, "psi_minus")
        sigma_plus, plus_ok = self._fit_component(field.grid, field.psi_plus, h, "psi_plus")
        if strict and not minus_ok:
            raise FitFailedError("Fit Gaussian komponen psi_minus gagal")
        return WidthFit(
            sigma_minus=sigma_minus,
            sigma_plus=sigma_plus,
            gamma_fraction=fraction,
            minus_ok=minus_ok,
            plus_ok=plus_ok,
        )

    def validate_ansatz(
        self,
        params: SystemParams,
        lambda_list: Sequence[float],
        n_grid: Optional[int] = None,
        dtau: Optional[float] = None,
        max_workers: Optional[int] = None,
    ) -> List[AnsatzComparison]:
        """
        Bandingkan GPE dengan model Gaussian untuk beberapa λ.

        Baris yang sub-langkahnya gagal tetap dikeluarkan dengan ok=False.
        """
        if len(lambda_list) == 0:
            raise DomainError("Daftar lambda tidak boleh kosong")
        tasks = [(params.with_coupling(float(lam)), n_grid, dtau) for lam in lambda_list]
        if max_workers is None or max_workers <= 1 or len(tasks) <= 1:
            rows = [_validate_point(task) for task in tasks]
        else:
            with ProcessPoolExecutor(max_workers=max_workers) as executor:
                rows = list(executor.map(_validate_point, tasks))
        logger.info(f"Ansatz validation done: {sum(not row.ok for row in rows)} flagged row(s) of {len(rows)}")
        return rows

    def compare_point(self, params: SystemParams, n_grid: Optional[int] = None, dtau: Optional[float] = None) -> AnsatzComparison:
        """Satu baris perbandingan GPE vs Gaussian pada λ = params.lambda_coll."""
        lam = params.lambda_coll
        try:
            steady = steadystate_service.find_steady_state(params)
            field = self.solve_ground(params, n_grid, dtau)
            fit = self.fit_widths(field)
        except SimulationError as e:
            logger.warning(f"Ansatz comparison failed at lambda={lam:.6g}: {e}")
            return AnsatzComparison(
                lambda_coll=lam,
                sigma_gpe=float("nan"),
                sigma_gauss=float("nan"),
                gamma_gpe=float("nan"),
                gamma_gauss=float("nan"),
                ok=False,
                message=str(e),
            )

        if fit.plus_ok and fit.minus_ok:
            sigma_gpe = (1.0 - fit.gamma_fraction) * fit.sigma_minus + fit.gamma_fraction * fit.sigma_plus
        else:
            sigma_gpe = fit.sigma_minus if fit.minus_ok else fit.sigma_plus
        ok = fit.minus_ok or fit.plus_ok
        return AnsatzComparison(
            lambda_coll=lam,
            sigma_gpe=sigma_gpe,
            sigma_gauss=steady.sigma0,
            gamma_gpe=float(np.sqrt(fit.gamma_fraction)),
            gamma_gauss=abs(steady.gamma0),
            ok=ok,
            message=None if ok else "Fit Gaussian gagal untuk kedua komponen",
        )

    def energy(self, field: GpeField, params: SystemParams) -> float:
        """Energi fungsional GPE dengan membran dieliminasi."""
        cos2z = np.cos(2.0 * field.grid)
        value, _ = self._energy(field.psi_minus, field.psi_plus, cos2z, field.spacing, params)
        return value

    def _evolve(self, params: SystemParams, n_grid: int, dtau: float, max_steps: int) -> GpeField:
        """Loop imaginary time: langkah CN, normalisasi, update α."""
        h = np.pi / n_grid
        grid = -0.5 * np.pi + h * np.arange(n_grid)
        cos2z = np.cos(2.0 * grid)
        lam = params.lambda_coll
        interval = settings.GPE_CHECK_INTERVAL

        sigma = steadystate_service.solve_width(0.0, params)
        seed = np.exp(-grid ** 2 / (2.0 * sigma ** 2)).astype(complex)
        psi_minus, psi_plus = self._normalize(seed, settings.GPE_SEED_FRACTION * seed, h)
        alpha = self._membrane_amplitude(psi_minus, psi_plus, cos2z, h, params)

        lattice = -0.5 * params.v * cos2z
        energy, _ = self._energy(psi_minus, psi_plus, cos2z, h, params)
        trace = [energy]
        logger.debug(f"GPE start: n={n_grid}, dtau={dtau:g}, seed width {sigma:.6g}")

        for step in range(1, max_steps + 1):
            drive = lam * alpha.real * cos2z
            density = np.abs(psi_minus) ** 2 + np.abs(psi_plus) ** 2
            explicit_minus = params.ng * density * psi_minus - drive * psi_plus
            explicit_plus = params.ng * density * psi_plus - drive * psi_minus
            potential_minus = -0.5 * params.omega_a + lattice
            potential_plus = 0.5 * params.omega_a + lattice - 2.0 * params.chi * drive

            psi_minus = self._crank_nicolson_step(psi_minus, potential_minus, explicit_minus, h, dtau, params.omega_r)
            psi_plus = self._crank_nicolson_step(psi_plus, potential_plus, explicit_plus, h, dtau, params.omega_r)
            psi_minus, psi_plus = self._normalize(psi_minus, psi_plus, h)
            alpha = self._membrane_amplitude(psi_minus, psi_plus, cos2z, h, params)

            if step % interval:
                continue
            new_energy, scale = self._energy(psi_minus, psi_plus, cos2z, h, params)
            change = abs(new_energy - energy)
            rate = change / (abs(new_energy) * interval * dtau)
            energy = new_energy
            trace.append(energy)
            if rate < settings.GPE_ENERGY_TOL or change <= ROUNDOFF_FLOOR * scale:
                logger.info(f"GPE converged after {step} steps (E={energy:.12g}, lambda={lam:.6g})")
                return self._field(grid, psi_minus, psi_plus, alpha, energy, step, trace, cos2z, h, params)

        field = self._field(grid, psi_minus, psi_plus, alpha, energy, max_steps, trace, cos2z, h, params)
        raise NoConvergenceError(
            f"GPE tidak konvergen dalam {max_steps} langkah (lambda={lam:.6g})", state=field
        )

    def _crank_nicolson_step(
        self,
        psi: np.ndarray,
        potential: np.ndarray,
        explicit: np.ndarray,
        h: float,
        dtau: float,
        omega_r: float,
    ) -> np.ndarray:
        """
        Satu langkah CN untuk ∂τψ = ω_R ψ″ − Uψ − N.

        Bagian kinetik dan potensial diagonal implisit (trapesium), N
        eksplisit. Dikali B: [B + (dτ/2)(−ω_R A + BU)]ψ' =
        B[ψ − (dτ/2)Uψ − dτN] + (dτ/2)ω_R Aψ.
        """
        half = 0.5 * dtau
        stiffness = omega_r / h ** 2
        lower = COMPACT_OFF + half * (-stiffness + COMPACT_OFF * np.roll(potential, 1))
        diag = COMPACT_DIAG + half * (2.0 * stiffness + COMPACT_DIAG * potential)
        upper = COMPACT_OFF + half * (-stiffness + COMPACT_OFF * np.roll(potential, -1))

        source = psi - half * potential * psi - dtau * explicit
        rhs = apply_cyclic_tridiagonal(COMPACT_OFF, COMPACT_DIAG, COMPACT_OFF, source)
        rhs = rhs + half * stiffness * apply_cyclic_tridiagonal(1.0, -2.0, 1.0, psi)
        return solve_cyclic_tridiagonal(lower, diag, upper, rhs)

    def _energy(
        self,
        psi_minus: np.ndarray,
        psi_plus: np.ndarray,
        cos2z: np.ndarray,
        h: float,
        params: SystemParams,
    ) -> Tuple[float, float]:
        """Energi total dan skala |suku| untuk lantai round-off."""
        kinetic = 0.0
        for psi in (psi_minus, psi_plus):
            second = solve_cyclic_tridiagonal(
                COMPACT_OFF, COMPACT_DIAG, COMPACT_OFF, apply_cyclic_tridiagonal(1.0, -2.0, 1.0, psi) / h ** 2
            )
            kinetic += -params.omega_r * h * float(np.real(np.sum(np.conj(psi) * second)))

        rho_minus = np.abs(psi_minus) ** 2
        rho_plus = np.abs(psi_plus) ** 2
        lattice = -0.5 * params.v * cos2z
        potential = h * float(np.sum((lattice - 0.5 * params.omega_a) * rho_minus + (lattice + 0.5 * params.omega_a) * rho_plus))
        contact = 0.5 * params.ng * h * float(np.sum((rho_minus + rho_plus) ** 2))
        overlap = self._overlap(psi_minus, psi_plus, cos2z, h, params)
        membrane = -params.nonequilibrium_coupling * overlap ** 2

        total = kinetic + potential + contact + membrane
        scale = abs(kinetic) + abs(potential) + abs(contact) + abs(membrane)
        return total, scale

    def _overlap(self, psi_minus: np.ndarray, psi_plus: np.ndarray, cos2z: np.ndarray, h: float, params: SystemParams) -> float:
        """I = ∫cos2z[χ|ψ₊|² + Re(ψ₊*ψ₋)]dz."""
        integrand = cos2z * (params.chi * np.abs(psi_plus) ** 2 + np.real(np.conj(psi_plus) * psi_minus))
        return float(h * np.sum(integrand))

    def _membrane_amplitude(
        self, psi_minus: np.ndarray, psi_plus: np.ndarray, cos2z: np.ndarray, h: float, params: SystemParams) -> complex:
        """Persamaan membran stasioner α = √Nλ·I/(Ω_m − iΓ_m)."""
        overlap = self._overlap(psi_minus, psi_plus, cos2z, h, params)
        return complex(params.lambda_coll * overlap / (params.omega_m - 1j * params.gamma_m))

    def _normalize(self, psi_minus: np.ndarray, psi_plus: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray]:
        norm = np.sqrt(h * np.sum(np.abs(psi_minus) ** 2 + np.abs(psi_plus) ** 2))
        return psi_minus / norm, psi_plus / norm

    def _field(
        self,
        grid: np.ndarray,
        psi_minus: np.ndarray,
        psi_plus: np.ndarray,
        alpha: complex,
        energy: float,
        steps: int,
        trace: List[float],
        cos2z: np.ndarray,
        h: float,
        params: SystemParams,
    ) -> GpeField:
        overlap = self._overlap(psi_minus, psi_plus, cos2z, h, params)
        residual = abs(alpha * (params.omega_m - 1j * params.gamma_m) - params.lambda_coll * overlap)
        return GpeField(
            grid=grid,
            psi_minus=psi_minus,
            psi_plus=psi_plus,
            alpha=alpha,
            energy=energy,
            steps=steps,
            energy_trace=trace,
            alpha_residual=float(residual),
        )

    def _fit_component(self, grid: np.ndarray, psi: np.ndarray, h: float, name: str) -> Tuple[float, bool]:
        """Lebar Gaussian satu komponen, atau (0, False) bila gagal."""
        density = np.abs(psi) ** 2
        if h * np.sum(density) < settings.GPE_MIN_COMPONENT_NORM:
            logger.debug(f"Component {name} below minimum norm, fit skipped")
            return 0.0, False

        window = np.abs(grid) <= settings.GPE_FIT_WINDOW
        z = grid[window]
        rho = density[window]
        peak = float(np.max(rho))
        width_guess = float(np.sqrt(max(2.0 * np.sum(z ** 2 * rho) / np.sum(rho), 1e-6)))
        try:
            popt, _ = curve_fit(
                lambda x, amplitude, width: amplitude * np.exp(-x ** 2 / width ** 2),
                z,
                rho / peak,
                p0=(1.0, width_guess),
                maxfev=10000,
            )
        except (RuntimeError, ValueError) as e:
            logger.warning(f"Gaussian fit failed for {name}: {e}")
            return 0.0, False
        width = abs(float(popt[1]))
        if not np.isfinite(width) or width == 0.0:
            logger.warning(f"Gaussian fit for {name} returned invalid width {width}")
            return 0.0, False
        return width, True


def _validate_point(task: Tuple[SystemParams, Optional[int], Optional[float]]) -> AnsatzComparison:
    """Worker: satu baris validate_ansatz."""
    params, n_grid, dtau = task
    return gpe_service.compare_point(params, n_grid, dtau)


gpe_service = GpeService()
