import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from app.core.config import settings
from app.core.exceptions import ComplexRootError, DomainError, UnstableDriftError
from app.schemas.dynamics import SweepResult
from app.schemas.fluctuations import (
    BdgMatrix,
    EntanglementPoint,
    HysteresisSpectrum,
    QuadratureCovariance,
    SpectrumBranch,
)
from app.schemas.model import MeanFieldState, SteadyState, SystemParams
from app.services.model_service import model_service
from app.services.steadystate_service import steadystate_service

logger = logging.getLogger(__name__)

BRANCH_LABELS = ("omega_1", "omega_2", "omega_3")
MODE_COUNT = 3

# Satu titik spektrum: kandidat ν (Re ≥ −eps) dan bobot eigenvector pada mode (α, γ, σ)
Candidates = Tuple[np.ndarray, np.ndarray]


class FluctuationService:
    """
    Service class untuk fluktuasi kuantum terlinearisasi.

    Menyusun matriks Bogoliubov-de Gennes, melacak cabang eksitasi
    kolektif, menyelesaikan kovarians kuadratur stasioner (persamaan
    Lyapunov), dan menghitung negativitas logaritmik.
    """

    def bdg_matrix(self, steady: SteadyState, params: SystemParams) -> BdgMatrix:
        """
        Matriks stabilitas M(α₀, γ₀, σ₀) = [[H, G], [−G, −H*]].

        Args:
            steady: Steady state (α₀ sudah dalam skala √N)
            params: Parameter sistem

        Returns:
            BdgMatrix: Matriks 6×6 beserta blok H dan G
        """
        lam = params.lambda_coll
        g = steady.gamma0
        s2 = steady.sigma0 ** 2
        e = np.exp(-s2)
        root = np.sqrt(max(0.0, 1.0 - g ** 2))
        polarization = 1.0 - 2.0 * g ** 2
        re_alpha = steady.alpha0.real
        v_eff = model_service.effective_lattice_depth(steady, params)

        h = np.zeros((MODE_COUNT, MODE_COUNT), dtype=complex)
        h[0, 0] = params.omega_m - 1j * params.gamma_m
        h[1, 1] = params.omega_a * polarization + 4.0 * lam * g * root * re_alpha * e
        h[2, 2] = 2.0 * params.omega_r / s2 + v_eff * (2.0 - s2) * s2 * e
        h[0, 1] = h[1, 0] = -0.5 * lam * polarization * e
        h[0, 2] = h[2, 0] = np.sqrt(2.0) * lam * g * root * s2 * e
        h[1, 2] = h[2, 1] = np.sqrt(2.0) * lam * polarization * re_alpha * s2 * e

        gm = np.zeros((MODE_COUNT, MODE_COUNT), dtype=complex)
        gm[0, 1] = gm[1, 0] = h[0, 1]
        gm[0, 2] = gm[2, 0] = h[0, 2]
        return BdgMatrix.from_blocks(h, gm)

    def quadrature_drift(self, bdg: BdgMatrix) -> np.ndarray:
        """
        Matriks drift real A di basis (q₁…q₃, p₁…p₃).

        Dari i∂ₜd = Md dengan q = (d + d†)/√2, p = (d − d†)/(i√2):
        A = [[Im H, Re H − G], [−(Re H + G), Im H]].
        """
        h = bdg.h
        g = bdg.g.real
        return np.block([
            [h.imag, h.real - g],
            [-(h.real + g), h.imag],
        ])

    def diffusion_matrix(self, params: SystemParams) -> np.ndarray:
        """Difusi D: hanya D[q_α,q_α] = D[p_α,p_α] = Γ_m(2N_m+1)."""
        d = np.zeros((2 * MODE_COUNT, 2 * MODE_COUNT))
        d[0, 0] = d[MODE_COUNT, MODE_COUNT] = params.gamma_m * (2.0 * params.n_bath + 1.0)
        return d

    def stationary_covariance(self, bdg: BdgMatrix, params: SystemParams) -> QuadratureCovariance:
        """
        Kovarians kuadratur stasioner dari A·C + C·Aᵀ + D = 0.

        Mode yang sama sekali tidak terhubung dengan membran (tanpa redaman
        maupun noise) tidak punya keadaan stasioner unik; mode tersebut
        diisi vakum C = I/2 dan sisanya diselesaikan sebagai sistem
        Kronecker simetris (n(n+1)/2 unknown).

        Raises:
            UnstableDriftError: Jika drift sub-sistem terhubung punya Re(eig) ≥ 0
        """
        drift = self.quadrature_drift(bdg)
        diffusion = self.diffusion_matrix(params)
        modes = self._connected_modes(bdg)
        index = np.array(modes + [m + MODE_COUNT for m in modes])

        sub_drift = drift[np.ix_(index, index)]
        eigenvalues = np.linalg.eigvals(sub_drift)
        if np.max(eigenvalues.real) >= 0.0:
            raise UnstableDriftError(
                f"Drift tidak stabil: max Re(eig) = {np.max(eigenvalues.real):.3g} pada lambda={params.lambda_coll:.6g}"
            )

        covariance = 0.5 * np.eye(2 * MODE_COUNT)
        covariance[np.ix_(index, index)] = self._solve_lyapunov(sub_drift, diffusion[np.ix_(index, index)])
        if len(modes) < MODE_COUNT:
            logger.debug(f"Modes {sorted(set(range(MODE_COUNT)) - set(modes))} decoupled, set to vacuum")
        return QuadratureCovariance(c=covariance)

    def logarithmic_negativity(self, cov: QuadratureCovariance, mode_pair: Tuple[int, int] = (0, 1)) -> float:
        """
        Negativitas logaritmik E_N antara dua mode.

        Args:
            cov: Kovarians kuadratur
            mode_pair: Indeks mode (0=α, 1=γ, 2=σ)

        Returns:
            float: max{0, −ln(2ν̃₋)}

        Raises:
            DomainError: Jika indeks mode tidak valid
            ComplexRootError: Jika Σ̃² < 4 det C₄ (kovarians tidak fisis)
        """
        first, second = mode_pair
        n = cov.n_modes
        if first == second or not (0 <= first < n and 0 <= second < n):
            raise DomainError(f"Pasangan mode tidak valid: {mode_pair}")

        order = [first, first + n, second, second + n]
        c4 = cov.c[np.ix_(order, order)]
        det_u = np.linalg.det(c4[:2, :2])
        det_w = np.linalg.det(c4[2:, 2:])
        det_v = np.linalg.det(c4[:2, 2:])
        det_c = np.linalg.det(c4)

        sigma_tilde = det_u + det_w - 2.0 * det_v
        discriminant = sigma_tilde ** 2 - 4.0 * det_c
        if discriminant < -settings.COMPLEX_ROOT_TOL * max(1.0, sigma_tilde ** 2):
            raise ComplexRootError(f"Diskriminan simplektik negatif ({discriminant:.3g})")
        inner = sigma_tilde - np.sqrt(max(0.0, discriminant))
        if inner < -settings.COMPLEX_ROOT_TOL * max(1.0, abs(sigma_tilde)):
            raise ComplexRootError(f"Eigenvalue simplektik kompleks (Σ̃ − √Δ = {inner:.3g})")
        nu_minus = np.sqrt(max(0.0, inner) / 2.0)
        if nu_minus == 0.0:
            raise ComplexRootError("Eigenvalue simplektik nol")
        return float(max(0.0, -np.log(2.0 * nu_minus)))

    def physicality_margin(self, cov: QuadratureCovariance) -> float:
        """Eigenvalue terkecil C + iJ/2 (≥ 0 untuk state fisis)."""
        hermitian = cov.c + 0.5j * cov.symplectic_form()
        return float(np.min(np.linalg.eigvalsh(hermitian)))

    def excitation_spectrum(
        self,
        params: SystemParams,
        lambda_grid: Sequence[float],
        max_workers: Optional[int] = None,
    ) -> List[SpectrumBranch]:
        """
        Tiga cabang eksitasi kolektif ν_i(λ) dari minimizer global.

        Args:
            params: Parameter sistem (lambda_coll diabaikan)
            lambda_grid: Grid kopling (minimal 1 titik)
            max_workers: Jumlah proses worker (None/1 = sekuensial)

        Returns:
            List[SpectrumBranch]: Cabang omega_1 (membran), omega_2 (transisi), omega_3 (breathing)
        """
        lambdas = self._checked_grid(lambda_grid)
        tasks = [(params.with_coupling(lam), None) for lam in lambdas]
        candidates = self._map(_spectrum_candidates, tasks, max_workers)
        logger.info(f"Excitation spectrum computed on {len(lambdas)} coupling point(s)")
        return self._track_branches(lambdas, candidates)

    def spectrum_along_hysteresis(
        self,
        params: SystemParams,
        forward: SweepResult,
        backward: SweepResult,
        max_workers: Optional[int] = None,
    ) -> HysteresisSpectrum:
        """
        Spektrum sepanjang solusi long-time sweep maju dan mundur.

        M dibangun dari (α∞, γ∞, σ∞) tiap titik sweep, bukan dari
        minimizer global. Cabang minimal memakai grid λ yang sama.
        """
        branches = []
        for sweep in (forward.ascending(), backward.ascending()):
            tasks = [
                (params.with_coupling(lam), self._steady_from_sweep(state, params.with_coupling(lam)))
                for lam, state in zip(sweep.lambdas, sweep.states)
            ]
            candidates = self._map(_spectrum_candidates, tasks, max_workers)
            branches.append(self._track_branches(list(sweep.lambdas), candidates))
        minimal = self.excitation_spectrum(params, forward.ascending().lambdas, max_workers)
        return HysteresisSpectrum(forward=branches[0], backward=branches[1], minimal=minimal)

    def entanglement_curve(
        self,
        params: SystemParams,
        lambda_grid: Sequence[float],
        n_bath_values: Sequence[float],
        mode_pair: Tuple[int, int] = (0, 1),
        max_workers: Optional[int] = None,
    ) -> List[EntanglementPoint]:
        """
        E_N(λ) untuk beberapa okupasi termal N_m.

        Returns:
            List[EntanglementPoint]: Urut per N_m lalu per λ
        """
        lambdas = self._checked_grid(lambda_grid)
        if len(n_bath_values) == 0:
            raise DomainError("Daftar n_bath tidak boleh kosong")
        branches = self.excitation_spectrum(params, lambdas, max_workers)

        points = []
        for n_bath in n_bath_values:
            bath_params = params.with_updates(n_bath=float(n_bath))
            tasks = [(bath_params.with_coupling(lam), mode_pair) for lam in lambdas]
            values = self._map(_negativity_at, tasks, max_workers)
            for k, (lam, e_n) in enumerate(zip(lambdas, values)):
                points.append(EntanglementPoint(
                    lambda_coll=lam,
                    n_bath=float(n_bath),
                    e_n=e_n,
                    nu=[branch.nu[k] for branch in branches],
                ))
            logger.info(f"Entanglement curve for N_m={n_bath:g}: max E_N = {max(values):.6g}")
        return points

    def spectrum_candidates(self, steady: SteadyState, params: SystemParams) -> Candidates:
        """
        Eigenvalue fisis M (Re ν ≥ −eps) beserta bobot eigenvector.

        Returns:
            Tuple (ν kandidat, bobot k×3 pada komponen d_α, d_γ, d_σ)
        """
        bdg = self.bdg_matrix(steady, params)
        values, vectors = np.linalg.eig(bdg.m)
        scale = max(1.0, float(np.max(np.abs(values))))
        keep = values.real >= -settings.STABLE_BRANCH_EPS * scale
        weights = np.abs(vectors[:MODE_COUNT, :]) ** 2 + np.abs(vectors[MODE_COUNT:, :]) ** 2
        return values[keep], weights[:, keep].T

    def _track_branches(self, lambdas: List[float], candidates: List[Candidates]) -> List[SpectrumBranch]:
        """Cocokkan kandidat antar λ dengan kontinuitas (ekstrapolasi linear + assignment)."""
        tolerance = settings.SPECTRUM_MATCH_TOL
        history: List[List[complex]] = [[] for _ in range(MODE_COUNT)]
        degenerate: List[List[bool]] = [[] for _ in range(MODE_COUNT)]

        for k, (values, weights) in enumerate(candidates):
            if values.size < MODE_COUNT:
                raise DomainError(f"Hanya {values.size} eigenvalue fisis pada lambda={lambdas[k]:.6g}")
            if k == 0:
                # label awal: mode bare dengan bobot eigenvector terbesar
                rows, cols = linear_sum_assignment(-weights.T)
                chosen = cols[np.argsort(rows)]
            else:
                predictions = np.array([self._predict(lambdas, history[b], k) for b in range(MODE_COUNT)])
                cost = np.abs(predictions[:, None] - values[None, :])
                rows, cols = linear_sum_assignment(cost)
                chosen = cols[np.argsort(rows)]

            scale = max(1.0, float(np.max(np.abs(values))))
            for b, idx in enumerate(chosen):
                others = np.delete(values, idx)
                close = bool(np.any(np.abs(others - values[idx]) < tolerance * scale))
                if close:
                    logger.warning(f"Degenerate branch match for {BRANCH_LABELS[b]} at lambda={lambdas[k]:.6g}")
                history[b].append(complex(values[idx]))
                degenerate[b].append(close)

        return [
            SpectrumBranch(label=BRANCH_LABELS[b], lambdas=list(lambdas), nu=history[b], degenerate=degenerate[b])
            for b in range(MODE_COUNT)
        ]

    def _predict(self, lambdas: List[float], values: List[complex], k: int) -> complex:
        """Prediksi ν di titik k dari dua titik sebelumnya."""
        if k < 2:
            return values[-1]
        step = lambdas[k - 1] - lambdas[k - 2]
        slope = (values[-1] - values[-2]) / step if step != 0 else 0.0
        return values[-1] + slope * (lambdas[k] - lambdas[k - 1])

    def _connected_modes(self, bdg: BdgMatrix) -> List[int]:
        """Mode yang terhubung (lewat H atau G) dengan mode membran."""
        scale = max(1.0, float(np.max(np.abs(bdg.h))))
        linked = (np.abs(bdg.h) + np.abs(bdg.g)) > settings.DECOUPLING_TOL * scale
        reached = {0}
        frontier = [0]
        while frontier:
            mode = frontier.pop()
            for other in range(MODE_COUNT):
                if other not in reached and linked[mode, other]:
                    reached.add(other)
                    frontier.append(other)
        return sorted(reached)

    def _solve_lyapunov(self, drift: np.ndarray, diffusion: np.ndarray) -> np.ndarray:
        """Selesaikan A C + C Aᵀ = −D untuk C simetris (sistem Kronecker tereduksi)."""
        n = drift.shape[0]
        upper = [(i, j) for i in range(n) for j in range(i, n)]
        expand = np.zeros((n * n, len(upper)))
        for col, (i, j) in enumerate(upper):
            expand[i * n + j, col] = 1.0
            expand[j * n + i, col] = 1.0
        eye = np.eye(n)
        kron = np.kron(drift, eye) + np.kron(eye, drift)
        rows = [i * n + j for i, j in upper]
        system = (kron @ expand)[rows]
        solution = np.linalg.solve(system, -diffusion.reshape(-1)[rows])
        return (expand @ solution).reshape(n, n)

    def _steady_from_sweep(self, state: MeanFieldState, params: SystemParams) -> SteadyState:
        """Bungkus state long-time sebuah sweep sebagai SteadyState."""
        gamma = float(np.clip(state.signed_gamma / np.sqrt(state.norm), -1.0, 1.0))
        return SteadyState(
            alpha0=state.alpha,
            gamma0=gamma,
            sigma0=state.sigma,
            energy0=model_service.reduced_potential(gamma, state.sigma, params),
        )

    def _checked_grid(self, lambda_grid: Sequence[float]) -> List[float]:
        """Validasi grid λ (tidak kosong, ≥ 0, berhingga)."""
        lambdas = [float(lam) for lam in lambda_grid]
        if not lambdas:
            raise DomainError("Grid lambda tidak boleh kosong")
        if any(not np.isfinite(lam) or lam < 0 for lam in lambdas):
            raise DomainError("Grid lambda harus berhingga dan >= 0")
        return lambdas

    def _map(self, func, tasks: list, max_workers: Optional[int]) -> list:
        """Jalankan func per task; paralel bila max_workers > 1, hasil urut indeks."""
        if max_workers is None or max_workers <= 1 or len(tasks) <= 1:
            return [func(task) for task in tasks]
        with ProcessPoolExecutor(max_workers=max_workers) as executor:
            return list(executor.map(func, tasks))


def _spectrum_candidates(task: Tuple[SystemParams, Optional[SteadyState]]) -> Candidates:
    """Worker: kandidat spektrum pada satu λ (steady state global bila tidak diberikan)."""
    params, steady = task
    if steady is None:
        steady = steadystate_service.find_steady_state(params)
    return fluctuation_service.spectrum_candidates(steady, params)


def _negativity_at(task: Tuple[SystemParams, Tuple[int, int]]) -> float:
    """Worker: E_N pada satu λ dan satu N_m."""
    params, mode_pair = task
    steady = steadystate_service.find_steady_state(params)
    bdg = fluctuation_service.bdg_matrix(steady, params)
    covariance = fluctuation_service.stationary_covariance(bdg, params)
    return fluctuation_service.logarithmic_negativity(covariance, mode_pair)


fluctuation_service = FluctuationService()
