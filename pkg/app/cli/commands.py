"""
Handler per command CLI.

Setiap handler menerima ExperimentConfig dan mengembalikan mapping
nama file CSV → DataFrame. Penulisan file dilakukan oleh runner.
"""

import logging
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from app.core.exceptions import NonPositiveRadicandError, SimulationError
from app.schemas.dynamics import SweepDirection, SweepResult
from app.schemas.experiment import Command, ExperimentConfig
from app.schemas.fluctuations import SpectrumBranch
from app.schemas.landau import CriticalMode, TransitionOrder
from app.services.dynamics_service import dynamics_service
from app.services.fluctuation_service import fluctuation_service
from app.services.gpe_service import gpe_service
from app.services.model_service import model_service
from app.services.steadystate_service import steadystate_service

logger = logging.getLogger(__name__)

Frames = Dict[str, pd.DataFrame]

SWEEP_COLUMNS = ["lambda", "gamma_inf", "re_alpha", "im_alpha", "sigma_inf", "converged"]


def run_steady(config: ExperimentConfig) -> Frames:
    """Steady state global pada λ konfigurasi plus permukaan energi E(γ)."""
    params = config.params
    steady = steadystate_service.find_steady_state(params)
    surface = steadystate_service.energy_surface(params)
    try:
        omega_sigma = model_service.breathing_frequency(steady.sigma0, params)
    except NonPositiveRadicandError:
        omega_sigma = float("nan")
    summary = pd.DataFrame([{
        "lambda": params.lambda_coll,
        "gamma0": steady.gamma0,
        "sigma0": steady.sigma0,
        "re_alpha": steady.alpha0.real,
        "im_alpha": steady.alpha0.imag,
        "energy0": steady.energy0,
        "omega_sigma": omega_sigma,
    }])
    profile = pd.DataFrame({"gamma": surface.gammas, "energy": surface.energies, "sigma": surface.sigmas})
    return {"steady.csv": summary, "surface.csv": profile}


def run_landau(config: ExperimentConfig) -> Frames:
    """Koefisien Landau, kopling kritis, dan orde transisi."""
    params = config.params
    le = steadystate_service.landau_coefficients(params)
    lambda_s2 = steadystate_service.lambda_s2(params)
    order = steadystate_service.classify_order(params)
    row = {
        "a0": le.a0, "a1": le.a1, "a2": le.a2, "a3": le.a3, "a4": le.a4, "a5": le.a5, "a6": le.a6,
        "sigma0": le.sigma0,
        "omega_sigma": le.omega_sigma,
        "lambda_s2": lambda_s2,
        "omega_c": steadystate_service.omega_c(params),
        "order": order.value,
        "omega_zeta": model_service.displacement_mode_frequency(le.sigma0, params),
    }
    coexistence = {
        TransitionOrder.FIRST_SYMMETRIC: steadystate_service.lambda_s1,
        TransitionOrder.FIRST_ASYMMETRIC: steadystate_service.lambda_a1,
    }.get(order)
    for mode in CriticalMode:
        value = float("nan")
        if coexistence is not None:
            try:
                value = coexistence(params, mode)
            except SimulationError as e:
                logger.warning(f"Coexistence coupling ({mode.value}) unavailable: {e}")
        row[f"lambda_coex_{mode.value}"] = value
    _, row["lambda_crit"] = steadystate_service.critical_coupling(params, config.mode)
    return {"landau.csv": pd.DataFrame([row])}


def run_sweep(config: ExperimentConfig) -> Frames:
    """Sweep maju dan mundur, titik lompatan, dan luas histeresis."""
    forward, backward = _sweeps(config)
    jumps = dynamics_service.detect_jumps(forward, backward)
    summary = pd.DataFrame([{
        "lambda_f": jumps.lambda_f,
        "lambda_b": jumps.lambda_b,
        "jump_found": jumps.jump_found,
        "lambda_b_landau": _or_nan(jumps.lambda_b_landau),
        "lambda_b_spinodal": _or_nan(jumps.lambda_b_spinodal),
        "hysteresis_area": dynamics_service.hysteresis_area(forward, backward),
    }])
    return {"forward.csv": _sweep_frame(forward), "backward.csv": _sweep_frame(backward), "jumps.csv": summary}


def run_phase_diagram(config: ExperimentConfig) -> Frames:
    """Diagram fase orde transisi pada bidang (V atau Ng, Ω_a)."""
    cells = steadystate_service.phase_diagram(
        config.params,
        config.axis,
        (config.scan_lo, config.scan_hi),
        config.n_scan,
        (config.omega_a_lo, config.omega_a_hi),
        config.n_omega_a,
        mode=config.mode,
        max_workers=config.threads,
    )
    frame = pd.DataFrame([{
        "scan_value": cell.scan_value,
        "omega_a": cell.omega_a,
        "order": cell.order.value,
        "lambda_crit": cell.lambda_crit,
        "omega_c": cell.omega_c,
    } for cell in cells])
    return {"phase_diagram.csv": frame}


def run_spectrum(config: ExperimentConfig) -> Frames:
    """Spektrum eksitasi dari minimizer global, atau sepanjang cabang histeresis."""
    if config.hysteresis:
        forward, backward = _sweeps(config)
        spectra = fluctuation_service.spectrum_along_hysteresis(config.params, forward, backward, config.threads)
        return {
            "spectrum_forward.csv": _spectrum_frame(spectra.forward),
            "spectrum_backward.csv": _spectrum_frame(spectra.backward),
            "spectrum_minimal.csv": _spectrum_frame(spectra.minimal),
        }
    branches = fluctuation_service.excitation_spectrum(config.params, _lambda_grid(config), config.threads)
    return {"spectrum.csv": _spectrum_frame(branches)}


def run_entangle(config: ExperimentConfig) -> Frames:
    """Negativitas logaritmik membran-transisi atom sepanjang grid λ."""
    n_bath_values = config.n_bath_list if config.n_bath_list is not None else [config.params.n_bath]
    points = fluctuation_service.entanglement_curve(
        config.params, _lambda_grid(config), n_bath_values, max_workers=config.threads
    )
    rows = []
    for point in points:
        row = {"n_bath": point.n_bath, "lambda": point.lambda_coll, "e_n": point.e_n}
        row.update({f"omega_{k + 1}": nu.real for k, nu in enumerate(point.nu)})
        row.update({f"decay_{k + 1}": -nu.imag for k, nu in enumerate(point.nu)})
        rows.append(row)
    return {"entangle.csv": pd.DataFrame(rows)}


def run_gpe(config: ExperimentConfig) -> Frames:
    """Ground state GPE pada λ konfigurasi: profil dan ringkasan fit."""
    field = gpe_service.solve_ground(config.params, config.n_grid, config.dtau, check_grid=config.check_grid)
    fit = gpe_service.fit_widths(field, strict=True)
    profile = pd.DataFrame({
        "z": field.grid,
        "re_psi_minus": field.psi_minus.real,
        "im_psi_minus": field.psi_minus.imag,
        "re_psi_plus": field.psi_plus.real,
        "im_psi_plus": field.psi_plus.imag,
    })
    summary = pd.DataFrame([{
        "lambda": config.params.lambda_coll,
        "energy": field.energy,
        "steps": field.steps,
        "re_alpha": field.alpha.real,
        "im_alpha": field.alpha.imag,
        "alpha_residual": field.alpha_residual,
        "sigma_minus": fit.sigma_minus,
        "sigma_plus": fit.sigma_plus,
        "gamma_fraction": fit.gamma_fraction,
        "minus_ok": fit.minus_ok,
        "plus_ok": fit.plus_ok,
    }])
    return {"gpe_profile.csv": profile, "gpe_summary.csv": summary}


def run_validate(config: ExperimentConfig) -> Frames:
    """Perbandingan GPE vs ansatz Gaussian untuk daftar λ."""
    rows = gpe_service.validate_ansatz(
        config.params, config.lambdas, config.n_grid, config.dtau, max_workers=config.threads
    )
    frame = pd.DataFrame([{
        "lambda": row.lambda_coll,
        "sigma_gpe": row.sigma_gpe,
        "sigma_gauss": row.sigma_gauss,
        "gamma_gpe": row.gamma_gpe,
        "gamma_gauss": row.gamma_gauss,
        "ok": row.ok,
        "message": row.message or "",
    } for row in rows])
    return {"validate.csv": frame}


COMMAND_HANDLERS: Dict[Command, Callable[[ExperimentConfig], Frames]] = {
    Command.STEADY: run_steady,
    Command.LANDAU: run_landau,
    Command.SWEEP: run_sweep,
    Command.PHASE_DIAGRAM: run_phase_diagram,
    Command.SPECTRUM: run_spectrum,
    Command.ENTANGLE: run_entangle,
    Command.GPE: run_gpe,
    Command.VALIDATE: run_validate,
}


def _sweeps(config: ExperimentConfig) -> Tuple[SweepResult, SweepResult]:
    forward = dynamics_service.adiabatic_sweep(
        config.params, config.lambda_lo, config.lambda_hi, config.n_steps, SweepDirection.FORWARD
    )
    backward = dynamics_service.adiabatic_sweep(
        config.params, config.lambda_lo, config.lambda_hi, config.n_steps, SweepDirection.BACKWARD
    )
    return forward, backward


def _lambda_grid(config: ExperimentConfig) -> List[float]:
    return [float(lam) for lam in np.linspace(config.lambda_lo, config.lambda_hi, config.n_lambda)]


def _sweep_frame(sweep: SweepResult) -> pd.DataFrame:
    return pd.DataFrame({
        "lambda": sweep.lambdas,
        "gamma_inf": sweep.gamma_inf,
        "re_alpha": [alpha.real for alpha in sweep.alpha_inf],
        "im_alpha": [alpha.imag for alpha in sweep.alpha_inf],
        "sigma_inf": sweep.sigma_inf,
        "converged": sweep.converged,
    }, columns=SWEEP_COLUMNS)


def _spectrum_frame(branches: List[SpectrumBranch]) -> pd.DataFrame:
    frame = pd.DataFrame({"lambda": branches[0].lambdas})
    for k, branch in enumerate(branches, start=1):
        frame[f"omega_{k}"] = branch.omega
        frame[f"decay_{k}"] = branch.decay
        frame[f"degenerate_{k}"] = branch.degenerate
    return frame


def _or_nan(value: Optional[float]) -> float:
    return float("nan") if value is None else value
