"""
Modul konfigurasi untuk simulator NQPT hibrida atom-optomekanik.

File ini berisi default numerik (bracket, toleransi, ukuran grid),
level logging, dan format output CSV menggunakan Pydantic Settings.
Semua nilai dapat di-override lewat environment variable atau file .env.
"""

from pydantic_settings import BaseSettings
from typing import Tuple


class Settings(BaseSettings):
    """
    Konfigurasi utama simulator menggunakan Pydantic Settings.
    Otomatis membaca dari environment variables dan file .env
    """

    PROJECT_NAME: str = "Hybrid NQPT Simulator"
    VERSION: str = "0.1.0"
    LOG_LEVEL: str = "INFO"

    # Lebar kondensat
    WIDTH_BRACKET: Tuple[float, float] = (1e-3, 3.0)
    WIDTH_SCAN_POINTS: int = 600
    WIDTH_BISECTION_ITERATIONS: int = 80
    CRITICAL_LOG_MAX: float = 2.0

    # Steady state dan kopling kritis
    STEADY_GRID_POINTS: int = 2001
    STEADY_REFINE_TOL: float = 1e-10
    COUPLING_REL_TOL: float = 1e-8
    COEXISTENCE_ENERGY_TOL: float = 1e-12
    OMEGA_C_MAX_ITER: int = 500
    OMEGA_C_DAMPING: float = 0.5
    OMEGA_C_REL_TOL: float = 1e-8
    STATIONARY_GRADIENT_TOL: float = 1e-10

    # Dinamika mean-field
    RK4_DT_FACTOR: float = 0.01
    RK4_DT_LIMIT_FACTOR: float = 0.1
    NORM_DRIFT_LIMIT: float = 1e-6
    RELAX_TOLERANCE: float = 1e-9
    RELAX_T_MAX_FACTOR: float = 1e4
    RELAX_CHUNK_FACTOR: float = 50.0
    RELAX_RTOL: float = 1e-9
    RELAX_ATOL: float = 1e-12
    RELAX_POLISH_RADIUS: float = 0.05
    SWEEP_PERTURBATION: float = 1e-6
    JUMP_THRESHOLD: float = 0.05
    BRANCH_MATCH_TOL: float = 1e-4

    # Gross-Pitaevskii
    GPE_GRID_POINTS: int = 512
    GPE_DTAU: float = 1e-4
    GPE_MAX_STEPS: int = 100000
    GPE_ENERGY_TOL: float = 1e-12
    GPE_CHECK_INTERVAL: int = 100
    GPE_GRID_TOL: float = 1e-6
    GPE_SEED_FRACTION: float = 1e-4
    GPE_FIT_WINDOW: float = 0.7853981633974483
    GPE_MIN_COMPONENT_NORM: float = 1e-8

    # Fluktuasi
    SPECTRUM_MATCH_TOL: float = 1e-6
    STABLE_BRANCH_EPS: float = 1e-9
    DECOUPLING_TOL: float = 1e-12
    COMPLEX_ROOT_TOL: float = 1e-12

    # Output
    CSV_FLOAT_FORMAT: str = "%.17g"
    DEFAULT_THREADS: int = 1
    OUTPUT_DIR: str = "results"

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()


def get_settings() -> Settings:
    """Get settings instance."""
    return settings
