from pydantic import BaseModel, Field, model_validator
from enum import Enum
from typing import List, Optional

from app.core.config import settings

from .landau import CriticalMode, PhaseAxis
from .model import SystemParams


class Command(str, Enum):
    """ Jenis eksperimen yang bisa dijalankan dari CLI. """
    STEADY = "steady"
    LANDAU = "landau"
    SWEEP = "sweep"
    PHASE_DIAGRAM = "phase-diagram"
    SPECTRUM = "spectrum"
    ENTANGLE = "entangle"
    GPE = "gpe"
    VALIDATE = "validate"


class ExperimentConfig(BaseModel):
    """ Konfigurasi lengkap satu run CLI. """
    command: Command = Field(..., description="Eksperimen yang dijalankan.")
    params: SystemParams = Field(..., description="Parameter sistem.")

    # Grid kopling
    lambda_lo: Optional[float] = Field(None, description="Batas bawah λ (sweep, spectrum, entangle).", allow_inf_nan=False)
    lambda_hi: Optional[float] = Field(None, description="Batas atas λ.", allow_inf_nan=False)
    n_steps: int = Field(100, description="Jumlah titik sweep adiabatik.", ge=10)
    n_lambda: int = Field(41, description="Jumlah titik grid λ untuk spectrum/entangle.", ge=2)
    lambdas: Optional[List[float]] = Field(None, description="Daftar λ eksplisit (validate).")
    n_bath_list: Optional[List[float]] = Field(None, description="Daftar N_m untuk entangle.")
    hysteresis: bool = Field(False, description="Spectrum sepanjang cabang sweep maju/mundur.")

    # Diagram fase
    axis: PhaseAxis = Field(PhaseAxis.V, description="Sumbu scan diagram fase.")
    scan_lo: Optional[float] = Field(None, description="Batas bawah V atau Ng.", allow_inf_nan=False)
    scan_hi: Optional[float] = Field(None, description="Batas atas V atau Ng.", allow_inf_nan=False)
    n_scan: int = Field(21, description="Jumlah titik sumbu scan.", ge=2)
    omega_a_lo: Optional[float] = Field(None, description="Batas bawah Ω_a.", allow_inf_nan=False)
    omega_a_hi: Optional[float] = Field(None, description="Batas atas Ω_a.", allow_inf_nan=False)
    n_omega_a: int = Field(21, description="Jumlah titik sumbu Ω_a.", ge=2)

    # GPE
    n_grid: Optional[int] = Field(None, description="Titik grid GPE (default dari settings).", ge=64)
    dtau: Optional[float] = Field(None, description="Langkah imaginary time.", gt=0, allow_inf_nan=False)
    check_grid: bool = Field(False, description="Cek konvergensi grid dengan 2n titik.")

    mode: CriticalMode = Field(CriticalMode.EXACT_NUMERIC, description="Mode λ_s1/λ_a1.")
    threads: int = Field(settings.DEFAULT_THREADS, description="Jumlah worker proses.", ge=1)
    out: str = Field(settings.OUTPUT_DIR, description="Direktori output CSV.")

    @model_validator(mode="after")
    def check_ranges(self) -> "ExperimentConfig":
        """Setiap rentang yang diisi harus lo < hi."""
        for lo_name, hi_name in (("lambda_lo", "lambda_hi"), ("scan_lo", "scan_hi"), ("omega_a_lo", "omega_a_hi")):
            lo, hi = getattr(self, lo_name), getattr(self, hi_name)
            if lo is not None and hi is not None and not lo < hi:
                raise ValueError(f"{lo_name} harus < {hi_name} (diberikan {lo}, {hi})")
        return self

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {
                "command": "sweep",
                "params": {
                    "v": 100.0,
                    "ng": 1.0,
                    "omega_a": 5000.0,
                    "omega_m": 10000.0,
                    "gamma_m": 1000.0,
                    "chi": 0.0,
                    "lambda_coll": 0.0,
                },
                "lambda_lo": 50.0,
                "lambda_hi": 120.0,
                "n_steps": 100,
                "out": "results/first_order",
            }
        }
