from pydantic import BaseModel, Field
from enum import Enum
from typing import List, Optional
import numpy as np

from .model import MeanFieldState, SystemParams


class SweepDirection(str, Enum):
    """ Arah sweep kopling adiabatik. """
    FORWARD = "forward"
    BACKWARD = "backward"


class SweepResult(BaseModel):
    """ Cabang solusi jangka panjang sepanjang sweep λ. """
    params: SystemParams = Field(..., description="Parameter dasar sweep (λ diganti per titik).")
    direction: SweepDirection = Field(..., description="Arah sweep.")
    lambdas: List[float] = Field(..., description="Nilai √Nλ sesuai urutan sweep.")
    gamma_inf: List[float] = Field(..., description="|γ₊|∞ per λ.")
    alpha_inf: List[complex] = Field(..., description="α∞ per λ.")
    sigma_inf: List[float] = Field(..., description="σ∞ per λ.")
    converged: List[bool] = Field(..., description="Flag konvergensi relaksasi per λ.")
    states: List[MeanFieldState] = Field(..., description="State akhir per λ.")

    def ascending(self) -> "SweepResult":
        """Salinan dengan urutan λ menaik (untuk membandingkan dua arah)."""
        order = np.argsort(self.lambdas, kind="stable")
        return self.model_copy(update={
            "lambdas": [self.lambdas[i] for i in order],
            "gamma_inf": [self.gamma_inf[i] for i in order],
            "alpha_inf": [self.alpha_inf[i] for i in order],
            "sigma_inf": [self.sigma_inf[i] for i in order],
            "converged": [self.converged[i] for i in order],
            "states": [self.states[i] for i in order],
        })

    class Config:
        frozen = True


class JumpPoints(BaseModel):
    """ Titik lompatan histeresis maju/mundur beserta pembanding teoretis. """
    lambda_f: float = Field(..., description="Lompatan maju λ_F.")
    lambda_b: float = Field(..., description="Lompatan mundur λ_B.")
    jump_found: bool = Field(True, description="False jika tidak ada lompatan (transisi kontinu).")
    lambda_b_landau: Optional[float] = Field(None, description="λ_B dari kondisi Landau.")
    lambda_b_spinodal: Optional[float] = Field(None, description="λ_B dari spinodal permukaan energi eksak.")

    class Config:
        frozen = True
