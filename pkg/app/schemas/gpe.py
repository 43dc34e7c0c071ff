from pydantic import BaseModel, Field
from typing import List, Optional
import numpy as np


class GpeField(BaseModel):
    """ Solusi ground state GPE dua komponen pada satu periode lattice. """
    grid: np.ndarray = Field(..., description="Titik z_j ∈ [−π/2, π/2), spasi h = π/n.")
    psi_minus: np.ndarray = Field(..., description="Amplitudo ψ₋(z_j).")
    psi_plus: np.ndarray = Field(..., description="Amplitudo ψ₊(z_j).")
    alpha: complex = Field(..., description="Amplitudo membran self-consistent.")
    energy: float = Field(..., description="Energi fungsional akhir.")
    steps: int = Field(..., description="Jumlah langkah imaginary time.")
    energy_trace: List[float] = Field(default_factory=list, description="Energi tiap check interval.")
    alpha_residual: float = Field(0.0, description="Residual persamaan stasioner membran.")

    @property
    def spacing(self) -> float:
        """Spasi grid h."""
        return float(np.pi / self.grid.size)

    @property
    def norm(self) -> float:
        """h·Σ(|ψ₋|² + |ψ₊|²)."""
        return float(self.spacing * np.sum(np.abs(self.psi_minus) ** 2 + np.abs(self.psi_plus) ** 2))

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class WidthFit(BaseModel):
    """ Hasil fit Gaussian per komponen. """
    sigma_minus: float = Field(..., description="Lebar fit komponen ψ₋ (0 jika gagal).")
    sigma_plus: float = Field(..., description="Lebar fit komponen ψ₊ (0 jika gagal).")
    gamma_fraction: float = Field(..., description="Populasi h·Σ|ψ₊|².", ge=0.0, le=1.0)
    minus_ok: bool = Field(True, description="Fit ψ₋ berhasil.")
    plus_ok: bool = Field(True, description="Fit ψ₊ berhasil.")

    class Config:
        frozen = True


class AnsatzComparison(BaseModel):
    """ Satu baris perbandingan GPE vs ansatz Gaussian. """
    lambda_coll: float = Field(..., description="Kopling √Nλ.")
    sigma_gpe: float = Field(..., description="Lebar dari fit GPE.")
    sigma_gauss: float = Field(..., description="Lebar σ₀ model Gaussian.")
    gamma_gpe: float = Field(..., description="√(populasi ψ₊) dari GPE.")
    gamma_gauss: float = Field(..., description="|γ₀| model Gaussian.")
    ok: bool = Field(True, description="False jika ada sub-langkah gagal.")
    message: Optional[str] = Field(None, description="Keterangan kegagalan.")

    class Config:
        frozen = True
