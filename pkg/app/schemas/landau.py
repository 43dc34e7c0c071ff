from pydantic import BaseModel, Field
from enum import Enum
from typing import List


class TransitionOrder(str, Enum):
    """ Orde transisi fase NQPT. """
    SECOND = "second"
    FIRST_SYMMETRIC = "first_symmetric"
    FIRST_ASYMMETRIC = "first_asymmetric"
    NONE = "none"


class CriticalMode(str, Enum):
    """ Cara menghitung kopling koeksistensi λ_s1 / λ_a1. """
    PAPER_FORMULA = "paper_formula"
    EXACT_NUMERIC = "exact_numeric"


class PhaseAxis(str, Enum):
    """ Sumbu scan diagram fase. """
    V = "V"
    NG = "Ng"


class LandauExpansion(BaseModel):
    """ Koefisien Landau a₀…a₆ beserta turunan implisit lebar dan ω_σ. """
    a0: float = Field(..., description="Energi di γ=0.")
    a1: float = Field(0.0, description="Selalu nol (γ=0 stasioner).")
    a2: float = Field(..., description="Koefisien kuadratik.")
    a3: float = Field(..., description="Koefisien kubik (∝ χ).")
    a4: float = Field(..., description="Koefisien kuartik.")
    a5: float = Field(..., description="Koefisien orde lima (∝ χ).")
    a6: float = Field(..., description="Koefisien orde enam.")
    sigma0: float = Field(..., description="Lebar di γ=0.", gt=0)
    d2_sigma: float = Field(..., description="σ₀″ (turunan kedua implisit).")
    d3_sigma: float = Field(..., description="σ₀‴ (turunan ketiga implisit).")
    d4_sigma: float = Field(..., description="σ₀⁽⁴⁾ (turunan keempat implisit).")
    omega_sigma: float = Field(..., description="Frekuensi breathing ω_σ di γ=0.")

    def sextic(self, gamma: float) -> float:
        """Nilai polinomial a₂γ² + a₃γ³ + … + a₆γ⁶ (tanpa a₀)."""
        return (
            self.a2 * gamma ** 2 + self.a3 * gamma ** 3 + self.a4 * gamma ** 4
            + self.a5 * gamma ** 5 + self.a6 * gamma ** 6
        )

    class Config:
        frozen = True


class PhaseDiagramCell(BaseModel):
    """ Satu sel diagram fase (Ω_a, V atau Ng). """
    omega_a: float = Field(..., description="Frekuensi atom Ω_a sel ini.")
    scan_value: float = Field(..., description="Nilai V atau Ng sel ini.")
    order: TransitionOrder = Field(..., description="Orde transisi hasil klasifikasi.")
    lambda_crit: float = Field(..., description="Kopling kritis relevan (NaN jika gagal).")
    omega_c: float = Field(float("nan"), description="Ω_c self-consistent untuk sel ini.")

    class Config:
        frozen = True


class SensitivityRow(BaseModel):
    """ Kopling kritis saat satu parameter yang tidak disebutkan divariasikan. """
    field: str = Field(..., description="Nama parameter yang divariasikan (gamma_m, v, ng).")
    value: float = Field(..., description="Nilai parameter.")
    order: TransitionOrder = Field(..., description="Orde transisi pada nilai ini.")
    lambda_crit: float = Field(..., description="Kopling kritis (NaN jika gagal).")

    class Config:
        frozen = True


class ExperimentalEstimate(BaseModel):
    """ Estimasi kopling kritis untuk parameter eksperimen beserta scan sensitivitas. """
    omega_a: float = Field(..., description="Ω_a yang dipakai.")
    omega_m: float = Field(..., description="Ω_m yang dipakai.")
    chi: float = Field(..., description="χ yang dipakai.")
    order: TransitionOrder = Field(..., description="Orde transisi.")
    lambda_crit: float = Field(..., description="Kopling kritis √Nλ_c.")
    sensitivity: List[SensitivityRow] = Field(default_factory=list, description="Scan parameter yang tidak disebutkan.")

    class Config:
        frozen = True
