from pydantic import BaseModel, Field
from typing import Tuple
import numpy as np


class SystemParams(BaseModel):
    """ Parameter fisis sistem hibrida, semua frekuensi dalam satuan ω_R. """
    v: float = Field(..., description="Kedalaman lattice V.", gt=0, allow_inf_nan=False)
    ng: float = Field(..., description="Kekuatan interaksi kolektif Ng.", ge=0, allow_inf_nan=False)
    omega_a: float = Field(..., description="Frekuensi transisi atom Ω_a.", gt=0, allow_inf_nan=False)
    omega_m: float = Field(..., description="Frekuensi membran Ω_m.", gt=0, allow_inf_nan=False)
    gamma_m: float = Field(..., description="Redaman membran Γ_m.", ge=0, allow_inf_nan=False)
    chi: float = Field(..., description="Asimetri kopling χ = μ₊/μ₋.", allow_inf_nan=False)
    lambda_coll: float = Field(..., description="Kopling kolektif atom-membran √N·λ.", ge=0, allow_inf_nan=False)
    n_bath: float = Field(0.0, description="Okupasi termal lingkungan N_m.", ge=0, allow_inf_nan=False)
    omega_r: float = Field(1.0, description="Frekuensi recoil ω_R (satuan semua frekuensi).", gt=0, allow_inf_nan=False)

    @property
    def omega_m_prime(self) -> float:
        """Frekuensi membran primed Ω_m′ = Ω_m + Γ_m²/Ω_m."""
        return self.omega_m + self.gamma_m ** 2 / self.omega_m

    @property
    def lambda_omega(self) -> float:
        """Laju kopling kolektif λ_Ω = √(Ω_a·Ω_m′)."""
        return float(np.sqrt(self.omega_a * self.omega_m_prime))

    @property
    def nonequilibrium_coupling(self) -> float:
        """K = (√Nλ)²/Ω_m′, prefaktor suku kopling di potensial tereduksi."""
        return self.lambda_coll ** 2 / self.omega_m_prime

    def with_coupling(self, lambda_coll: float) -> "SystemParams":
        """Salinan parameter dengan kopling kolektif baru."""
        return self.model_copy(update={"lambda_coll": float(lambda_coll)})

    def with_updates(self, **changes: float) -> "SystemParams":
        """Salinan parameter dengan beberapa field diganti (divalidasi ulang)."""
        return SystemParams(**{**self.model_dump(), **changes})

    def scaled(self, factor: float) -> "SystemParams":
        """Kalikan semua parameter berdimensi frekuensi dengan konstanta yang sama."""
        return self.with_updates(
            v=self.v * factor,
            ng=self.ng * factor,
            omega_a=self.omega_a * factor,
            omega_m=self.omega_m * factor,
            gamma_m=self.gamma_m * factor,
            lambda_coll=self.lambda_coll * factor,
            omega_r=self.omega_r * factor,
        )

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {
                "v": 100.0,
                "ng": 1.0,
                "omega_a": 50.0,
                "omega_m": 100.0,
                "gamma_m": 10.0,
                "chi": 0.0,
                "lambda_coll": 30.0,
                "n_bath": 0.0,
                "omega_r": 1.0
            }
        }


class MeanFieldState(BaseModel):
    """ Variabel dinamis persamaan kumulan (α, γ₋, γ₊, σ, σ̇). """
    alpha: complex = Field(..., description="Amplitudo membran terskala α.")
    gamma_minus: complex = Field(..., description="Amplitudo okupasi γ₋.")
    gamma_plus: complex = Field(..., description="Amplitudo okupasi γ₊.")
    sigma: float = Field(..., description="Lebar kondensat σ.", gt=0)
    sigma_dot: float = Field(0.0, description="Kecepatan lebar σ̇ = 4ω_R ησ.")

    @property
    def norm(self) -> float:
        """|γ₋|² + |γ₊|²."""
        return abs(self.gamma_minus) ** 2 + abs(self.gamma_plus) ** 2

    @property
    def signed_gamma(self) -> float:
        """Polarisasi real bertanda: |γ₊| dengan tanda Re(γ₊*γ₋)."""
        overlap = (self.gamma_plus.conjugate() * self.gamma_minus).real
        return abs(self.gamma_plus) * (-1.0 if overlap < 0 else 1.0)

    def to_vector(self) -> np.ndarray:
        """Vektor kompleks [α, γ₋, γ₊, σ, σ̇] untuk integrator."""
        return np.array(
            [self.alpha, self.gamma_minus, self.gamma_plus, self.sigma, self.sigma_dot],
            dtype=complex,
        )

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "MeanFieldState":
        """Kebalikan dari to_vector."""
        return cls(
            alpha=complex(y[0]),
            gamma_minus=complex(y[1]),
            gamma_plus=complex(y[2]),
            sigma=float(y[3].real),
            sigma_dot=float(y[4].real),
        )

    class Config:
        frozen = True


class SteadyState(BaseModel):
    """ Konfigurasi minimum global (α₀, γ₀, σ₀, E₀). """
    alpha0: complex = Field(..., description="Amplitudo membran steady state α₀.")
    gamma0: float = Field(..., description="Polarisasi real γ₀.", ge=-1.0, le=1.0)
    sigma0: float = Field(..., description="Lebar steady state σ₀.", gt=0)
    energy0: float = Field(..., description="Energi E[γ₀, σ₀].")

    def to_mean_field_state(self) -> MeanFieldState:
        """State mean-field dengan γ₋ = √(1−γ₀²), γ₊ = γ₀ dan σ̇ = 0."""
        return MeanFieldState(
            alpha=self.alpha0,
            gamma_minus=complex(np.sqrt(max(0.0, 1.0 - self.gamma0 ** 2))),
            gamma_plus=complex(self.gamma0),
            sigma=self.sigma0,
            sigma_dot=0.0,
        )

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {
                "alpha0": "0.09+0.009j",
                "gamma0": 0.42,
                "sigma0": 0.33,
                "energy0": -26.1
            }
        }


class EnergySurface(BaseModel):
    """ Permukaan energi E(γ) = E[γ, σ₀(γ)] pada grid γ uniform. """
    gammas: np.ndarray = Field(..., description="Grid γ di [−1, 1].")
    energies: np.ndarray = Field(..., description="E(γ) per titik grid.")
    sigmas: np.ndarray = Field(..., description="σ₀(γ) per titik grid.")

    def as_pairs(self) -> Tuple[Tuple[float, float], ...]:
        """Daftar pasangan (γ, E)."""
        return tuple(zip(self.gammas.tolist(), self.energies.tolist()))

    class Config:
        arbitrary_types_allowed = True
        frozen = True
