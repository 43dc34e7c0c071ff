from pydantic import BaseModel, Field
from typing import List
import numpy as np


class BdgMatrix(BaseModel):
    """ Matriks stabilitas Bogoliubov-de Gennes M = [[H, G], [−G, −H*]]. """
    m: np.ndarray = Field(..., description="Matriks 6×6 kompleks.")
    h: np.ndarray = Field(..., description="Blok H 3×3 (simetris).")
    g: np.ndarray = Field(..., description="Blok G 3×3 (simetris, diagonal nol).")

    @classmethod
    def from_blocks(cls, h: np.ndarray, g: np.ndarray) -> "BdgMatrix":
        """Susun M dari blok H dan G."""
        m = np.block([[h, g], [-g, -h.conj()]])
        return cls(m=m, h=h, g=g)

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class SpectrumBranch(BaseModel):
    """ Satu cabang eksitasi kolektif ν(λ). """
    label: str = Field(..., description="Nama cabang (omega_1, omega_2, omega_3).")
    lambdas: List[float] = Field(..., description="Grid kopling.")
    nu: List[complex] = Field(..., description="Eigenvalue ν per λ.")
    degenerate: List[bool] = Field(default_factory=list, description="Flag DegenerateMatch per λ.")

    @property
    def omega(self) -> np.ndarray:
        """Frekuensi Re(ν)."""
        return np.array([value.real for value in self.nu])

    @property
    def decay(self) -> np.ndarray:
        """Laju peluruhan −Im(ν)."""
        return np.array([-value.imag for value in self.nu])

    class Config:
        frozen = True


class QuadratureCovariance(BaseModel):
    """ Matriks kovarians kuadratur, basis (q₁…q_n, p₁…p_n). """
    c: np.ndarray = Field(..., description="Matriks real simetris 2n×2n.")

    @property
    def n_modes(self) -> int:
        """Jumlah mode n."""
        return self.c.shape[0] // 2

    def symplectic_form(self) -> np.ndarray:
        """Matriks J = [[0, I], [−I, 0]] pada basis yang sama."""
        n = self.n_modes
        eye = np.eye(n)
        zero = np.zeros((n, n))
        return np.block([[zero, eye], [-eye, zero]])

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class HysteresisSpectrum(BaseModel):
    """ Spektrum sepanjang cabang maju, mundur, dan minimum global. """
    forward: List[SpectrumBranch] = Field(..., description="Tiga cabang dari sweep maju.")
    backward: List[SpectrumBranch] = Field(..., description="Tiga cabang dari sweep mundur.")
    minimal: List[SpectrumBranch] = Field(..., description="Tiga cabang dari minimizer global.")

    class Config:
        frozen = True


class EntanglementPoint(BaseModel):
    """ Negativitas logaritmik atom-membran pada satu λ. """
    lambda_coll: float = Field(..., description="Kopling √Nλ.")
    n_bath: float = Field(..., description="Okupasi termal N_m.")
    e_n: float = Field(..., description="Negativitas logaritmik E_N.", ge=0.0)
    nu: List[complex] = Field(..., description="Tiga eigenvalue fisis (terurut per cabang).")

    class Config:
        frozen = True
