"""
Hierarki error domain untuk simulator.

Setiap kelas membawa exit code tersendiri sehingga CLI dapat
memetakan kegagalan modul ke status proses yang berbeda-beda.
"""

from typing import Any, Optional


class SimulationError(Exception):
    """Base class untuk semua kegagalan numerik di simulator."""

    exit_code: int = 1


class DomainError(SimulationError, ValueError):
    """Input di luar domain valid (|γ| > 1, σ ≤ 0, parameter negatif, dst)."""

    exit_code = 2


class NoBracketError(SimulationError):
    """Residual lebar tidak berganti tanda di dalam bracket."""

    exit_code = 3


class NoRootError(SimulationError):
    """Persamaan implisit tidak punya solusi di interval yang diminta."""

    exit_code = 4


class NoConvergenceError(SimulationError):
    """
    Iterasi atau relaksasi tidak konvergen.

    Attributes:
        state: State terakhir sebelum menyerah (opsional)
    """

    exit_code = 5

    def __init__(self, message: str, state: Optional[Any] = None):
        super().__init__(message)
        self.state = state


class NonPositiveRadicandError(SimulationError):
    """Radikan frekuensi breathing tidak positif (lebar tidak stabil)."""

    exit_code = 6


class ModeMismatchError(SimulationError):
    """Parameter di luar jendela validitas mode perhitungan kopling."""

    exit_code = 7


class NoSecondaryMinimumError(SimulationError):
    """Polinomial Landau orde enam tidak punya minimum sekunder."""

    exit_code = 8


class StepTooLargeError(SimulationError):
    """Norm drift melebihi batas: langkah waktu terlalu besar."""

    exit_code = 9


class UnstableDriftError(SimulationError):
    """Matriks drift punya eigenvalue dengan bagian real ≥ 0."""

    exit_code = 10


class ComplexRootError(SimulationError):
    """Akar simplektik menjadi kompleks (kovarians tidak fisis)."""

    exit_code = 11


class FitFailedError(SimulationError):
    """Fit Gaussian gagal untuk komponen kondensat."""

    exit_code = 12


class GridTooCoarseError(SimulationError):
    """Energi berubah terlalu besar saat grid digandakan."""

    exit_code = 13


class ConfigError(Exception):
    """Base class untuk error konfigurasi CLI."""

    exit_code: int = 64


class ParseError(ConfigError):
    """
    Baris konfigurasi tidak valid.

    Attributes:
        line_number: Nomor baris (mulai dari 1), None untuk override dari flag
        key: Nama key yang bermasalah (jika diketahui)
    """

    exit_code = 65

    def __init__(self, message: str, line_number: Optional[int] = None, key: Optional[str] = None):
        location = f"baris {line_number}: " if line_number is not None else ""
        super().__init__(f"{location}{message}")
        self.line_number = line_number
        self.key = key


class UnknownKeyError(ConfigError):
    """Key konfigurasi tidak dikenal."""

    exit_code = 66


class MissingRequiredError(ConfigError):
    """Key wajib tidak ada di file maupun flag."""

    exit_code = 67
