"""
Solver sistem tridiagonal siklik (boundary periodik).

Matriks berbentuk

    b[0] c[0]                 a[0]
    a[1] b[1] c[1]
         ...  ...  ...
                  a[n-1] b[n-1] c[n-1]
    c[n-1]                                  ← sudut kiri bawah

yaitu a[j] mengalikan x[j-1] dan c[j] mengalikan x[j+1] dengan indeks
mod n. Diselesaikan dengan satu panggilan scipy.linalg.solve_banded
untuk dua right-hand side sekaligus plus koreksi Sherman-Morrison.
"""

from typing import Union

import numpy as np
from scipy.linalg import solve_banded

Coefficient = Union[float, complex, np.ndarray]


def solve_cyclic_tridiagonal(
    lower: Coefficient,
    diag: Coefficient,
    upper: Coefficient,
    rhs: np.ndarray,
) -> np.ndarray:
    """
    Selesaikan T x = rhs untuk matriks tridiagonal siklik T.

    Args:
        lower: a[j], koefisien x[j-1] di baris j (skalar atau array panjang n)
        diag: b[j], diagonal utama
        upper: c[j], koefisien x[j+1] di baris j
        rhs: Right-hand side panjang n (real atau kompleks)

    Returns:
        np.ndarray: Solusi x

    Raises:
        ValueError: Jika n < 3
    """
    n = rhs.shape[0]
    if n < 3:
        raise ValueError(f"Sistem siklik butuh minimal 3 baris, diberikan n={n}")

    dtype = np.result_type(rhs, np.asarray(lower), np.asarray(diag), np.asarray(upper))
    a = np.broadcast_to(np.asarray(lower, dtype=dtype), (n,))
    b = np.array(np.broadcast_to(np.asarray(diag, dtype=dtype), (n,)))
    c = np.broadcast_to(np.asarray(upper, dtype=dtype), (n,))

    corner_low = c[n - 1]
    corner_high = a[0]
    shift = -b[0]
    b[0] = b[0] - shift
    b[n - 1] = b[n - 1] - corner_low * corner_high / shift

    banded = np.zeros((3, n), dtype=dtype)
    banded[0, 1:] = c[:-1]
    banded[1, :] = b
    banded[2, :-1] = a[1:]

    u = np.zeros(n, dtype=dtype)
    u[0] = shift
    u[n - 1] = corner_low

    solutions = solve_banded((1, 1), banded, np.column_stack([rhs.astype(dtype), u]))
    y = solutions[:, 0]
    q = solutions[:, 1]

    v_dot_y = y[0] + corner_high / shift * y[n - 1]
    v_dot_q = q[0] + corner_high / shift * q[n - 1]
    return y - (v_dot_y / (1.0 + v_dot_q)) * q


def apply_cyclic_tridiagonal(
    lower: Coefficient,
    diag: Coefficient,
    upper: Coefficient,
    x: np.ndarray,
) -> np.ndarray:
    """Hitung T x untuk matriks tridiagonal siklik yang sama (pakai np.roll)."""
    return lower * np.roll(x, 1) + diag * x + upper * np.roll(x, -1)
