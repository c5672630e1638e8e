"""Pure-numpy implementations of the hot kernels.

Same contracts as the compiled versions in ``_native.pyx``; selected at
import time when the extension is unavailable or disabled.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


def solve_tridiag_many(dl, d, du, b):
    """Solve a batch of independent tridiagonal systems by the Thomas algorithm.

    dl, d, du: (M, n) float64 sub/main/super diagonals (dl[:,0], du[:,-1] unused).
    b: (M, n) right-hand sides, real or complex.
    Systems must not require pivoting (diagonally dominant in our use).
    """
    dl = np.asarray(dl, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    du = np.asarray(du, dtype=np.float64)
    b = np.asarray(b)
    M, n = d.shape
    c = np.empty((M, n - 1), dtype=np.float64)
    x = np.empty_like(b)
    inv = 1.0 / d[:, 0]
    c[:, 0] = du[:, 0] * inv
    x[:, 0] = b[:, 0] * inv
    for i in range(1, n):
        inv = 1.0 / (d[:, i] - dl[:, i] * c[:, i - 1])
        if i < n - 1:
            c[:, i] = du[:, i] * inv
        x[:, i] = (b[:, i] - dl[:, i] * x[:, i - 1]) * inv
    for i in range(n - 2, -1, -1):
        x[:, i] -= c[:, i] * x[:, i + 1]
    return x


def wrap_angle(a):
    """Wrap angles to [-pi, pi)."""
    return np.mod(a + np.pi, TWO_PI) - np.pi


def plaquette_winding(phase):
    """Integer winding per plaquette of a phase field on a polar grid.

    phase: (Nr, Nt) phases; axis 1 is periodic.  Plaquette (i, j) has corners
    (i,j) -> (i+1,j) -> (i+1,j+1) -> (i,j+1), traversed in that order.
    Returns an (Nr-1, Nt) int32 array of winding numbers.
    """
    phase = np.asarray(phase, dtype=np.float64)
    dr = wrap_angle(np.diff(phase, axis=0))                    # radial edges
    dt = wrap_angle(np.roll(phase, -1, axis=1) - phase)        # angular edges
    circ = dr + dt[1:, :] - np.roll(dr, -1, axis=1) - dt[:-1, :]
    return np.rint(circ / TWO_PI).astype(np.int32)
