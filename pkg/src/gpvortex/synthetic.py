"""Synthetic fields: planted vortices and smooth random test fields."""

import math

import numpy as np

from .field2d import DiscField


def _cartesian(grid):
    r = grid.r[:, None]
    th = grid.theta[None, :]
    return r * np.cos(th), r * np.sin(th)


def vortex_factor(grid, center, degree=1, core=0.01):
    """Unit-modulus-at-infinity factor with a zero of given degree.

    center: (r, theta).  The factor is (zeta / sqrt(|zeta|^2 + core^2))^|d|
    (conjugated for d < 0), smooth everywhere, |.| -> 1 over the core scale.
    """
    x, y = _cartesian(grid)
    r0, th0 = center
    zeta = (x - r0 * math.cos(th0)) + 1j * (y - r0 * math.sin(th0))
    base = zeta / np.sqrt(np.abs(zeta) ** 2 + core ** 2)
    d = int(degree)
    out = base ** abs(d)
    return np.conj(out) if d < 0 else out


def planted_vortex_field(grid, vortices, core=0.01, meta="u"):
    """Product of vortex factors: [((r, theta), degree), ...]."""
    vals = np.ones((grid.Nr, grid.Nt), dtype=complex)
    for center, degree in vortices:
        vals *= vortex_factor(grid, center, degree, core)
    return DiscField(grid=grid, values=vals, meta=meta)


def smooth_field(grid, seed=0, n_modes=3, amp=0.2, phase_amp=0.6):
    """Random smooth unit-scale field with Neumann-compatible radial factors.

    Low angular modes with radial envelopes cos(k pi (s - s0) / (s1 - s0)),
    whose radial derivative vanishes at both ends of the domain; amplitudes
    drawn from a seeded RNG.
    """
    rng = np.random.default_rng(seed)
    s = grid.s
    s0, s1 = s[0], s[-1]
    xi = (s - s0) / (s1 - s0)
    vals = np.ones((grid.Nr, grid.Nt), dtype=complex)
    phase = np.zeros((grid.Nr, grid.Nt))
    mag = np.zeros((grid.Nr, grid.Nt))
    for m in range(0, n_modes + 1):
        for k in range(0, n_modes + 1):
            radial = np.cos(k * math.pi * xi)[:, None]
            ang = (rng.normal() * np.cos(m * grid.theta)
                   + rng.normal() * np.sin(m * grid.theta))[None, :]
            phase += phase_amp / (1 + m + k) * radial * ang
            ang2 = (rng.normal() * np.cos(m * grid.theta)
                    + rng.normal() * np.sin(m * grid.theta))[None, :]
            mag += amp / (1 + m + k) ** 2 * radial * ang2
    vals = (1.0 + mag) * np.exp(1j * phase)
    return DiscField(grid=grid, values=vals, meta="u")


def smooth_bump(grid, center, width):
    """C^1 bump phi with phi(center) = 1, compactly supported, grad(center)=0."""
    x, y = _cartesian(grid)
    r0, th0 = center
    d2 = (x - r0 * math.cos(th0)) ** 2 + (y - r0 * math.sin(th0)) ** 2
    t = np.clip(d2 / width ** 2, 0.0, 1.0)
    return (1.0 - t) ** 2 * (1.0 + 2.0 * t)   # smoothstep-like, C^1 at edge
