"""Complex fields on polar grids over the disc: energies, splitting, F-form.

Discretization (shared with profile1d so matched 1-D/2-D energies agree to
roundoff): radial kinetic terms on staggered s = r^2 midpoints, all node
terms with Simpson-in-s x trapezoid-in-theta weights, angular derivatives
spectral.  The rotation term -2 Omega Im(psi* d_theta psi) is exact for
band-limited fields, so the giant-vortex phase factor exp(i hatOmega theta)
costs no accuracy as long as hatOmega stays below Nyquist.
"""

import math
import struct
import weakref
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import fft, ifft
from scipy.interpolate import CubicSpline

from .errors import (DegenerateProfileError, GpvortexError, GridMismatchError)
from .grids import PolarGrid, polar_grid

NORM_TOL = 1e-8

_grid_arrays = weakref.WeakKeyDictionary()


def _cached(grid):
    """Per-grid precomputed arrays shared by the evaluators."""
    arrs = _grid_arrays.get(grid)
    if arrs is None:
        ds = grid.radial.ds
        arrs = {
            "m": np.fft.fftfreq(grid.Nt, d=1.0 / grid.Nt),
            "c_stag": (2.0 * grid.radial.s_mid / ds * grid.dtheta)[:, None],
            "inv_s": (1.0 / grid.s)[:, None],
            "w": grid.node_weights,
        }
        _grid_arrays[grid] = arrs
    return arrs


@dataclass
class DiscField:
    grid: PolarGrid
    values: np.ndarray = field(repr=False)    # (Nr, Nt) complex
    meta: str = "psi"                         # "psi" | "u" | "v"

    def copy(self, values=None, meta=None):
        return DiscField(grid=self.grid,
                         values=self.values.copy() if values is None else values,
                         meta=self.meta if meta is None else meta)

    def norm_sq(self):
        return float(np.sum(self.grid.node_weights * np.abs(self.values) ** 2))


def normalize_field(fld):
    fld.values /= math.sqrt(fld.norm_sq())
    return fld


def theta_derivative(values):
    """Spectral d/dtheta along axis 1."""
    Nt = values.shape[1]
    m = np.fft.fftfreq(Nt, d=1.0 / Nt)
    return ifft(fft(values, axis=1) * (1j * m), axis=1)


def _radial_kinetic(grid, values):
    """int |d_r psi|^2 r dr dtheta on staggered midpoints."""
    c = _cached(grid)["c_stag"]
    dv = np.diff(values, axis=0)
    return float(np.sum(c * np.abs(dv) ** 2))


def gp_energy_terms(fld, reg):
    """Pieces of the GP energy: radial kinetic, angular kinetic, rotation, quartic."""
    grid = fld.grid
    arrs = _cached(grid)
    w = arrs["w"]
    psi = fld.values
    dth = theta_derivative(psi)
    e_rad = _radial_kinetic(grid, psi)
    e_ang = float(np.sum(w * arrs["inv_s"] * np.abs(dth) ** 2))
    e_rot = -2.0 * reg.Omega * float(np.sum(w * np.imag(np.conj(psi) * dth)))
    dens = np.abs(psi) ** 2
    e_quart = float(np.sum(w * dens ** 2)) / reg.epsilon ** 2
    return {"radial": e_rad, "angular": e_ang, "rotation": e_rot,
            "quartic": e_quart}


def gp_energy(fld, reg, check_norm=True):
    """Discrete GP energy of a normalized field psi on the disc."""
    if fld.meta != "psi":
        raise GpvortexError(f"gp_energy expects meta='psi', got {fld.meta!r}")
    if check_norm and abs(fld.norm_sq() - 1.0) > NORM_TOL:
        raise GpvortexError(f"field not normalized: |psi|^2 = {fld.norm_sq():.12f}")
    t = gp_energy_terms(fld, reg)
    return t["radial"] + t["angular"] + t["rotation"] + t["quartic"]


def gp_gradient(fld, reg):
    """dE/dpsi* of the discrete GP energy (same quadratures as gp_energy)."""
    grid = fld.grid
    psi = fld.values
    arrs = _cached(grid)
    w = arrs["w"]
    c = arrs["c_stag"]
    grad = np.zeros_like(psi)
    dv = np.diff(psi, axis=0)
    grad[:-1] -= c * dv
    grad[1:] += c * dv
    m = arrs["m"]
    mult = (m[None, :] ** 2 * arrs["inv_s"] - 2.0 * reg.Omega * m[None, :])
    grad += w * ifft(mult * fft(psi, axis=1), axis=1)
    grad += w * (2.0 / reg.epsilon ** 2) * np.abs(psi) ** 2 * psi
    return grad


def make_ansatz(profile, Nt):
    """Giant-vortex field g(r) exp(i hatOmega theta) on a matching polar grid."""
    grid = polar_grid(profile.grid, Nt)
    phase = np.exp(1j * profile.hat_Omega * grid.theta)
    return DiscField(grid=grid, values=profile.g[:, None] * phase[None, :],
                     meta="psi")


def profile_on_polar_nodes(profile, grid):
    """Profile amplitude sampled on a polar grid's radial nodes.

    Exact when the nodes coincide; cubic spline in s otherwise.
    """
    pg = profile.grid
    if grid.Nr == pg.n and np.allclose(grid.s, pg.s_nodes, rtol=0, atol=1e-13):
        return profile.g.copy()
    spline = CubicSpline(pg.s_nodes, profile.g)
    s = np.clip(grid.s, pg.s_nodes[0], pg.s_nodes[-1])
    return spline(s)


def decompose_u(psi, profile):
    """u = psi exp(-i hatOmega theta) / g on the annulus part of psi's grid."""
    reg = profile.reg
    grid = psi.grid
    r_min = profile.grid.r_inner
    if grid.radial.r_inner >= r_min - 1e-12:
        sub, i0 = grid, 0
    else:
        sub, i0 = grid.subgrid(r_min)
    g = profile_on_polar_nodes(profile, sub)
    if np.any(np.abs(g) < 1e-300):
        raise DegenerateProfileError("profile amplitude below 1e-300 on the annulus")
    phase = np.exp(-1j * profile.hat_Omega * sub.theta)
    vals = psi.values[i0:, :] * phase[None, :] / g[:, None]
    return DiscField(grid=sub, values=vals, meta="u")


def recompose_psi(u, profile):
    """g u exp(i hatOmega theta) on u's grid (inverse of decompose_u)."""
    g = profile_on_polar_nodes(profile, u.grid)
    phase = np.exp(1j * profile.hat_Omega * u.grid.theta)
    return DiscField(grid=u.grid, values=g[:, None] * u.values * phase[None, :],
                     meta="psi")


def reduced_energy_terms(u, profile, reg):
    """Pieces of the reduced (splitting remainder) energy for u."""
    grid = u.grid
    pg_nodes = profile.grid
    if grid.Nr != pg_nodes.n or not np.allclose(grid.s, pg_nodes.s_nodes,
                                                rtol=0, atol=1e-12):
        raise GridMismatchError("u is not on the profile's radial nodes")
    g = profile.g
    w = grid.node_weights
    ds = grid.radial.ds
    vals = u.values
    c = (2.0 * grid.radial.s_mid / ds * grid.dtheta)[:, None]
    g_mid = (0.5 * (g[:-1] + g[1:]))[:, None]
    e_rad = float(np.sum(c * g_mid ** 2 * np.abs(np.diff(vals, axis=0)) ** 2))
    dth = theta_derivative(vals)
    g2col = (g ** 2)[:, None]
    e_ang = float(np.sum(w * g2col / grid.s[:, None] * np.abs(dth) ** 2))
    B = (reg.Omega * grid.r - profile.hat_Omega / grid.r)[:, None]
    mom = np.imag(np.conj(vals) * dth) / grid.r[:, None]
    e_mom = -2.0 * float(np.sum(w * g2col * B * mom))
    dev = (1.0 - np.abs(vals) ** 2) ** 2
    e_quart = float(np.sum(w * (g2col ** 2) * dev)) / reg.epsilon ** 2
    return {"kinetic_radial": e_rad, "kinetic_angular": e_ang,
            "momentum": e_mom, "quartic": e_quart}


def reduced_energy(u, profile, reg):
    t = reduced_energy_terms(u, profile, reg)
    return (t["kinetic_radial"] + t["kinetic_angular"] + t["momentum"]
            + t["quartic"])


def edge_momenta(values):
    """Discrete line integrals of (iu, du) on radial and angular edges.

    p_r[i, j]: edge (i,j)->(i+1,j); p_t[i, j]: edge (i,j)->(i,j+1 mod Nt).
    Circulations built from these telescope exactly (discrete Stokes).
    """
    up = np.roll(values, -1, axis=1)
    p_t = np.imag(np.conj(0.5 * (values + up)) * (up - values))
    p_r = np.imag(np.conj(0.5 * (values[:-1] + values[1:]))
                  * (values[1:] - values[:-1]))
    return p_r, p_t


def plaquette_circulation(values):
    """Circulation of (iu, du) around each plaquette, (Nr-1, Nt)."""
    p_r, p_t = edge_momenta(values)
    return p_r + p_t[1:, :] - np.roll(p_r, -1, axis=1) - p_t[:-1, :]


def ring_circulation(u, row=-1):
    """Spectral circulation oint (iu, d_tau u) dsigma on one grid ring."""
    vals = u.values[row, :]
    dth = theta_derivative(vals[None, :])[0]
    return float(np.sum(np.imag(np.conj(vals) * dth)) * u.grid.dtheta)


def f_form_energy(u, curve, profile, reg):
    """Energy in potential form: (bulk, boundary, quartic).

    bulk     = int g^2 |grad u|^2 + int F curl(iu, grad u)
    boundary = - oint F(1) (iu, d_tau u)
    quartic  = int g^4 (1 - |u|^2)^2 / eps^2
    Their sum approximates reduced_energy(u) (discrete Stokes identity).
    """
    if curve.radii.size != profile.grid.n:
        raise GridMismatchError("cost curve not on the profile grid")
    t = reduced_energy_terms(u, profile, reg)
    circ = plaquette_circulation(u.values)
    F_mid = 0.5 * (curve.F[:-1] + curve.F[1:])
    bulk = (t["kinetic_radial"] + t["kinetic_angular"]
            + float(np.sum(F_mid[:, None] * circ)))
    boundary = -float(curve.F[-1]) * ring_circulation(u, row=-1)
    return bulk, boundary, t["quartic"]


# GPVF binary field dump ----------------------------------------------------

GPVF_MAGIC = b"GPVF"
GPVF_VERSION = 1
_META_TAGS = {"psi": 0, "u": 1, "v": 2}
_TAGS_META = {v: k for k, v in _META_TAGS.items()}
_HEADER = struct.Struct("<4sIIIdddB")


def save_field(path, fld, reg):
    """Little-endian dump: header + Nr*Nt complex64 in r-major order."""
    header = _HEADER.pack(GPVF_MAGIC, GPVF_VERSION, fld.grid.Nr, fld.grid.Nt,
                          fld.grid.radial.r_inner, reg.epsilon, reg.omega0,
                          _META_TAGS[fld.meta])
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(fld.values, dtype=np.complex64).tobytes())


def load_field(path):
    """Read a GPVF dump; returns (DiscField, header dict)."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        magic, version, Nr, Nt, r0, eps, omega0, tag = _HEADER.unpack(raw)
        if magic != GPVF_MAGIC:
            raise GpvortexError(f"bad magic {magic!r} in {path}")
        if version != GPVF_VERSION:
            raise GpvortexError(f"unsupported GPVF version {version}")
        data = np.frombuffer(fh.read(Nr * Nt * 8), dtype=np.complex64)
    values = data.reshape(Nr, Nt).astype(np.complex128)
    from .grids import disc_grid
    radial = disc_grid(Nr, r0)
    fld = DiscField(grid=polar_grid(radial, Nt), values=values,
                    meta=_TAGS_META[int(tag)])
    header = {"Nr": Nr, "Nt": Nt, "r0": r0, "epsilon": eps, "omega0": omega0,
              "meta": _TAGS_META[int(tag)]}
    return fld, header
