"""Vortex cost function: potential F, cost H, TF analogues, critical scan.

F(r) = 2 int_{R_<}^r g^2(s) B(s) ds with B(r) = Omega r - hatOmega / r is the
potential-energy gain of a unit vortex at radius r; the cost of its core is
(1/2) g^2 |log eps|.  H = (1/2) g^2 |log eps| - |F| positive on the bulk means
single vortices are unfavorable (giant-vortex phase).  The signed variant
(1/2) g^2 |log eps| + F is emitted alongside for reference.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from . import profile1d
from . import regime as rg
from .errors import GpvortexError
from .grids import annulus_grid

NEAR_CRITICAL_MARGIN = 0.05


@dataclass
class CostCurve:
    radii: np.ndarray = field(repr=False)
    g2: np.ndarray = field(repr=False)      # density samples (g^2 or rho_TF)
    B: np.ndarray = field(repr=False)       # azimuthal field Omega r - hatOmega/r
    F: np.ndarray = field(repr=False)
    H: np.ndarray = field(default=None, repr=False)         # cost, unsigned-|F| form
    H_signed: np.ndarray = field(default=None, repr=False)  # 1/2 g^2|log eps| + F
    source: str = ""
    omega: int = 0
    hat_Omega: int = 0
    min_bulk: float = math.nan       # min of H over r >= R_>
    argmin_bulk: float = math.nan


def _cumulative_F(s_nodes, g2, B_of_r):
    """2 int g^2 B dr as a cumulative Simpson integral on the s = r^2 grid."""
    r = np.sqrt(s_nodes)
    integrand = g2 * B_of_r / r      # 2 g^2 B dr = g^2 B / sqrt(s) ds
    return cumulative_simpson(integrand, x=s_nodes, initial=0.0)


def potential_F(profile):
    """CostCurve with F for a converged annulus (or disc) profile."""
    reg = profile.reg
    grid = profile.grid
    r = grid.nodes
    B = reg.Omega * r - profile.hat_Omega / r
    g2 = profile.g ** 2
    F = _cumulative_F(grid.s_nodes, g2, B)
    return CostCurve(radii=r, g2=g2, B=B, F=F, source="gp",
                     omega=profile.omega, hat_Omega=profile.hat_Omega)


def cost_H(profile, curve):
    """Fill H (and the signed variant) on the curve; track the bulk minimum."""
    reg = profile.reg
    if curve.radii.size != profile.grid.n or curve.source != "gp":
        raise GpvortexError("curve was not built from this profile")
    half_core = 0.5 * curve.g2 * reg.log_eps
    curve.H = half_core - np.abs(curve.F)
    curve.H_signed = half_core + curve.F
    bulk = curve.radii >= reg.R_greater
    i = int(np.argmin(curve.H[bulk]))
    curve.min_bulk = float(curve.H[bulk][i])
    curve.argmin_bulk = float(curve.radii[bulk][i])
    return curve


def tf_curve(reg, n=4097, omega=None):
    """TF analogue curve: rho_TF density and F^TF with omega = round(omega_tf)."""
    if omega is None:
        omega = int(round(rg.omega_tf(reg)))
    hOm = reg.hat_Omega(omega)
    grid = annulus_grid(reg, n)
    r = grid.nodes
    B = reg.Omega * r - hOm / r
    rho = rg.tf_density(reg, r)
    F = _cumulative_F(grid.s_nodes, rho, B)
    curve = CostCurve(radii=r, g2=rho, B=B, F=F, source="tf",
                      omega=omega, hat_Omega=hOm)
    half_core = 0.5 * rho * reg.log_eps
    curve.H = half_core - np.abs(F)
    curve.H_signed = half_core + F
    bulk = r >= reg.R_greater
    i = int(np.argmin(curve.H[bulk]))
    curve.min_bulk = float(curve.H[bulk][i])
    curve.argmin_bulk = float(r[bulk][i])
    return curve


Z_MAX = 2.0 / math.sqrt(math.pi)


def tf_cost(reg, z):
    """Rescaled TF cost 3 Omega0 - 2 z (2/sqrt(pi) - z) on z in [0, 2/sqrt(pi)].

    Leading term only; the O(eps |log eps|) correction is omitted.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0.0) or np.any(z > Z_MAX + 1e-15):
        raise GpvortexError(f"z outside [0, {Z_MAX:.6f}]")
    val = 3.0 * reg.omega0 - 2.0 * z * (Z_MAX - z)
    return val if val.ndim else float(val)


def tf_cost_min(omega0):
    """Analytic minimum of the rescaled cost: 3 Omega0 - 2/pi (at z = 1/sqrt(pi))."""
    return 3.0 * omega0 - 2.0 / math.pi


@dataclass
class ScanRow:
    epsilon: float
    omega0: float
    min_H: float            # bulk minimum of the GP-profile cost (nan if no hole)
    min_H_tf: float         # bulk minimum of the rescaled TF cost z*Htilde/(12 eps)
    min_H_tilde: float      # min of the rescaled cost itself
    predicted: float        # 3 Omega0 - 2/pi
    near_critical: bool
    signs_agree: bool       # sign(min_H_tf) vs predicted; includes min_H when defined


def critical_scan(pairs, n=1025, opts=None):
    """Cost-function scan over (epsilon, Omega0) pairs.

    For each pair: the bulk minimum of H from the omega_0 annulus profile
    (hole regimes only), the bulk minimum of the rescaled TF cost, and the
    predicted sign of 3 Omega0 - 2/pi.  Pairs within NEAR_CRITICAL_MARGIN of
    the critical constant are flagged and excluded from sign assertions.
    """
    rows = []
    for eps, om0 in pairs:
        reg = rg.make_regime(eps, om0, require_hole=False)
        predicted = tf_cost_min(om0)
        near = abs(predicted) < NEAR_CRITICAL_MARGIN
        # rescaled TF cost on the bulk range of z
        if reg.has_hole:
            z_lo = reg.eps_Omega * (reg.R_greater ** 2 - reg.R_h ** 2)
        else:
            z_lo = 1e-6
        z = np.linspace(min(z_lo, Z_MAX), Z_MAX, 20001)
        h_tilde = 3.0 * om0 - 2.0 * z * (Z_MAX - z)
        h_tf = z * h_tilde / (12.0 * eps)
        min_H_tf = float(h_tf.min())
        min_H_tilde = float(h_tilde.min())
        min_H = math.nan
        if reg.has_hole:
            om_star, prof, _ = profile1d.optimize_phase(
                reg, annulus_grid(reg, n), opts=opts)
            curve = cost_H(prof, potential_F(prof))
            min_H = curve.min_bulk
        if near:
            agree = True
        else:
            agree = (min_H_tf > 0) == (predicted > 0)
            if not math.isnan(min_H):
                agree = agree and ((min_H > 0) == (predicted > 0))
        rows.append(ScanRow(epsilon=float(eps), omega0=float(om0),
                            min_H=min_H, min_H_tf=min_H_tf,
                            min_H_tilde=min_H_tilde, predicted=predicted,
                            near_critical=near, signs_agree=agree))
    return rows
