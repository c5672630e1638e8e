"""Asymptotic-regime bookkeeping and closed-form Thomas-Fermi quantities.

Scaling conventions: coupling 1/eps^2, angular velocity
Omega = Omega0 / (eps^2 |log eps|) on the unit disc.  The TF density develops
a central hole of radius R_h once eps*Omega >= 2/sqrt(pi); every derived
radius below assumes that hole unless the regime was built with
``require_hole=False``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, GpvortexError, NoHoleError

SQRT_PI = math.sqrt(math.pi)
HOLE_THRESHOLD = 2.0 / SQRT_PI          # minimal eps*Omega for a TF hole
CRITICAL_OMEGA0 = 2.0 / (3.0 * math.pi)  # giant-vortex transition constant


@dataclass(frozen=True)
class Regime:
    epsilon: float
    omega0: float
    Omega: float
    log_eps: float          # |log eps|
    Omega_int: int          # floor(Omega)
    R_h: float              # TF hole radius (nan when no hole)
    R_less: float           # R_h - eps^(8/7)
    R_greater: float        # R_h + eps/|log eps|

    @property
    def has_hole(self):
        return not math.isnan(self.R_h)

    @property
    def eps_Omega(self):
        return self.epsilon * self.Omega

    def hat_Omega(self, omega):
        """Integer giant-vortex winding floor(Omega) - omega."""
        return self.Omega_int - int(omega)


@dataclass(frozen=True)
class TfReport:
    mu_tf: float        # TF chemical potential, -Omega^2 R_h^2
    e_tf: float         # TF ground-state energy
    rho_sup: float      # rho_TF(1) = sup of the TF density
    hole_radius: float


@dataclass(frozen=True)
class HatTfReport:
    omega: int
    hat_Omega: int
    hat_R: float        # inner support radius of the omega-shifted TF density
    hat_mu: float
    hat_e: float
    residual: float     # residual of the normalization condition at the root


def make_regime(epsilon, omega0, require_hole=True):
    """Build the parameter bundle; rejects regimes without a TF hole by default."""
    if not 0.0 < epsilon < 1.0:
        raise GpvortexError(f"epsilon must lie in (0,1), got {epsilon}")
    if omega0 <= 0.0:
        raise GpvortexError(f"omega0 must be positive, got {omega0}")
    log_eps = -math.log(epsilon)
    Omega = omega0 / (epsilon ** 2 * log_eps)
    eps_Om = epsilon * Omega
    if eps_Om < HOLE_THRESHOLD:
        if require_hole:
            raise NoHoleError(
                "no hole: below TF hole threshold "
                f"(eps*Omega = {eps_Om:.6g} < 2/sqrt(pi) = {HOLE_THRESHOLD:.6g})")
        R_h = R_less = R_greater = math.nan
    else:
        R_h = math.sqrt(1.0 - HOLE_THRESHOLD / eps_Om)
        R_less = R_h - epsilon ** (8.0 / 7.0)
        R_greater = R_h + epsilon / log_eps
        if not R_less < R_h < R_greater < 1.0:
            raise GpvortexError(
                f"degenerate radii: R_<={R_less}, R_h={R_h}, R_>={R_greater}")
    return Regime(epsilon=float(epsilon), omega0=float(omega0), Omega=Omega,
                  log_eps=log_eps, Omega_int=int(math.floor(Omega)),
                  R_h=R_h, R_less=R_less, R_greater=R_greater)


def tf_density(reg, r):
    """TF density (eps^2 Omega^2 / 2) [r^2 - R_h^2]_+ ; zero inside the hole."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0) or np.any(r > 1.0):
        raise GpvortexError("radius outside [0, 1]")
    if not reg.has_hole:
        raise NoHoleError("tf_density requires a regime with a hole")
    val = 0.5 * (reg.epsilon * reg.Omega) ** 2 * np.clip(r ** 2 - reg.R_h ** 2, 0.0, None)
    return val if val.ndim else float(val)


def tf_report(reg):
    """Closed forms for the TF ground state: chemical potential, energy, sup."""
    if not reg.has_hole:
        raise NoHoleError("tf_report requires a regime with a hole")
    Om = reg.Omega
    mu = -Om ** 2 * reg.R_h ** 2
    e = -Om ** 2 * (1.0 - 4.0 / (3.0 * SQRT_PI * reg.epsilon * Om))
    rho_sup = reg.epsilon * Om / SQRT_PI   # = tf_density at r = 1
    return TfReport(mu_tf=mu, e_tf=e, rho_sup=rho_sup, hole_radius=reg.R_h)


def omega_tf(reg):
    """Phase offset minimizing the omega-shifted TF energy to leading order."""
    return 2.0 / (3.0 * SQRT_PI * reg.epsilon)


def delta_expansion(epsilon, hat_Omega):
    """Three-term small-parameter expansion of delta = hat_R^-2 - 1."""
    x = 1.0 / (SQRT_PI * epsilon * hat_Omega)
    return 2.0 * x * (1.0 + 2.0 * x / 3.0 + x ** 2 / 9.0)


def hat_tf_normalization_root(epsilon, hat_Omega, tol=1e-13, max_iter=80):
    """Solve delta - log(1+delta) = 2/(pi eps^2 hatOmega^2) for delta > 0.

    Safeguarded Newton (bisection fallback); the left side is increasing and
    convex on (0, inf) so the iteration is tame.  Returns (delta, residual).
    """
    if hat_Omega <= 0:
        raise GpvortexError(f"hat_Omega must be positive, got {hat_Omega}")
    target = 2.0 / (math.pi * epsilon ** 2 * hat_Omega ** 2)

    def h(d):
        return d - math.log1p(d) - target

    lo, hi = 0.0, max(10.0, delta_expansion(epsilon, hat_Omega) * 4.0)
    while h(hi) < 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise ConvergenceError("bracket expansion failed", residual=h(hi))
    d = min(max(delta_expansion(epsilon, hat_Omega), 1e-30), hi)
    res = h(d)
    for _ in range(max_iter):
        if abs(res) <= tol:
            return d, res
        if res > 0.0:
            hi = d
        else:
            lo = d
        slope = d / (1.0 + d)          # h'(delta)
        step = res / slope if slope > 0.0 else 0.0
        d_new = d - step
        if not lo < d_new < hi:
            d_new = 0.5 * (lo + hi)    # bisection safeguard
        d, res = d_new, h(d_new)
    if abs(res) <= tol:
        return d, res
    raise ConvergenceError(
        f"Newton on the normalization condition stalled (residual {res:.3e})",
        residual=res)


def hat_tf_solve(reg, omega, max_abs_omega_coeff=10.0):
    """Closed-form minimization of the omega-shifted TF functional.

    hat_e uses the exact expression -2 Omega hatOmega
    + (pi eps^2 hatOmega^4 / 4) (hat_R^-2 - 1)^2.
    """
    omega = int(omega)
    if abs(omega) > max_abs_omega_coeff / reg.epsilon:
        raise GpvortexError(
            f"|omega|={abs(omega)} exceeds {max_abs_omega_coeff}/epsilon")
    hOm = reg.hat_Omega(omega)
    if hOm <= 0:
        raise GpvortexError(f"hat_Omega = {hOm} <= 0 for omega = {omega}")
    eps = reg.epsilon
    delta, res = hat_tf_normalization_root(eps, hOm)
    hat_R2 = 1.0 / (1.0 + delta)
    hat_mu = hOm ** 2 / hat_R2
    hat_e = -2.0 * reg.Omega * hOm + math.pi * eps ** 2 * hOm ** 4 / 4.0 * delta ** 2
    return HatTfReport(omega=omega, hat_Omega=hOm, hat_R=math.sqrt(hat_R2),
                       hat_mu=hat_mu, hat_e=hat_e, residual=res)


def hat_tf_density(reg, report, r):
    """Density (eps^2/2)[hat_mu - hatOmega^2/r^2]_+ of the shifted TF problem."""
    r = np.asarray(r, dtype=float)
    val = 0.5 * reg.epsilon ** 2 * np.clip(
        report.hat_mu - report.hat_Omega ** 2 / np.maximum(r, 1e-300) ** 2, 0.0, None)
    return val if val.ndim else float(val)


def hat_tf_scan(reg, omegas=None):
    """hat_tf_solve over an integer bracket; returns list of HatTfReport.

    Default bracket [0, ceil(4 omega_tf)], clipped to keep hat_Omega > 0.
    """
    if omegas is None:
        omegas = range(0, min(int(math.ceil(4.0 * omega_tf(reg))) + 1, reg.Omega_int))
    return [hat_tf_solve(reg, om) for om in omegas]
