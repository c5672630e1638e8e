"""Constrained minimization of the discrete GP energy on the disc.

Projected descent over unit-L2-norm complex fields with an optional
mode-diagonal inverse-Helmholtz preconditioner: the rotation term is diagonal
in angular Fourier modes, so each mode's radial operator is a real
tridiagonal solve (the hot kernel).  Descent is certified by backtracking on
the energy; stationarity is reported as the L2 residual of the discrete GP
equation with the chemical potential from the normalization identity.

The variational problem has no canonical minimization algorithm and its
minimizer is in general not unique (vortices break rotational symmetry);
results are local-minimizer candidates, cross-checked against the
giant-vortex upper bound.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import fft, ifft

from . import profile1d
from . import regime as rg
from ._kernels import solve_tridiag_many
from .errors import ConvergenceError, GpvortexError
from .field2d import DiscField, gp_gradient, make_ansatz
from .synthetic import planted_vortex_field

INITS = ("giant-vortex", "planted-lattice", "random-phase")


@dataclass
class SolveOptions:
    max_iters: int = 5000
    tol: float = 1e-10                 # relative energy decrease over the window
    residual_tol: float = 1e-3         # secondary: GP-equation residual
    window: int = 10
    step_policy: str = "backtracking"  # "backtracking" | "fixed"
    preconditioner: str = "inverse-laplacian"   # "inverse-laplacian" | "none"
    tau: float = 0.0                   # 0 -> automatic
    seed: int = 0
    init: str = "giant-vortex"
    n_vortices: int = 6                # planted-lattice initial vortex count
    omega: int = None                  # phase of the giant-vortex init
    deterministic: bool = True         # fixed-order reductions, seeded RNG

    def validate(self):
        if self.tol <= 0 or self.max_iters < 1:
            raise GpvortexError("tol must be > 0 and max_iters >= 1")
        if self.init not in INITS:
            raise GpvortexError(f"unknown init {self.init!r}")
        if self.step_policy not in ("backtracking", "fixed"):
            raise GpvortexError(f"unknown step policy {self.step_policy!r}")


@dataclass
class SolveResult:
    field: DiscField
    energy: float
    mu: float
    residual: float
    history: np.ndarray = None
    converged: bool = False
    iterations: int = 0
    wallclock: float = 0.0
    init_profile: object = None


def _normalize_values(grid, values):
    n = math.sqrt(float(np.sum(grid.node_weights * np.abs(values) ** 2)))
    return values / n


def initial_field(reg, grid, opts, init_profile=None):
    """Build the initial iterate; returns (DiscField, profile used or None)."""
    omega = opts.omega if opts.omega is not None else int(round(rg.omega_tf(reg)))
    profile = init_profile
    if profile is None and opts.init in ("giant-vortex", "planted-lattice"):
        profile = profile1d.minimize_profile(reg, omega, grid.radial)
    rng = np.random.default_rng(opts.seed)
    if opts.init == "giant-vortex":
        fld = make_ansatz(profile, grid.Nt)
    elif opts.init == "planted-lattice":
        fld = make_ansatz(profile, grid.Nt)
        core = 2.0 * math.sqrt(reg.epsilon / reg.Omega)
        if reg.has_hole:
            r_ring = 0.5 * (reg.R_greater + 1.0)
        else:
            r_ring = 0.7
        centers = [((r_ring, 2.0 * math.pi * (k + rng.uniform(-0.1, 0.1))
                     / opts.n_vortices), 1) for k in range(opts.n_vortices)]
        fld.values *= planted_vortex_field(grid, centers, core=core).values
    else:  # random-phase
        if reg.has_hole:
            amp = np.sqrt(rg.tf_density(reg, grid.r) + 1e-4)
        else:
            mu0 = 2.0 / (math.pi * reg.epsilon ** 2) - reg.Omega ** 2 / 2.0
            amp = np.sqrt(0.5 * reg.epsilon ** 2
                          * (mu0 + reg.Omega ** 2 * grid.r ** 2) + 1e-4)
        phase = np.zeros((grid.Nr, grid.Nt))
        for m in range(1, 17):
            a, b = rng.normal(size=2)
            radial = np.cos(m * math.pi * (grid.s - grid.s[0])
                            / (grid.s[-1] - grid.s[0]))
            ang = a * np.cos(m * grid.theta) + b * np.sin(m * grid.theta)
            phase += (2.0 / m) * radial[:, None] * ang[None, :]
        hat = reg.hat_Omega(omega)
        fld = DiscField(grid=grid,
                        values=amp[:, None] * np.exp(1j * (hat * grid.theta[None, :]
                                                           + phase)),
                        meta="psi")
    fld.values = _normalize_values(grid, fld.values)
    return fld, profile


class _Preconditioner:
    """Mode-diagonal radial Helmholtz solves (the batched tridiagonal kernel)."""

    def __init__(self, grid, reg):
        self.grid = grid
        self.reg = reg
        ds = grid.radial.ds
        c = 2.0 * grid.radial.s_mid / ds * grid.dtheta
        n = grid.Nr
        self.lower = np.zeros(n)
        self.upper = np.zeros(n)
        self.kin_diag = np.zeros(n)
        self.kin_diag[:-1] += c
        self.kin_diag[1:] += c
        self.lower[1:] = -c
        self.upper[:-1] = -c
        self.m = np.fft.fftfreq(grid.Nt, d=1.0 / grid.Nt)
        self.w = grid.node_weights[:, 0]

    def apply(self, resid, mu, rho_bar, inv_tau):
        """Solve (A_r + M diag(max(pot, 0) + 1/tau)) d = resid per mode."""
        reg = self.reg
        q2 = 2.0 / reg.epsilon ** 2
        pot = (self.m[None, :] ** 2 / self.grid.s[:, None]
               - 2.0 * reg.Omega * self.m[None, :]
               - mu + q2 * rho_bar[:, None])
        diag = (self.kin_diag[:, None]
                + self.w[:, None] * (np.maximum(pot, 0.0) + inv_tau))
        rhat = fft(resid, axis=1).T.copy()            # (Nt, Nr)
        M, n = rhat.shape
        dl = np.broadcast_to(self.lower, (M, n))
        du = np.broadcast_to(self.upper, (M, n))
        dhat = solve_tridiag_many(np.ascontiguousarray(dl), diag.T.copy(),
                                  np.ascontiguousarray(du), rhat)
        return ifft(dhat.T, axis=1)


def minimize_gp(reg, grid, opts=None, init_profile=None, init_field=None):
    """Projected descent on the discrete GP energy; returns a SolveResult."""
    opts = opts or SolveOptions()
    opts.validate()
    t_start = time.perf_counter()
    if init_field is not None:
        fld = DiscField(grid=grid, values=np.array(init_field.values,
                                                   dtype=complex), meta="psi")
        fld.values = _normalize_values(grid, fld.values)
        profile = init_profile
    else:
        fld, profile = initial_field(reg, grid, opts, init_profile)
    w = grid.node_weights
    q = 1.0 / reg.epsilon ** 2
    psi = fld.values

    def eval_point(values):
        """(gradient, mu, quartic, energy) via E = <psi, G> - q int rho^2."""
        G = gp_gradient(DiscField(grid=grid, values=values, meta="psi"), reg)
        mu_v = float(np.sum(np.real(np.conj(values) * G)))
        e_q = q * float(np.sum(w * np.abs(values) ** 4))
        return G, mu_v, e_q, mu_v - e_q

    G, mu, _, E = eval_point(psi)
    hist = [E]
    precond = (_Preconditioner(grid, reg)
               if opts.preconditioner == "inverse-laplacian" else None)
    resid_norm = math.inf
    tau = opts.tau if opts.tau > 0 else 1.0
    converged = False
    it = 0
    for it in range(1, opts.max_iters + 1):
        R = G - mu * (w * psi)
        resid_norm = math.sqrt(float(np.sum(np.abs(R) ** 2 / w)))
        if not math.isfinite(E) or not math.isfinite(resid_norm):
            raise ConvergenceError(
                f"non-finite energy/residual at iteration {it}", residual=resid_norm)
        # stopping: windowed relative energy decrease + residual threshold
        if len(hist) > opts.window:
            drop = (hist[-1 - opts.window] - hist[-1]) / max(abs(hist[-1]), 1.0)
            if drop < opts.tol and resid_norm <= opts.residual_tol * (1.0 + abs(mu)):
                converged = True
                break
        rho_bar = np.mean(np.abs(psi) ** 2, axis=1)
        if precond is not None:
            d = precond.apply(R, mu, rho_bar, 1.0 / tau)
        else:
            d = tau * R / w
        if opts.step_policy == "fixed":
            psi_new = _normalize_values(grid, psi - d)
            G_new, mu_new, _, E_new = eval_point(psi_new)
            if E_new > E + 1e-12 * abs(E):
                raise ConvergenceError(
                    f"energy increased with fixed step at iteration {it}",
                    residual=resid_norm)
        else:
            t_step = 1.0
            ok = False
            for _ in range(40):
                psi_new = _normalize_values(grid, psi - t_step * d)
                G_new, mu_new, _, E_new = eval_point(psi_new)
                if E_new <= E:
                    ok = True
                    break
                t_step *= 0.5
            if not ok:
                # descent stalled at roundoff; report convergence state below
                break
            tau = min(tau * 1.2, 1e6) if t_step == 1.0 else max(tau * 0.5, 1e-9)
        psi, E, G, mu = psi_new, E_new, G_new, mu_new
        fld.values = psi
        hist.append(E)
    fld.values = psi
    R = G - mu * (w * psi)
    resid_norm = math.sqrt(float(np.sum(np.abs(R) ** 2 / w)))
    converged = converged or resid_norm <= opts.residual_tol * (1.0 + abs(mu))
    res = SolveResult(field=fld, energy=E, mu=mu, residual=resid_norm,
                      history=np.array(hist), converged=converged,
                      iterations=it, wallclock=time.perf_counter() - t_start,
                      init_profile=profile)
    return res


def chemical_potential_gp(res, reg):
    """mu = E + eps^-2 int |psi|^4 plus the GP-equation residual at that mu."""
    fld = res.field
    w = fld.grid.node_weights
    dens = np.abs(fld.values) ** 2
    mu = res.energy + float(np.sum(w * dens ** 2)) / reg.epsilon ** 2
    G = gp_gradient(fld, reg)
    R = G - mu * (w * fld.values)
    return mu, math.sqrt(float(np.sum(np.abs(R) ** 2 / w)))


@dataclass
class SweepRow:
    epsilon: float
    omega0: float
    energy: float = math.nan
    mu: float = math.nan
    residual: float = math.nan
    converged: bool = False
    iterations: int = 0
    wallclock: float = 0.0
    bulk_vortex_count: int = -1
    bulk_total_degree: int = 0
    boundary_degree: int = None
    omega_init: int = 0
    error: str = ""


def _sweep_point(eps, om0, grid, o):
    row = SweepRow(epsilon=float(eps), omega0=float(om0))
    reg = rg.make_regime(eps, om0, require_hole=False)
    row.omega_init = (o.omega if o.omega is not None
                      else int(round(rg.omega_tf(reg))))
    return row, reg


def _sweep_finish(row, reg, res, grid):
    from . import vortex as vx
    prof = res.init_profile if res.init_profile is not None else \
        profile1d.minimize_profile(reg, row.omega_init, grid.radial)
    u = vx.field_to_u(res.field, prof)
    vset = vx.detect_bulk_vortices(u, reg)
    row.bulk_vortex_count = sum(1 for b in vset.balls if b.degree != 0)
    row.bulk_total_degree = sum(b.degree for b in vset.balls)
    try:
        row.boundary_degree = vx.boundary_degree(res.field, prof)
    except Exception:
        row.boundary_degree = None
    row.energy, row.mu = res.energy, res.mu
    row.residual, row.converged = res.residual, res.converged
    row.iterations, row.wallclock = res.iterations, res.wallclock


def sweep(points, grid, opts=None, warm_start=True, on_result=None,
          max_workers=1):
    """minimize_gp over (epsilon, omega0) points; failures recorded, not raised.

    Points sharing epsilon may be warm-started in list order (forces
    sequential execution).  With max_workers > 1 and no warm starts, points
    run on a thread pool (numpy releases the GIL in the heavy kernels);
    per-point results are deterministic either way.  ``on_result`` is called
    with (row, SolveResult or None) after each point in list order, letting
    the CLI persist fields as it goes.
    """
    o = opts or SolveOptions()
    rows = []
    results = []
    if warm_start or max_workers <= 1:
        prev = None
        for eps, om0 in points:
            try:
                row, reg = _sweep_point(eps, om0, grid, o)
            except Exception as exc:
                row = SweepRow(epsilon=float(eps), omega0=float(om0))
                row.error = f"{type(exc).__name__}: {exc}"
                rows.append(row)
                results.append(None)
                continue
            try:
                if warm_start and prev is not None and prev[0] == eps:
                    res = minimize_gp(reg, grid, o, init_field=prev[1].field)
                else:
                    res = minimize_gp(reg, grid, o)
                _sweep_finish(row, reg, res, grid)
                prev = (eps, res)
                results.append(res)
            except Exception as exc:
                row.error = f"{type(exc).__name__}: {exc}"
                results.append(None)
            rows.append(row)
    else:
        import concurrent.futures as cf

        def run_point(pt):
            eps, om0 = pt
            try:
                row, reg = _sweep_point(eps, om0, grid, o)
                res = minimize_gp(reg, grid, o)
                _sweep_finish(row, reg, res, grid)
                return row, res
            except Exception as exc:
                row = SweepRow(epsilon=float(eps), omega0=float(om0))
                row.error = f"{type(exc).__name__}: {exc}"
                return row, None

        with cf.ThreadPoolExecutor(max_workers=max_workers) as pool:
            for row, res in pool.map(run_point, points):
                rows.append(row)
                results.append(res)
    if on_result is not None:
        for row, res in zip(rows, results):
            on_result(row, res)
    return rows
