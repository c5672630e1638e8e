"""Vortex diagnostics: windings, boundary degree, cells, balls, jacobian.

Windings come from wrapped phase differences of u/|u| per plaquette; interior
edges cancel exactly, so any plaquette-set sum equals the circulation around
the set boundary.  Plaquettes where |u| drops below a modulus floor are
masked (phase unreliable there); a masked component still carries the integer
circulation of its enclosing contour through that same cancellation.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import regime as rg
from ._kernels import plaquette_winding, wrap_angle
from .errors import DegreeUndefinedError, GpvortexError, GridMismatchError
from .field2d import (decompose_u, edge_momenta, profile_on_polar_nodes,
                      theta_derivative)

log = logging.getLogger(__name__)

_PERIODIC_STRUCTURE = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def field_to_u(psi, profile):
    """Decompose a 2-D field against a radial profile (annulus restriction)."""
    return decompose_u(psi, profile)


def bulk_inner_radius(reg):
    """Inner edge of the bulk: R_> for hole regimes, ~0 otherwise."""
    return reg.R_greater if reg.has_hole else reg.epsilon / reg.log_eps


@dataclass
class WindingGrid:
    grid: object
    winding: np.ndarray = field(repr=False)   # (Nr-1, Nt) int32
    mask: np.ndarray = field(repr=False)      # plaquettes with unreliable phase
    floor: float = 0.0

    @property
    def plaq_r(self):
        r = self.grid.r
        return 0.5 * (r[:-1] + r[1:])

    @property
    def plaq_theta(self):
        th = self.grid.theta
        return th + 0.5 * self.grid.dtheta

    def region_sum(self, sel):
        """Total winding over a plaquette selection (== boundary circulation)."""
        return int(self.winding[sel].sum())


def winding_grid(u, floor=None):
    """Integer winding per plaquette of u, with a modulus mask."""
    mod = np.abs(u.values)
    if floor is None:
        floor = 0.1 * float(np.median(mod))
    corner_bad = mod < floor
    mask = (corner_bad[:-1, :] | corner_bad[1:, :]
            | np.roll(corner_bad[:-1, :], -1, axis=1)
            | np.roll(corner_bad[1:, :], -1, axis=1))
    if mask.all():
        raise GpvortexError("all plaquettes masked: field vanishes everywhere")
    phase = np.angle(u.values)
    wind = plaquette_winding(phase)
    return WindingGrid(grid=u.grid, winding=wind, mask=mask, floor=float(floor))


def boundary_degree(psi, profile, modulus_floor=1e-6):
    """Winding of psi around the outer ring: hatOmega + winding of u.

    Splitting off the giant-vortex phase keeps the per-edge increments far
    from the +-pi wrap even when hatOmega exceeds the angular Nyquist count.
    """
    ring = psi.values[-1, :]
    mod = np.abs(ring)
    if mod.min() < modulus_floor * max(float(np.median(np.abs(psi.values))), 1e-300):
        raise DegreeUndefinedError(
            f"|psi| reaches {mod.min():.3e} on the outer ring; degree undefined")
    hat = profile.hat_Omega
    u_ring = ring * np.exp(-1j * hat * psi.grid.theta)
    dphi = wrap_angle(np.diff(np.angle(np.append(u_ring, u_ring[0]))))
    return hat + int(round(float(dphi.sum()) / (2.0 * math.pi)))


@dataclass
class VortexBall:
    r: float
    theta: float
    radius: float
    degree: int
    cell: int = -1


@dataclass
class VortexSet:
    balls: list
    n_masked_plaquettes: int = 0

    def __iter__(self):
        return iter(self.balls)

    def total_degree(self):
        return sum(b.degree for b in self.balls)

    def total_abs_degree(self):
        return sum(abs(b.degree) for b in self.balls)


def _periodic_components(sel):
    """Connected components of a boolean (Nr-1, Nt) mask, periodic in axis 1."""
    labels, n = ndimage.label(sel, structure=_PERIODIC_STRUCTURE)
    if n == 0:
        return labels, 0
    # merge components that touch across the angular seam
    left, right = labels[:, 0], labels[:, -1]
    pairs = {(a, b) for a, b in zip(left, right) if a > 0 and b > 0 and a != b}
    parent = list(range(n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    remap = np.zeros(n + 1, dtype=labels.dtype)
    new = 0
    for lbl in range(1, n + 1):
        root = find(lbl)
        if remap[root] == 0:
            new += 1
            remap[root] = new
        remap[lbl] = remap[root]
    return remap[labels], new


def detect_bulk_vortices(u, reg, floor=None):
    """Connected components of nonzero-winding or masked plaquettes in the bulk."""
    wg = winding_grid(u, floor=floor)
    r_in = bulk_inner_radius(reg)
    in_bulk = wg.plaq_r >= r_in
    sel = ((wg.winding != 0) | wg.mask) & in_bulk[:, None]
    labels, n = _periodic_components(sel)
    pr = wg.plaq_r[:, None] + np.zeros_like(wg.winding, dtype=float)
    pth = np.broadcast_to(wg.plaq_theta, wg.winding.shape)
    x = pr * np.cos(pth)
    y = pr * np.sin(pth)
    balls = []
    for lbl in range(1, n + 1):
        comp = labels == lbl
        cx, cy = float(x[comp].mean()), float(y[comp].mean())
        rad = float(np.sqrt((x[comp] - cx) ** 2 + (y[comp] - cy) ** 2).max())
        rad = max(rad, 0.5 * math.hypot(u.grid.radial.ds, r_in * u.grid.dtheta))
        deg = int(wg.winding[comp].sum())
        balls.append(VortexBall(r=math.hypot(cx, cy), theta=math.atan2(cy, cx) % (2 * math.pi),
                                radius=rad, degree=deg))
    return VortexSet(balls=balls, n_masked_plaquettes=int(wg.mask.sum()))


# Cell decomposition ---------------------------------------------------------

@dataclass
class CellDecomposition:
    n_cells: int
    alpha: float
    threshold: float
    cell_of_column: np.ndarray = field(repr=False)   # angular node -> cell id
    energies: np.ndarray = field(repr=False)         # local F-energy per cell
    good: np.ndarray = field(repr=False)
    kind: np.ndarray = field(repr=False)   # "pleasant" | "unpleasant" | "average"
    f_total: float = 0.0

    @property
    def n_bad(self):
        return int(np.count_nonzero(~self.good))


def local_energy_density(u, profile, reg):
    """Node values of g^2 |grad u|^2 + eps^-2 g^4 (1-|u|^2)^2 times quad weights."""
    grid = u.grid
    g = profile_on_polar_nodes(profile, grid)
    vals = u.values
    du_dth = theta_derivative(vals)
    du_ds = np.gradient(vals, grid.s, axis=0)
    grad2 = 4.0 * grid.s[:, None] * np.abs(du_ds) ** 2 \
        + np.abs(du_dth) ** 2 / grid.s[:, None]
    g2 = (g ** 2)[:, None]
    dens = g2 * grad2 + (g2 ** 2) * (1.0 - np.abs(vals) ** 2) ** 2 / reg.epsilon ** 2
    return grid.node_weights * dens


def alpha_preset(reg, alpha_tilde=2.5):
    """Paper-style epsilon-dependent exponent ~ loglog/|log|."""
    return min(alpha_tilde * math.log(reg.log_eps) / reg.log_eps, 0.49)


def cell_decomposition(u, profile, reg, alpha=0.25, cell_constant=1.0):
    """Angular cells of side ~ cell_constant * eps |log eps|, labeled good/bad.

    good: local F-energy <= eps^-1 |log eps| eps^-alpha.  pleasant: cell and
    both neighbors good; unpleasant: bad, or good squeezed between two bad;
    average: good with exactly one non-good neighbor.
    """
    if not 0.0 <= alpha < 0.5:
        raise GpvortexError(f"alpha must lie in [0, 1/2), got {alpha}")
    side = cell_constant * reg.epsilon * reg.log_eps
    n_cells = int(2.0 * math.pi / side)
    if n_cells < 8:
        raise GpvortexError(
            f"cell decomposition meaningless: only {n_cells} cells "
            f"(side {side:.3g})")
    grid = u.grid
    cell_of_column = (grid.theta / (2.0 * math.pi) * n_cells).astype(int)
    cell_of_column = np.minimum(cell_of_column, n_cells - 1)
    wdens = local_energy_density(u, profile, reg).sum(axis=0)
    energies = np.bincount(cell_of_column, weights=wdens, minlength=n_cells)
    threshold = reg.log_eps / reg.epsilon * reg.epsilon ** (-alpha)
    good = energies <= threshold
    kind = np.empty(n_cells, dtype=object)
    for i in range(n_cells):
        left, right = good[(i - 1) % n_cells], good[(i + 1) % n_cells]
        if good[i] and left and right:
            kind[i] = "pleasant"
        elif (not good[i]) or (good[i] and not left and not right):
            kind[i] = "unpleasant"
        else:
            kind[i] = "average"
    return CellDecomposition(n_cells=n_cells, alpha=alpha, threshold=threshold,
                             cell_of_column=cell_of_column, energies=energies,
                             good=good, kind=kind, f_total=float(energies.sum()))


# Vortex balls ---------------------------------------------------------------

@dataclass
class BallOptions:
    modulus_tol: float = 0.0      # 0 -> 1/|log eps|
    radius_budget: float = 0.0    # 0 -> eps |log eps|^-5, clamped to 4 cells
    growth_factor: float = 1.2
    max_steps: int = 200


@dataclass
class BallRecord:
    ball: VortexBall
    kinetic: float
    theoretical_floor: float


def _merge_balls(balls):
    """Merge overlapping discs into smallest enclosing discs; degrees add."""
    merged = True
    balls = [list(b) for b in balls]   # [x, y, radius, degree]
    while merged:
        merged = False
        out = []
        while balls:
            x1, y1, r1, d1 = balls.pop()
            i = 0
            while i < len(balls):
                x2, y2, r2, d2 = balls[i]
                d = math.hypot(x2 - x1, y2 - y1)
                if d <= r1 + r2:
                    if d + r2 <= r1:
                        pass            # second inside first
                    elif d + r1 <= r2:
                        x1, y1, r1 = x2, y2, r2
                    else:
                        rn = 0.5 * (d + r1 + r2)
                        t = (rn - r1) / d
                        x1, y1 = x1 + t * (x2 - x1), y1 + t * (y2 - y1)
                        r1 = rn
                    d1 += d2
                    balls.pop(i)
                    merged = True
                else:
                    i += 1
            out.append([x1, y1, r1, d1])
        balls = out
    return balls


def grow_merge_balls(u, decomposition, profile, reg, opts=None):
    """Growth-and-merge vortex balls in the good set; returns (set, records).

    Seeds cover {||u| - 1| > modulus_tol} within good cells and the bulk;
    radii then grow multiplicatively, merging on contact (smallest enclosing
    disc; degrees add), until the per-cell radius-sum budget is reached.
    Each final ball reports its measured kinetic energy and the theoretical
    lower-bound value 2 pi (1/2 - alpha)|d| g^2(center) |log eps| (1 - C
    loglog/|log|), recorded with C = 1.
    """
    opts = opts or BallOptions()
    mtol = opts.modulus_tol or 1.0 / reg.log_eps
    budget = opts.radius_budget or reg.epsilon * reg.log_eps ** (-5.0)
    grid = u.grid
    cell_size = math.hypot(grid.radial.ds, bulk_inner_radius(reg) * grid.dtheta)
    if budget < 4.0 * cell_size:
        log.warning("radius budget %.3g below 4 grid cells; clamping to %.3g",
                    budget, 4.0 * cell_size)
        budget = 4.0 * cell_size
    r_in = bulk_inner_radius(reg)
    dev = np.abs(np.abs(u.values) - 1.0) > mtol
    wg = winding_grid(u)
    # corners of nonzero-winding plaquettes always seed: a winding plaquette
    # contains a zero even when the core falls between nodes
    wnz = wg.winding != 0
    dev[:-1, :] |= wnz
    dev[1:, :] |= wnz
    dev[:-1, :] |= np.roll(wnz, 1, axis=1)
    dev[1:, :] |= np.roll(wnz, 1, axis=1)
    good_col = decomposition.good[decomposition.cell_of_column]
    sel = dev & good_col[None, :] & (grid.r[:, None] >= r_in)
    if not sel.any():
        return VortexSet(balls=[]), []
    labels, n = _periodic_components_nodes(sel)
    x = grid.r[:, None] * np.cos(grid.theta)[None, :]
    y = grid.r[:, None] * np.sin(grid.theta)[None, :]
    balls = []
    for lbl in range(1, n + 1):
        comp = labels == lbl
        cx, cy = float(x[comp].mean()), float(y[comp].mean())
        rad = float(np.sqrt((x[comp] - cx) ** 2 + (y[comp] - cy) ** 2).max())
        rad = max(rad, 0.5 * cell_size)
        balls.append([cx, cy, rad, 0])
    balls = _merge_balls(balls)
    if max(b[2] for b in balls) > budget:
        raise GpvortexError(
            f"radius budget {budget:.3g} below initial covering radius "
            f"{max(b[2] for b in balls):.3g}")

    def cell_radius_sums(bs):
        sums = np.zeros(decomposition.n_cells)
        for bx, by, brad, _ in bs:
            th = math.atan2(by, bx) % (2.0 * math.pi)
            rr = math.hypot(bx, by)
            half = brad / max(rr, 1e-9)
            lo = int((th - half) / (2 * math.pi) * decomposition.n_cells)
            hi = int((th + half) / (2 * math.pi) * decomposition.n_cells)
            for c in range(lo, hi + 1):
                sums[c % decomposition.n_cells] += brad
        return sums

    for _ in range(opts.max_steps):
        trial = _merge_balls([[bx, by, brad * opts.growth_factor, d]
                              for bx, by, brad, d in balls])
        if cell_radius_sums(trial).max() > budget or \
                max(b[2] for b in trial) > budget:
            break
        balls = trial

    # degrees: circulation of the plaquette windings inside each final ball
    px = wg.plaq_r[:, None] * np.cos(wg.plaq_theta)[None, :]
    py = wg.plaq_r[:, None] * np.sin(wg.plaq_theta)[None, :]
    final = []
    records = []
    g = profile_on_polar_nodes(profile, grid)
    du_dth = theta_derivative(u.values)
    du_ds = np.gradient(u.values, grid.s, axis=0)
    grad2 = 4.0 * grid.s[:, None] * np.abs(du_ds) ** 2 \
        + np.abs(du_dth) ** 2 / grid.s[:, None]
    kin_dens = grid.node_weights * (g ** 2)[:, None] * grad2
    for bx, by, brad, _ in balls:
        inside = (px - bx) ** 2 + (py - by) ** 2 <= brad ** 2
        deg = int(wg.winding[inside].sum())
        ball = VortexBall(r=math.hypot(bx, by),
                          theta=math.atan2(by, bx) % (2 * math.pi),
                          radius=brad, degree=deg)
        node_inside = (x - bx) ** 2 + (y - by) ** 2 <= brad ** 2
        kin = float(np.sum(kin_dens[node_inside]))
        i_center = np.unravel_index(
            np.argmin((x - bx) ** 2 + (y - by) ** 2), x.shape)
        g2c = float(g[i_center[0]] ** 2)
        floor_val = (2.0 * math.pi * (0.5 - decomposition.alpha) * abs(deg)
                     * g2c * reg.log_eps
                     * (1.0 - math.log(reg.log_eps) / reg.log_eps))
        ball.cell = int(decomposition.cell_of_column[
            int(ball.theta / (2 * math.pi) * grid.Nt) % grid.Nt])
        final.append(ball)
        records.append(BallRecord(ball=ball, kinetic=kin,
                                  theoretical_floor=floor_val))
    return VortexSet(balls=final, n_masked_plaquettes=int(wg.mask.sum())), records


def _periodic_components_nodes(sel):
    return _periodic_components(sel)


# Jacobian comparison ---------------------------------------------------------

def regularized_momentum_circulation(u, xi_cut=0.5):
    """Plaquette circulations of (iw, dw) with w = xi(|u|) u / |u|, xi=min(2t,1)."""
    mod = np.abs(u.values)
    scale = np.where(mod < xi_cut, 2.0 * mod, 1.0)
    w = np.where(mod > 0, scale * u.values / np.where(mod > 0, mod, 1.0), 0.0)
    p_r, p_t = edge_momenta(w)
    return p_r + p_t[1:, :] - np.roll(p_r, -1, axis=1) - p_t[:-1, :]


def f_energy(u, profile, reg):
    """Total F-energy int g^2 |grad u|^2 + eps^-2 g^4 (1 - |u|^2)^2."""
    return float(local_energy_density(u, profile, reg).sum())


def jacobian_compare(u, balls, phi, reg, profile, decomposition=None):
    """Sum 2 pi d_i phi(a_i) vs int phi curl(iu, grad u); returns a report.

    phi: node samples, piecewise smooth, compactly supported inside the bulk
    (and the good set when a decomposition is supplied); violations rejected.
    """
    grid = u.grid
    if phi.shape != u.values.shape:
        raise GridMismatchError("phi must be sampled on u's grid")
    r_in = bulk_inner_radius(reg)
    outside = np.broadcast_to((grid.r < r_in)[:, None], phi.shape).copy()
    if decomposition is not None:
        bad_col = ~decomposition.good[decomposition.cell_of_column]
        outside |= bad_col[None, :]
    if np.any(np.abs(phi[outside]) > 0):
        raise GpvortexError("phi is supported outside the admissible region")
    if np.any(np.abs(phi[-1, :]) > 0) or np.any(np.abs(phi[0, :]) > 0):
        raise GpvortexError("phi must vanish on the grid boundary rings")
    lhs = 0.0
    for b in balls:
        ix = int(np.clip(np.searchsorted(grid.r, b.r), 0, grid.Nr - 1))
        it = int(round(b.theta / (2 * math.pi) * grid.Nt)) % grid.Nt
        lhs += 2.0 * math.pi * b.degree * float(phi[ix, it])
    circ = regularized_momentum_circulation(u)
    phi_plaq = 0.25 * (phi[:-1, :] + phi[1:, :]
                       + np.roll(phi[:-1, :], -1, axis=1)
                       + np.roll(phi[1:, :], -1, axis=1))
    rhs = float(np.sum(phi_plaq * circ))
    dphi_ds = np.gradient(phi, grid.s, axis=0)
    dphi_dth = theta_derivative(phi.astype(complex)).real
    grad_phi = np.sqrt(4.0 * grid.s[:, None] * dphi_ds ** 2
                       + dphi_dth ** 2 / grid.s[:, None])
    grad_inf = float(grad_phi.max())
    scale = (grad_inf * reg.epsilon ** 2 / reg.log_eps ** 2
             * f_energy(u, profile, reg))
    return {"lhs": lhs, "rhs": rhs, "gap": abs(lhs - rhs),
            "scale": scale, "grad_phi_inf": grad_inf}
