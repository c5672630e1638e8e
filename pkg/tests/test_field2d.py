import math

import numpy as np
import pytest

from gpvortex.errors import (DegenerateProfileError, GpvortexError,
                             GridMismatchError)
from gpvortex.cost import cost_H, potential_F
from gpvortex.field2d import (DiscField, decompose_u, edge_momenta,
                              f_form_energy, gp_energy, gp_energy_terms,
                              gp_gradient, load_field, make_ansatz,
                              normalize_field, plaquette_circulation,
                              recompose_psi, reduced_energy, ring_circulation,
                              save_field)
from gpvortex.grids import polar_disc, polar_grid
from gpvortex.profile1d import minimize_profile
from gpvortex.synthetic import planted_vortex_field, smooth_field
from gpvortex.vortex import winding_grid
from conftest import observed_order


@pytest.fixture(scope="module")
def setup_030(reg_005_030, annulus_profile_005_030):
    om0, prof, _ = annulus_profile_005_030
    grid = polar_grid(prof.grid, 256)
    return reg_005_030, prof, grid


class TestGpEnergy:
    def test_constant_field(self, reg_005_030):
        grid = polar_disc(129, 64)
        area = math.pi * (1.0 - grid.radial.r_inner ** 2)
        fld = DiscField(grid=grid,
                        values=np.full((grid.Nr, grid.Nt),
                                       1.0 / math.sqrt(area), dtype=complex))
        E = gp_energy(fld, reg_005_030)
        # gradient and angular terms vanish; quartic integrates exactly
        assert E == pytest.approx(1.0 / (reg_005_030.epsilon ** 2 * area),
                                  rel=1e-12)
        assert E == pytest.approx(1.0 / (reg_005_030.epsilon ** 2 * math.pi),
                                  rel=3e-6)   # r0^2 correction only

    def test_ansatz_matches_profile_energy(self, setup_030):
        reg, prof, grid = setup_030
        psi = make_ansatz(prof, 256)
        assert abs(gp_energy(psi, reg) - prof.energy) <= 1e-6 * abs(prof.energy)

    def test_gauge_invariance(self, setup_030):
        reg, prof, grid = setup_030
        psi = make_ansatz(prof, 256)
        e0 = gp_energy(psi, reg)
        psi.values = psi.values * np.exp(1j * 0.81)
        e1 = gp_energy(psi, reg)
        assert e1 == pytest.approx(e0, rel=1e-13)

    def test_rejects_unnormalized(self, setup_030):
        reg, prof, grid = setup_030
        psi = make_ansatz(prof, 256)
        psi.values *= 2.0
        with pytest.raises(GpvortexError, match="not normalized"):
            gp_energy(psi, reg)

    def test_rejects_wrong_meta(self, setup_030):
        reg, prof, grid = setup_030
        psi = make_ansatz(prof, 256)
        psi.meta = "u"
        with pytest.raises(GpvortexError):
            gp_energy(psi, reg)

    def test_ansatz_energy_grid_convergence(self, reg_005_030):
        # evaluating a fixed fine profile's ansatz on refining polar grids
        # approaches the fine-grid energy at order ~2
        from scipy.interpolate import CubicSpline
        from gpvortex.grids import annulus_grid
        ref = minimize_profile(reg_005_030, 8, annulus_grid(reg_005_030, 4097))
        spline = CubicSpline(ref.grid.s_nodes, ref.g)
        errs = []
        for n, nt in ((129, 64), (257, 128), (513, 256)):
            grid = polar_grid(annulus_grid(reg_005_030, n), nt)
            g = spline(grid.s)
            vals = g[:, None] * np.exp(1j * ref.hat_Omega
                                       * grid.theta)[None, :]
            fld = normalize_field(DiscField(grid=grid, values=vals))
            errs.append(abs(gp_energy(fld, reg_005_030) - ref.energy))
        assert observed_order(errs) >= 1.8

    def test_gradient_matches_finite_differences(self, setup_030):
        reg, prof, grid = setup_030
        psi = make_ansatz(prof, 256)
        rng = np.random.default_rng(1)
        dpsi = (rng.normal(size=psi.values.shape)
                + 1j * rng.normal(size=psi.values.shape)) * 1e-6

        def raw(vals):
            t = gp_energy_terms(DiscField(grid=psi.grid, values=vals), reg)
            return sum(t.values())

        g = gp_gradient(psi, reg)
        central = (raw(psi.values + dpsi) - raw(psi.values - dpsi)) / 2.0
        pred = 2.0 * float(np.sum(np.real(np.conj(g) * dpsi)))
        assert central == pytest.approx(pred, rel=1e-7)


class TestDecomposition:
    def test_pure_ansatz_gives_unit_u(self, setup_030):
        reg, prof, grid = setup_030
        psi = make_ansatz(prof, 256)
        u = decompose_u(psi, prof)
        assert np.allclose(u.values, 1.0, atol=1e-12)

    def test_round_trip(self, setup_030):
        reg, prof, grid = setup_030
        u = smooth_field(grid, seed=2)
        psi = recompose_psi(u, prof)
        u2 = decompose_u(psi, prof)
        assert np.max(np.abs(u2.values - u.values)) < 1e-13

    def test_planted_vortex_has_winding(self, setup_030):
        reg, prof, grid = setup_030
        phi_v = planted_vortex_field(grid, [((0.85, 1.3), 1)], core=0.02)
        psi = recompose_psi(phi_v, prof)
        u = decompose_u(psi, prof)
        wg = winding_grid(u)
        assert int(wg.winding.sum()) == 1

    def test_degenerate_profile_rejected(self, setup_030):
        import copy
        reg, prof, grid = setup_030
        bad = copy.copy(prof)
        bad.g = prof.g.copy()
        bad.g[5] = 0.0
        psi = make_ansatz(prof, 256)
        with pytest.raises(DegenerateProfileError):
            decompose_u(psi, bad)


class TestReducedEnergy:
    def test_unit_u_zero(self, setup_030):
        reg, prof, grid = setup_030
        u = DiscField(grid=grid, values=np.ones((grid.Nr, grid.Nt), complex),
                      meta="u")
        assert reduced_energy(u, prof, reg) == 0.0

    def test_single_winding_matches_radial_quadrature(self, setup_030):
        reg, prof, grid = setup_030
        u = DiscField(grid=grid,
                      values=np.exp(1j * grid.theta)[None, :]
                      * np.ones((grid.Nr, 1)), meta="u")
        e = reduced_energy(u, prof, reg)
        W = prof.grid.weights
        g2 = prof.g ** 2
        s = prof.grid.s_nodes
        r = prof.grid.nodes
        B = reg.Omega * r - prof.hat_Omega / r
        oracle = float(W @ (g2 / s)) - 2.0 * float(W @ (g2 * B / r))
        assert e == pytest.approx(oracle, abs=1e-10 * max(1, abs(oracle)))

    def test_grid_mismatch_rejected(self, setup_030, reg_005_030):
        reg, prof, grid = setup_030
        other = polar_disc(129, 64)
        u = DiscField(grid=other, values=np.ones((129, 64), complex), meta="u")
        with pytest.raises(GridMismatchError):
            reduced_energy(u, prof, reg)

    def test_splitting_identity_converges(self, reg_005_035):
        from gpvortex.grids import disc_grid
        from gpvortex.profile1d import ProfileOptions
        defects = []
        for nr, nt in ((135, 128), (269, 256), (537, 512)):
            p = minimize_profile(reg_005_035, 8, disc_grid(nr),
                                 opts=ProfileOptions(tol=1e-11, max_iters=2000))
            grid = polar_grid(p.grid, nt)
            u = smooth_field(grid, seed=11)
            psi = recompose_psi(u, p)
            nrm = math.sqrt(psi.norm_sq())
            psi.values /= nrm
            u.values /= nrm
            d = abs(gp_energy(psi, reg_005_035) - p.energy
                    - reduced_energy(u, p, reg_005_035)) / abs(p.energy)
            defects.append(d)
        assert defects[-1] <= 1e-6
        assert observed_order(defects) >= 1.8


class TestFFormAndStokes:
    def test_unit_u_all_zero(self, setup_030):
        reg, prof, grid = setup_030
        u = DiscField(grid=grid, values=np.ones((grid.Nr, grid.Nt), complex),
                      meta="u")
        curve = cost_H(prof, potential_F(prof))
        bulk, boundary, quart = f_form_energy(u, curve, prof, reg)
        assert bulk == 0.0 and boundary == 0.0 and quart == 0.0

    def test_identity_for_winding_field(self, reg_005_030):
        from gpvortex.grids import annulus_grid
        errs = []
        for n, nt in ((257, 128), (513, 256), (1025, 512)):
            p = minimize_profile(reg_005_030, 8, annulus_grid(reg_005_030, n))
            grid = polar_grid(p.grid, nt)
            u = DiscField(grid=grid,
                          values=np.exp(1j * grid.theta)[None, :]
                          * np.ones((grid.Nr, 1)), meta="u")
            curve = cost_H(p, potential_F(p))
            bulk, boundary, quart = f_form_energy(u, curve, p, reg_005_030)
            e = reduced_energy(u, p, reg_005_030)
            errs.append(abs(bulk + boundary + quart - e) / max(abs(e), 1e-12))
        assert observed_order(errs) >= 1.8

    def test_identity_for_smooth_field(self, reg_005_030):
        from gpvortex.grids import annulus_grid
        errs = []
        for n, nt in ((257, 128), (513, 256), (1025, 512)):
            p = minimize_profile(reg_005_030, 8, annulus_grid(reg_005_030, n))
            grid = polar_grid(p.grid, nt)
            u = smooth_field(grid, seed=4)
            curve = cost_H(p, potential_F(p))
            bulk, boundary, quart = f_form_energy(u, curve, p, reg_005_030)
            e = reduced_energy(u, p, reg_005_030)
            errs.append(abs(bulk + boundary + quart - e) / max(abs(e), 1e-12))
        assert errs[-1] < errs[0]

    def test_planted_vortex_bulk_heuristic(self, setup_030):
        # bulk piece ~ kinetic + 2 pi F(a) for a single vortex at radius a
        reg, prof, grid = setup_030
        a = 0.88
        u = planted_vortex_field(grid, [((a, 2.0), 1)], core=0.004)
        curve = cost_H(prof, potential_F(prof))
        bulk, boundary, quart = f_form_energy(u, curve, prof, reg)
        from gpvortex.field2d import reduced_energy_terms
        t = reduced_energy_terms(u, prof, reg)
        kinetic = t["kinetic_radial"] + t["kinetic_angular"]
        Fa = float(np.interp(a, curve.radii, curve.F))
        expected = kinetic + 2.0 * math.pi * Fa
        assert bulk == pytest.approx(expected, rel=0.10)

    def test_discrete_stokes_exact(self, setup_030):
        # plaquette circulations over a band == boundary-ring circulation diff
        reg, prof, grid = setup_030
        u = planted_vortex_field(grid, [((0.85, 0.7), 1), ((0.92, 3.0), -1)],
                                 core=0.02)
        circ = plaquette_circulation(u.values)
        p_r, p_t = edge_momenta(u.values)
        i0, i1 = 20, grid.Nr - 20
        band = float(np.sum(circ[i0:i1, :]))
        rings = float(np.sum(p_t[i1, :]) - np.sum(p_t[i0, :]))
        assert band == pytest.approx(rings, abs=1e-11)

    def test_ring_circulation_exact_for_pure_winding(self, setup_030):
        reg, prof, grid = setup_030
        for d in (1, 3, -2):
            u = DiscField(grid=grid,
                          values=np.exp(1j * d * grid.theta)[None, :]
                          * np.ones((grid.Nr, 1)), meta="u")
            assert ring_circulation(u) == pytest.approx(2.0 * math.pi * d,
                                                        abs=1e-12)


class TestFieldIO:
    def test_round_trip(self, setup_030, tmp_path):
        reg, prof, grid = setup_030
        psi = make_ansatz(prof, 256)
        path = tmp_path / "psi.gpvf"
        save_field(path, psi, reg)
        fld, header = load_field(path)
        assert header["Nr"] == grid.Nr and header["Nt"] == 256
        assert header["epsilon"] == reg.epsilon
        assert header["omega0"] == reg.omega0
        assert header["meta"] == "psi"
        # float32 round trip: exact at single precision
        assert np.array_equal(
            fld.values.astype(np.complex64),
            psi.values.astype(np.complex64))
        assert fld.grid.radial.r_inner == pytest.approx(grid.radial.r_inner)

    def test_bad_magic_rejected(self, tmp_path):
        p = tmp_path / "bad.gpvf"
        p.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(GpvortexError, match="magic"):
            load_field(p)
