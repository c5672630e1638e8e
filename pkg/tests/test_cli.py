import csv
import json
import os

import numpy as np
import pytest

from gpvortex import cli
from gpvortex.errors import GpvortexError
from gpvortex.regime import hat_tf_solve, make_regime


def run_cli(*argv):
    return cli.main(list(argv))


SMALL = ["--nr", "193", "--nt", "192"]


class TestTf:
    def test_prints_closed_forms(self, capsys):
        assert run_cli("tf", "--epsilon", "0.02", "--omega0", "0.25") == 0
        out = capsys.readouterr().out
        assert "159.764" in out and "0.804276" in out and "18.8063" in out

    def test_no_hole_exit_code(self, capsys):
        assert run_cli("tf", "--epsilon", "0.5", "--omega0", "0.01") == 3
        assert "no hole" in capsys.readouterr().err

    def test_scan_csv_round_trip(self, tmp_path, capsys):
        path = str(tmp_path / "scan.csv")
        assert run_cli("tf", "--epsilon", "0.02", "--omega0", "0.25",
                       "--omega-scan", "0..40", "--csv", path) == 0
        reg = make_regime(0.02, 0.25)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 41
        es = [float(r["hat_e"]) for r in rows]
        for row in rows[:5]:
            rep = hat_tf_solve(reg, int(row["omega"]))
            assert float(row["hat_e"]) == rep.hat_e   # 17-digit round trip
        k = int(np.argmin(es))
        assert 0 < k < 40     # unimodal scan has interior argmin
        assert all(es[i] >= es[i + 1] - 1e-9 for i in range(k))
        assert all(es[i] <= es[i + 1] + 1e-9 for i in range(k, 40))

    def test_bad_scan_spec(self, capsys):
        assert run_cli("tf", "--epsilon", "0.02", "--omega0", "0.25",
                       "--omega-scan", "junk") == 2


class TestPhaseAndCost:
    def test_phase_prints_table(self, capsys, tmp_path):
        out_dir = str(tmp_path / "phase")
        assert run_cli("phase", "--epsilon", "0.05", "--omega0", "0.3",
                       "--domain", "annulus", "--nodes", "513",
                       "--out", out_dir) == 0
        out = capsys.readouterr().out
        assert "omega_0 =" in out
        manifest = cli.verify_manifest(out_dir)
        assert manifest["summary"]["omega_0"] in (7, 8)

    def test_cost_emits_csv(self, tmp_path):
        out_dir = str(tmp_path / "cost")
        assert run_cli("cost", "--epsilon", "0.05", "--omega0", "0.3",
                       "--omega", "8", "--nodes", "513", "--out", out_dir) == 0
        with open(os.path.join(out_dir, "tables", "cost.csv")) as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0]) == ["r", "g2", "B", "F", "H", "H_signed"]
        assert float(rows[0]["F"]) == 0.0
        H = np.array([float(r["H"]) for r in rows])
        assert np.all(np.isfinite(H))

    def test_profile_csv_round_trip(self, tmp_path):
        out_dir = str(tmp_path / "prof")
        assert run_cli("profile", "--epsilon", "0.05", "--omega0", "0.3",
                       "--omega", "8", "--nodes", "513", "--out", out_dir) == 0
        from gpvortex.grids import annulus_grid
        from gpvortex.profile1d import minimize_profile
        reg = make_regime(0.05, 0.3)
        prof = minimize_profile(reg, 8, annulus_grid(reg, 513))
        with open(os.path.join(out_dir, "tables", "profile.csv")) as fh:
            rows = list(csv.DictReader(fh))
        g_back = np.array([float(r["g"]) for r in rows])
        assert np.array_equal(g_back, prof.g)   # 17-digit repr round trip

    def test_vortices_windings_csv(self, tmp_path, run_dir):
        assert run_cli("vortices", "--run", run_dir, "--windings") == 0
        with open(os.path.join(run_dir, "tables", "windings.csv")) as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "plaquette_r"
        reg = make_regime(0.05, 0.35)
        plaq_r = np.array([float(r[0]) for r in rows[1:]])
        body = np.array([[int(v) for v in r[1:]] for r in rows[1:]])
        # vortex-free bulk; windings below R_> sit in the low-density region
        assert np.abs(body[plaq_r >= reg.R_greater]).sum() == 0
        cli.verify_manifest(run_dir)


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    d = str(tmp_path_factory.mktemp("runs") / "m1")
    code = run_cli("minimize", "--epsilon", "0.05", "--omega0", "0.35",
                   *SMALL, "--max-iters", "200", "--out", d)
    assert code == 0
    return d


class TestMinimizePipeline:
    def test_manifest_verifies(self, run_dir):
        manifest = cli.verify_manifest(run_dir)
        assert manifest["summary"]["bulk_vortex_count"] == 0
        assert manifest["summary"]["converged"]

    def test_vortices_command(self, run_dir, capsys):
        assert run_cli("vortices", "--run", run_dir) == 0
        with open(os.path.join(run_dir, "tables", "vortices.json")) as fh:
            data = json.load(fh)
        assert data["vortices"] == []
        reg = make_regime(0.05, 0.35)
        prof_deg = data["boundary_degree"]
        assert abs(prof_deg - (reg.Omega_int - 8)) <= 2
        cli.verify_manifest(run_dir)   # manifest refreshed consistently

    def test_report_command(self, run_dir):
        assert run_cli("report", "--run", run_dir) == 0
        text = open(os.path.join(run_dir, "report.md")).read()
        assert "Regime" in text and "boundary_degree" in text

    def test_checksum_tamper_detected(self, run_dir):
        p = os.path.join(run_dir, "tables", "vortices.json")
        with open(p, "a") as fh:
            fh.write(" ")
        with pytest.raises(GpvortexError, match="checksum"):
            cli.verify_manifest(run_dir)
        assert run_cli("report", "--run", run_dir) == 3
        # restore for other tests
        data = open(p).read()[:-1]
        open(p, "w").write(data)

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(
            {"version": 1, "regime": {"epsilon": 2.0, "omega0": 0.25}}))
        assert run_cli("minimize", "--config", str(bad)) == 2

    def test_config_pointer_path(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(
            {"version": 1, "regime": {"epsilon": 0.05, "omega0": 0.35},
             "solver": {"init": "bogus"}}))
        assert run_cli("minimize", "--config", str(bad)) == 2
        assert "/solver/init" in capsys.readouterr().err

    def test_missing_config_file(self):
        assert run_cli("minimize", "--config", "/nonexistent.json") == 2

    def test_missing_run_dir_dependency(self, tmp_path, capsys):
        assert run_cli("vortices", "--run", str(tmp_path)) == 2
        assert "manifest.json" in capsys.readouterr().err
        # a run dir whose field artifact was removed gives a dependency error
        d = str(tmp_path / "r")
        assert run_cli("phase", "--epsilon", "0.05", "--omega0", "0.3",
                       "--nodes", "513", "--out", d) == 0
        assert run_cli("vortices", "--run", d) == 2


def scrub(manifest):
    m = json.loads(json.dumps(manifest))
    m.pop("timestamp", None)
    m.pop("wallclock", None)
    return m


class TestSweepAndDeterminism:
    def test_empty_sweep_and_report(self, tmp_path):
        cfg = tmp_path / "sweep.json"
        cfg.write_text(json.dumps({
            "version": 1, "regime": {"epsilon": 0.05, "omega0": 0.35},
            "grid": {"nr": 193, "nt": 192},
            "sweep": {"omega0_list": []}}))
        out = str(tmp_path / "sw")
        assert run_cli("sweep", "--config", str(cfg), "--out", out) == 0
        manifest = cli.verify_manifest(out)
        assert manifest["summary"]["rows"] == []
        assert run_cli("report", "--run", out) == 0
        assert "not detected" in open(os.path.join(out, "report.md")).read()

    def test_identical_manifests_same_seed(self, tmp_path):
        cfg = tmp_path / "m.json"
        cfg.write_text(json.dumps({
            "version": 1, "regime": {"epsilon": 0.05, "omega0": 0.35},
            "grid": {"nr": 193, "nt": 192},
            "solver": {"max_iters": 60, "seed": 5, "init": "random-phase",
                       "deterministic": True}}))
        d1, d2 = str(tmp_path / "r1"), str(tmp_path / "r2")
        assert run_cli("minimize", "--config", str(cfg), "--out", d1) == 0
        assert run_cli("minimize", "--config", str(cfg), "--out", d2) == 0
        m1 = scrub(cli.verify_manifest(d1))
        m2 = scrub(cli.verify_manifest(d2))
        assert m1 == m2
