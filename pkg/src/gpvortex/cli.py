"""Command-line surface: reproducible runs with manifests and reports.

Run directory layout: config.json, manifest.json, fields/*.gpvf,
tables/*.csv, report.md.  Machine-readable floats carry 17 significant
digits (json/repr); human tables print 6.  Exit codes: 0 ok, 2 config
error, 3 numerical failure.
"""

import argparse
import csv
import datetime
import hashlib
import json
import os
import sys
import time


from . import __version__, cost, field2d, profile1d
from . import regime as rg
from . import solver2d, vortex
from .errors import ConfigError, GpvortexError
from .grids import DEFAULT_R0, annulus_grid, disc_grid, polar_disc

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "version": {"const": 1},
        "regime": {
            "type": "object",
            "properties": {
                "epsilon": {"type": "number", "exclusiveMinimum": 0,
                            "exclusiveMaximum": 1},
                "omega0": {"type": "number", "exclusiveMinimum": 0},
                "require_hole": {"type": "boolean"},
            },
            "required": ["epsilon", "omega0"],
            "additionalProperties": False,
        },
        "grid": {
            "type": "object",
            "properties": {
                "nr": {"type": "integer", "minimum": 9},
                "nt": {"type": "integer", "minimum": 4},
                "r0": {"type": "number", "exclusiveMinimum": 0,
                       "exclusiveMaximum": 1},
            },
            "additionalProperties": False,
        },
        "solver": {
            "type": "object",
            "properties": {
                "max_iters": {"type": "integer", "minimum": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "residual_tol": {"type": "number", "exclusiveMinimum": 0},
                "init": {"enum": list(solver2d.INITS)},
                "seed": {"type": "integer"},
                "preconditioner": {"enum": ["inverse-laplacian", "none"]},
                "step_policy": {"enum": ["backtracking", "fixed"]},
                "n_vortices": {"type": "integer", "minimum": 0},
                "omega": {"type": ["integer", "null"]},
                "deterministic": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "sweep": {
            "type": "object",
            "properties": {
                "omega0_list": {"type": "array",
                                "items": {"type": "number",
                                          "exclusiveMinimum": 0},
                                "minItems": 0},
                "warm_start": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
    },
    "required": ["version", "regime"],
    "additionalProperties": False,
}


def validate_config(cfg):
    import jsonschema
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        pointer = "/" + "/".join(str(p) for p in e.absolute_path)
        raise ConfigError(f"config error at {pointer or '/'}: {e.message}")
    return cfg


def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    return validate_config(cfg)


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else v
                        for v in row])


class RunDir:
    """Run directory with manifest assembly and checksum bookkeeping."""

    def __init__(self, root, command, config):
        self.root = root
        os.makedirs(os.path.join(root, "fields"), exist_ok=True)
        os.makedirs(os.path.join(root, "tables"), exist_ok=True)
        self.outputs = []
        self.command = command
        self.config = config
        self.summary = {}
        self.t0 = time.perf_counter()
        write_json(os.path.join(root, "config.json"), config)
        self.record("config.json")

    def path(self, rel):
        return os.path.join(self.root, rel)

    def record(self, rel):
        self.outputs.append({"path": rel, "sha256": sha256_file(self.path(rel))})

    def finalize(self):
        manifest = {
            "tool_version": __version__,
            "command": self.command,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "wallclock": time.perf_counter() - self.t0,
            "config": self.config,
            "outputs": sorted(self.outputs, key=lambda o: o["path"]),
            "summary": self.summary,
        }
        write_json(self.path("manifest.json"), manifest)
        return manifest


def verify_manifest(run_dir):
    """Re-read a manifest and check every referenced file and checksum."""
    path = os.path.join(run_dir, "manifest.json")
    if not os.path.exists(path):
        raise ConfigError(f"{run_dir} is not a run directory (no manifest.json)")
    with open(path) as fh:
        manifest = json.load(fh)
    for out in manifest["outputs"]:
        p = os.path.join(run_dir, out["path"])
        if not os.path.exists(p):
            raise GpvortexError(f"manifest references missing file {out['path']}")
        if sha256_file(p) != out["sha256"]:
            raise GpvortexError(f"checksum mismatch for {out['path']}")
    return manifest


def _regime_dict(reg):
    return {"epsilon": reg.epsilon, "omega0": reg.omega0, "Omega": reg.Omega,
            "log_eps": reg.log_eps, "Omega_int": reg.Omega_int,
            "R_h": reg.R_h, "R_less": reg.R_less, "R_greater": reg.R_greater,
            "has_hole": reg.has_hole}


def _merge_flags(cfg, args):
    """Command-line flags override config-file entries."""
    if getattr(args, "epsilon", None) is not None:
        cfg.setdefault("regime", {})["epsilon"] = args.epsilon
    if getattr(args, "omega0", None) is not None:
        cfg.setdefault("regime", {})["omega0"] = args.omega0
    for name, key in (("nr", "nr"), ("nt", "nt")):
        v = getattr(args, name, None)
        if v is not None:
            cfg.setdefault("grid", {})[key] = v
    for name in ("max_iters", "seed", "init", "tol", "residual_tol", "omega"):
        v = getattr(args, name.replace("-", "_"), None)
        if v is not None:
            cfg.setdefault("solver", {})[name] = v
    return cfg


def _solver_options(cfg):
    s = dict(cfg.get("solver", {}))
    return solver2d.SolveOptions(**s)


# Commands -------------------------------------------------------------------

def cmd_tf(args):
    reg = rg.make_regime(args.epsilon, args.omega0)
    rep = rg.tf_report(reg)
    omtf = rg.omega_tf(reg)
    print(f"epsilon   = {reg.epsilon:.6g}")
    print(f"Omega0    = {reg.omega0:.6g}")
    print(f"Omega     = {reg.Omega:.6g}")
    print(f"R_h       = {reg.R_h:.6g}")
    print(f"E_TF      = {rep.e_tf:.6g}")
    print(f"mu_TF     = {rep.mu_tf:.6g}")
    print(f"rho_TF(1) = {rep.rho_sup:.6g}")
    print(f"omega_TF  = {omtf:.6g}")
    if args.omega_scan:
        try:
            a, b = (int(x) for x in args.omega_scan.split(".."))
        except ValueError:
            raise ConfigError(f"bad --omega-scan {args.omega_scan!r}; expected a..b")
        rows = []
        for om in range(a, b + 1):
            r = rg.hat_tf_solve(reg, om)
            rows.append((om, r.hat_Omega, r.hat_R, r.hat_mu, r.hat_e, r.residual))
        if args.csv:
            write_csv(args.csv, ["omega", "hat_Omega", "hat_R", "hat_mu",
                                 "hat_e", "residual"], rows)
            print(f"wrote {args.csv}")
        else:
            print(f"{'omega':>6} {'hat_e':>18}")
            for row in rows:
                print(f"{row[0]:>6} {row[4]:>18.6f}")
    return 0


def _profile_csv_rows(prof):
    return [(r, g, g * g) for r, g in zip(prof.grid.nodes, prof.g)]


def cmd_profile(args):
    reg = rg.make_regime(args.epsilon, args.omega0)
    omega = args.omega if args.omega is not None else int(round(rg.omega_tf(reg)))
    grid = (annulus_grid(reg, args.nodes) if args.domain == "annulus"
            else disc_grid(args.nodes))
    prof = profile1d.minimize_profile(reg, omega, grid)
    print(f"omega={omega} hat_Omega={prof.hat_Omega} E={prof.energy:.6f} "
          f"mu={prof.mu_hat:.6f} iters={prof.iterations} pg={prof.pg_norm:.3e}")
    if args.out:
        run = RunDir(args.out, "profile", {
            "version": 1, "regime": {"epsilon": args.epsilon, "omega0": args.omega0}})
        rel = "tables/profile.csv"
        write_csv(run.path(rel), ["r", "g", "g2"], _profile_csv_rows(prof))
        run.record(rel)
        run.summary = {"omega": omega, "hat_Omega": prof.hat_Omega,
                       "energy": prof.energy, "mu_hat": prof.mu_hat,
                       "converged": prof.converged, "domain": args.domain,
                       "regime": _regime_dict(reg)}
        run.finalize()
        print(f"run directory: {args.out}")
    return 0


def cmd_phase(args):
    reg = rg.make_regime(args.epsilon, args.omega0)
    grid = (annulus_grid(reg, args.nodes) if args.domain == "annulus"
            else disc_grid(args.nodes))
    om_star, prof, table = profile1d.optimize_phase(reg, grid)
    name = "omega_0" if args.domain == "annulus" else "omega_opt"
    print(f"{name} = {om_star}   (omega_TF = {rg.omega_tf(reg):.6g})")
    print(f"{'omega':>6} {'energy':>18}")
    for om, e in sorted(table.items()):
        mark = " *" if om == om_star else ""
        print(f"{om:>6} {e:>18.6f}{mark}")
    if args.out:
        run = RunDir(args.out, "phase", {
            "version": 1, "regime": {"epsilon": args.epsilon, "omega0": args.omega0}})
        rel = "tables/phase_scan.csv"
        write_csv(run.path(rel), ["omega", "energy"], sorted(table.items()))
        run.record(rel)
        rel2 = "tables/profile.csv"
        write_csv(run.path(rel2), ["r", "g", "g2"], _profile_csv_rows(prof))
        run.record(rel2)
        run.summary = {name: om_star, "energy": prof.energy,
                       "omega_tf": rg.omega_tf(reg), "domain": args.domain,
                       "regime": _regime_dict(reg)}
        run.finalize()
        print(f"run directory: {args.out}")
    return 0


def cmd_cost(args):
    reg = rg.make_regime(args.epsilon, args.omega0)
    grid = annulus_grid(reg, args.nodes)
    if args.omega is not None:
        omega = args.omega
        prof = profile1d.minimize_profile(reg, omega, grid)
    else:
        omega, prof, _ = profile1d.optimize_phase(reg, grid)
    curve = cost.cost_H(prof, cost.potential_F(prof))
    print(f"omega={omega} F(1)={curve.F[-1]:.6f} "
          f"min_bulk H={curve.min_bulk:.6f} at r={curve.argmin_bulk:.6f}")
    print(f"min H_tilde_TF = {cost.tf_cost_min(reg.omega0):.6f} "
          f"(critical constant 2/(3 pi) = {rg.CRITICAL_OMEGA0:.6f})")
    if args.out:
        run = RunDir(args.out, "cost", {
            "version": 1, "regime": {"epsilon": args.epsilon, "omega0": args.omega0}})
        rel = "tables/cost.csv"
        rows = zip(curve.radii, curve.g2, curve.B, curve.F, curve.H, curve.H_signed)
        write_csv(run.path(rel), ["r", "g2", "B", "F", "H", "H_signed"],
                  [tuple(float(x) for x in row) for row in rows])
        run.record(rel)
        run.summary = {"omega": omega, "min_bulk_H": curve.min_bulk,
                       "argmin_bulk": curve.argmin_bulk,
                       "F_boundary": float(curve.F[-1]),
                       "regime": _regime_dict(reg)}
        run.finalize()
        print(f"run directory: {args.out}")
    return 0


def _summarize_solve(res, reg, prof):
    u = vortex.field_to_u(res.field, prof)
    vset = vortex.detect_bulk_vortices(u, reg)
    try:
        deg = vortex.boundary_degree(res.field, prof)
    except GpvortexError:
        deg = None
    return {
        "energy": res.energy, "mu": res.mu, "residual": res.residual,
        "converged": res.converged, "iterations": res.iterations,
        "bulk_vortex_count": sum(1 for b in vset.balls if b.degree != 0),
        "bulk_total_degree": vset.total_degree(),
        "boundary_degree": deg,
        "hat_Omega": prof.hat_Omega, "omega": prof.omega,
    }


def cmd_minimize(args):
    cfg = load_config(args.config) if args.config else {"version": 1, "regime": {}}
    cfg = validate_config(_merge_flags(cfg, args))
    regime_cfg = cfg["regime"]
    if "epsilon" not in regime_cfg or "omega0" not in regime_cfg:
        raise ConfigError("config error at /regime: epsilon and omega0 required")
    reg = rg.make_regime(regime_cfg["epsilon"], regime_cfg["omega0"],
                         require_hole=regime_cfg.get("require_hole", False))
    gcfg = cfg.get("grid", {})
    grid = polar_disc(gcfg.get("nr", 257), gcfg.get("nt", 512),
                      gcfg.get("r0", DEFAULT_R0))
    opts = _solver_options(cfg)
    out = args.out or f"run-minimize-{regime_cfg['epsilon']}-{regime_cfg['omega0']}"
    run = RunDir(out, "minimize", cfg)
    res = solver2d.minimize_gp(reg, grid, opts)
    prof = res.init_profile if res.init_profile is not None else \
        profile1d.minimize_profile(
            reg, opts.omega if opts.omega is not None
            else int(round(rg.omega_tf(reg))), grid.radial)
    rel = "fields/psi.gpvf"
    field2d.save_field(run.path(rel), res.field, reg)
    run.record(rel)
    run.summary = _summarize_solve(res, reg, prof)
    run.summary["regime"] = _regime_dict(reg)
    run.summary["grid"] = {"nr": grid.Nr, "nt": grid.Nt,
                           "r0": grid.radial.r_inner}
    run.finalize()
    print(f"E = {res.energy:.6f}  residual = {res.residual:.3e}  "
          f"converged = {res.converged}")
    print(f"run directory: {out}")
    return 0


def cmd_vortices(args):
    mdir = args.run
    manifest = verify_manifest(mdir)
    cfg = manifest["config"]
    reg = rg.make_regime(cfg["regime"]["epsilon"], cfg["regime"]["omega0"],
                         require_hole=False)
    field_path = os.path.join(mdir, "fields", "psi.gpvf")
    if not os.path.exists(field_path):
        raise ConfigError(
            f"missing input artifact {field_path}; run 'minimize' first")
    fld, header = field2d.load_field(field_path)
    omega = manifest["summary"].get("omega",
                                    int(round(rg.omega_tf(reg))))
    prof = profile1d.minimize_profile(reg, omega, fld.grid.radial)
    u = vortex.field_to_u(fld, prof)
    vset = vortex.detect_bulk_vortices(u, reg)
    try:
        deg = vortex.boundary_degree(fld, prof)
    except GpvortexError:
        deg = None
    out = [{"r": b.r, "theta": b.theta, "radius": b.radius,
            "degree": b.degree, "cell": b.cell} for b in vset.balls]
    new_rels = ["tables/vortices.json"]
    write_json(os.path.join(mdir, new_rels[0]),
               {"vortices": out, "boundary_degree": deg,
                "bulk_vortex_count": sum(1 for b in vset.balls if b.degree != 0)})
    if args.windings:
        wg = vortex.winding_grid(u)
        rel = "tables/windings.csv"
        rows = [(float(r),) + tuple(int(v) for v in row)
                for r, row in zip(wg.plaq_r, wg.winding)]
        write_csv(os.path.join(mdir, rel),
                  ["plaquette_r"] + [f"t{j}" for j in range(wg.winding.shape[1])],
                  rows)
        new_rels.append(rel)
    print(f"bulk vortices: {len(out)}   boundary degree: {deg}")
    # refresh the manifest with the new tables
    manifest["summary"]["boundary_degree"] = deg
    manifest["summary"]["bulk_vortex_count"] = sum(
        1 for b in vset.balls if b.degree != 0)
    outputs = [o for o in manifest["outputs"] if o["path"] not in new_rels]
    for rel in new_rels:
        outputs.append({"path": rel,
                        "sha256": sha256_file(os.path.join(mdir, rel))})
    manifest["outputs"] = sorted(outputs, key=lambda o: o["path"])
    write_json(os.path.join(mdir, "manifest.json"), manifest)
    return 0


def cmd_sweep(args):
    cfg = load_config(args.config)
    if "sweep" not in cfg or "omega0_list" not in cfg.get("sweep", {}):
        raise ConfigError("config error at /sweep/omega0_list: required for sweep")
    eps = cfg["regime"]["epsilon"]
    om_list = cfg["sweep"]["omega0_list"]
    gcfg = cfg.get("grid", {})
    grid = polar_disc(gcfg.get("nr", 257), gcfg.get("nt", 512),
                      gcfg.get("r0", DEFAULT_R0))
    opts = _solver_options(cfg)
    out = args.out or f"run-sweep-{eps}"
    run = RunDir(out, "sweep", cfg)
    points = [(eps, o) for o in om_list]

    def persist(row, res):
        if res is None:
            return
        rel = f"fields/psi-omega0-{row.omega0:.6g}.gpvf"
        reg_pt = rg.make_regime(row.epsilon, row.omega0, require_hole=False)
        field2d.save_field(run.path(rel), res.field, reg_pt)
        run.record(rel)

    workers = int(os.environ.get("GPVORTEX_THREADS", "1") or "1")
    rows = solver2d.sweep(points, grid, opts,
                          warm_start=cfg.get("sweep", {}).get("warm_start", False),
                          on_result=persist, max_workers=workers)
    rel = "tables/sweep.csv"
    write_csv(run.path(rel),
              ["epsilon", "omega0", "energy", "residual", "converged",
               "bulk_vortex_count", "bulk_total_degree", "boundary_degree",
               "error"],
              [(r.epsilon, r.omega0, r.energy, r.residual, r.converged,
                r.bulk_vortex_count, r.bulk_total_degree,
                r.boundary_degree, r.error) for r in rows])
    run.record(rel)
    counts = [(r.omega0, r.bulk_vortex_count) for r in rows if not r.error]
    bracket = transition_bracket(counts)
    run.summary = {
        "epsilon": eps,
        "rows": [{"omega0": r.omega0, "energy": r.energy,
                  "bulk_vortex_count": r.bulk_vortex_count,
                  "boundary_degree": r.boundary_degree,
                  "converged": r.converged, "error": r.error} for r in rows],
        "transition_bracket": bracket,
    }
    run.finalize()
    for r in rows:
        state = r.error or f"E={r.energy:.6f} vortices={r.bulk_vortex_count}"
        print(f"omega0={r.omega0:<8g} {state}")
    if bracket:
        print(f"transition bracket: [{bracket[0]:g}, {bracket[1]:g}]")
    print(f"run directory: {out}")
    return 0


def transition_bracket(counts):
    """[omega0-, omega0+] bracketing the last vortex-count sign change."""
    counts = sorted(counts)
    bracket = None
    for (o1, c1), (o2, c2) in zip(counts, counts[1:]):
        if (c1 > 0) != (c2 > 0):
            bracket = [o1, o2]
    return bracket


def cmd_report(args):
    manifest = verify_manifest(args.run)
    lines = [f"# gpvortex report", "",
             f"- command: `{manifest['command']}`",
             f"- tool version: {manifest['tool_version']}",
             f"- timestamp: {manifest['timestamp']}", ""]
    s = manifest.get("summary", {})
    reg = s.get("regime")
    if reg:
        lines += ["## Regime", "",
                  f"| epsilon | Omega0 | Omega | R_h |",
                  f"|---|---|---|---|",
                  f"| {reg['epsilon']:.6g} | {reg['omega0']:.6g} "
                  f"| {reg['Omega']:.6g} | {reg.get('R_h', float('nan')):.6g} |",
                  ""]
    scalar_keys = [k for k in ("energy", "mu", "residual", "converged",
                               "omega", "omega_0", "omega_opt", "hat_Omega",
                               "boundary_degree", "bulk_vortex_count",
                               "min_bulk_H", "F_boundary")
                   if k in s and not isinstance(s[k], (dict, list))]
    if scalar_keys:
        lines += ["## Summary", ""]
        for k in scalar_keys:
            v = s[k]
            lines.append(f"- {k}: {v:.6g}" if isinstance(v, float) else f"- {k}: {v}")
        lines.append("")
    rows = s.get("rows", [])
    if manifest["command"] == "sweep":
        lines += ["## Transition table", "",
                  "| Omega0 | bulk vortex count | energy | converged |",
                  "|---|---|---|---|"]
        for r in rows:
            e = "error" if r.get("error") else f"{r['energy']:.6f}"
            lines.append(f"| {r['omega0']:.6g} | {r['bulk_vortex_count']} "
                         f"| {e} | {r.get('converged', '')} |")
        lines.append("")
        br = s.get("transition_bracket")
        lines.append(f"Transition bracket: {br if br else 'not detected'}")
        lines.append("")
    path = os.path.join(args.run, "report.md")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
    print(f"wrote {path}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="gpvortex",
                                description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    tf = sub.add_parser("tf", help="Thomas-Fermi closed forms")
    tf.add_argument("--epsilon", type=float, required=True)
    tf.add_argument("--omega0", type=float, required=True)
    tf.add_argument("--omega-scan", dest="omega_scan")
    tf.add_argument("--csv")
    tf.set_defaults(func=cmd_tf)

    pr = sub.add_parser("profile", help="1-D giant-vortex profile at fixed omega")
    pr.add_argument("--epsilon", type=float, required=True)
    pr.add_argument("--omega0", type=float, required=True)
    pr.add_argument("--omega", type=int)
    pr.add_argument("--domain", choices=["disc", "annulus"], default="annulus")
    pr.add_argument("--nodes", type=int, default=1025)
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_profile)

    ph = sub.add_parser("phase", help="integer phase optimization")
    ph.add_argument("--epsilon", type=float, required=True)
    ph.add_argument("--omega0", type=float, required=True)
    ph.add_argument("--domain", choices=["disc", "annulus"], default="annulus")
    ph.add_argument("--nodes", type=int, default=1025)
    ph.add_argument("--out")
    ph.set_defaults(func=cmd_phase)

    co = sub.add_parser("cost", help="vortex cost function F and H")
    co.add_argument("--epsilon", type=float, required=True)
    co.add_argument("--omega0", type=float, required=True)
    co.add_argument("--omega", type=int)
    co.add_argument("--nodes", type=int, default=2049)
    co.add_argument("--out")
    co.set_defaults(func=cmd_cost)

    mi = sub.add_parser("minimize", help="2-D GP energy minimization")
    mi.add_argument("--config")
    mi.add_argument("--out")
    mi.add_argument("--epsilon", type=float)
    mi.add_argument("--omega0", type=float)
    mi.add_argument("--nr", type=int)
    mi.add_argument("--nt", type=int)
    mi.add_argument("--init", choices=list(solver2d.INITS))
    mi.add_argument("--seed", type=int)
    mi.add_argument("--max-iters", dest="max_iters", type=int)
    mi.add_argument("--tol", type=float)
    mi.add_argument("--residual-tol", dest="residual_tol", type=float)
    mi.add_argument("--omega", type=int)
    mi.set_defaults(func=cmd_minimize)

    vo = sub.add_parser("vortices", help="vortex diagnostics for a run")
    vo.add_argument("--run", required=True)
    vo.add_argument("--windings", action="store_true",
                    help="also dump the plaquette winding grid as CSV")
    vo.set_defaults(func=cmd_vortices)

    sw = sub.add_parser("sweep", help="Omega0 sweep of 2-D minimizations")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out")
    sw.set_defaults(func=cmd_sweep)

    re = sub.add_parser("report", help="render report.md for a run directory")
    re.add_argument("--run", required=True)
    re.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    threads = os.environ.get("GPVORTEX_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GpvortexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
