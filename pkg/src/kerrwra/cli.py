"""Command line runner: scenario ingestion, sweeps, and CSV emission.

Subcommands
-----------
trace --config FILE          one scenario, trajectory + rate CSVs
sweep --config FILE          ratio grid, one summary CSV
interferometer --config FILE alpha grid, observables CSV
validate                     invariant suite, pass/fail report

Config files are INI (configparser).  Schema::

    [scenario]
    preset = earth_polar          ; or give the custom fields below
    mass = 4.435e-3               ; geometric mass GM/c^2, meters
    spin = 0.0                    ; geometric spin a, meters
    family = polar_orbit          ; static|inertial|circular_equatorial|polar_orbit
    quantization = orbit_orthogonal  ; raw|orbit_orthogonal|along_momentum
    orbit_radius = 6.671e6
    r_launch = 6.371e6
    r_stop = 4.2371e7
    plane = equatorial
    ratios = 0.8, 1.0, -0.8, -1.0
    [analysis]
    set = wra, time_reversal, azimuth_flip, pt_check
    tol = 1e-10
    [interferometer]
    preset = earth_interferometer
    alpha = 0.1, 0.3, 0.6, 1.0
    sigma = 1
    [output]
    dir = out
    prefix = run

All angle columns are written twice, in radians and degrees.  Output
is deterministic for a fixed config and package version; a
manifest.json records the config hash and the emitted files.

Exit codes: 0 success, 1 validation failure, 2 config error,
3 numerical failure.
"""

import argparse
import concurrent.futures
import configparser
import csv
import dataclasses
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import ConfigError, KerrwraError
from .geodesic import StopCondition, conservation_drift, integrate, \
    launch_with_ratio, norm_drift
from .interferometer import scenario_observables
from .scenarios import INTERFEROMETER_PRESETS, PRESETS, WraScenario, \
    get_interferometer_preset, get_preset
from .spacetime import KerrParams, metric_at
from .symmetry import delta_psi_time_reversal, pt_check
from .tetrad import TetradField, orthonormality_residual, \
    transport_residual
from .wigner import antisymmetry_residual, composed_wra_extrapolated, \
    integrate_wra, lambda_matrix

_ANALYSES = ("wra", "time_reversal", "azimuth_flip", "pt_check")


@dataclasses.dataclass
class ScenarioConfig:
    """Validated scenario section plus analysis options."""

    preset: str = None
    mass: float = None
    spin: float = 0.0
    family: str = "static"
    quantization: str = "orbit_orthogonal"
    orbit_radius: float = None
    r_launch: float = None
    r_stop: float = None
    plane: str = "equatorial"
    ratios: tuple = ()
    analyses: tuple = ("wra",)
    tol: float = 1e-10

    def build_scenario(self):
        if self.preset:
            base = get_preset(self.preset)
            ratios = self.ratios or base.ratios
            return dataclasses.replace(base, ratios=tuple(ratios))
        p = KerrParams(mass=self.mass, spin=self.spin)
        f = TetradField(p, family=self.family,
                        quantization=self.quantization,
                        orbit_radius=self.orbit_radius)
        return WraScenario("custom", p, f, self.r_launch, self.r_stop,
                           tuple(self.ratios), self.plane)


def _parse_floats(text):
    try:
        return tuple(float(x) for x in text.replace(",", " ").split())
    except ValueError as e:
        raise ConfigError(f"bad number list {text!r}: {e}") from None


def load_config(path):
    """Parse and validate an INI config file."""
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    return cp


def scenario_config(cp, path):
    if "scenario" not in cp:
        raise ConfigError(f"{path}: missing [scenario] section")
    s = cp["scenario"]
    cfg = ScenarioConfig()
    cfg.preset = s.get("preset", None)
    if cfg.preset and cfg.preset not in PRESETS:
        raise ConfigError(f"{path}: unknown preset {cfg.preset!r}; "
                          "choices: " + ", ".join(sorted(PRESETS)))
    if not cfg.preset:
        for key in ("mass", "r_launch", "r_stop"):
            if key not in s:
                raise ConfigError(
                    f"{path}: [scenario] needs {key} when no preset is set")
        try:
            cfg.mass = s.getfloat("mass")
            cfg.spin = s.getfloat("spin", 0.0)
            cfg.orbit_radius = s.getfloat("orbit_radius", None)
            cfg.r_launch = s.getfloat("r_launch")
            cfg.r_stop = s.getfloat("r_stop")
        except ValueError as e:
            raise ConfigError(f"{path}: [scenario]: {e}") from None
        cfg.family = s.get("family", "static")
        cfg.quantization = s.get("quantization", "orbit_orthogonal")
        cfg.plane = s.get("plane", "equatorial")
        if cfg.mass < 0.0 or cfg.r_launch <= 0.0 or cfg.r_stop <= 0.0:
            raise ConfigError(f"{path}: radii and mass must be positive")
    if "ratios" in s:
        cfg.ratios = _parse_floats(s["ratios"])
    if not cfg.preset and not cfg.ratios:
        raise ConfigError(f"{path}: empty launch grid (set ratios)")
    if "analysis" in cp:
        a = cp["analysis"]
        if "set" in a:
            names = tuple(x.strip() for x in a["set"].split(",") if x.strip())
            bad = [n for n in names if n not in _ANALYSES]
            if bad:
                raise ConfigError(f"{path}: unknown analysis {bad}; "
                                  "choices: " + ", ".join(_ANALYSES))
            cfg.analyses = names
        try:
            cfg.tol = a.getfloat("tol", 1e-10)
        except ValueError as e:
            raise ConfigError(f"{path}: [analysis]: {e}") from None
    return cfg


def serialize_config(cfg):
    """ScenarioConfig back to INI text (round-trips through
    scenario_config)."""
    cp = configparser.ConfigParser()
    cp["scenario"] = {}
    s = cp["scenario"]
    if cfg.preset:
        s["preset"] = cfg.preset
    else:
        s["mass"] = f"{cfg.mass:.17g}"
        s["spin"] = f"{cfg.spin:.17g}"
        s["family"] = cfg.family
        s["quantization"] = cfg.quantization
        if cfg.orbit_radius is not None:
            s["orbit_radius"] = f"{cfg.orbit_radius:.17g}"
        s["r_launch"] = f"{cfg.r_launch:.17g}"
        s["r_stop"] = f"{cfg.r_stop:.17g}"
        s["plane"] = cfg.plane
    if cfg.ratios:
        s["ratios"] = ", ".join(f"{r:.17g}" for r in cfg.ratios)
    cp["analysis"] = {"set": ", ".join(cfg.analyses),
                      "tol": f"{cfg.tol:.17g}"}
    import io
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def output_dir(cp, args):
    if args.out:
        d = args.out
    elif cp is not None and "output" in cp and "dir" in cp["output"]:
        d = cp["output"]["dir"]
    else:
        d = os.environ.get("KERRWRA_OUT", ".")
    os.makedirs(d, exist_ok=True)
    return d


def _prefix(cp, default):
    if cp is not None and "output" in cp:
        return cp["output"].get("prefix", default)
    return default


def _fmt(x):
    return f"{x:.17g}"


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v
                        for v in row])


def write_manifest(out_dir, command, config_path, outputs, status="success"):
    digest = None
    if config_path is not None:
        with open(config_path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "version": __version__,
        "command": command,
        "config_sha256": digest,
        "status": status,
        "outputs": sorted(os.path.basename(p) for p in outputs),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _grid_point(cfg, ratio):
    """One sweep grid point; module level so worker pools can pickle
    the call."""
    scen = cfg.build_scenario()
    traj, field = scen.build(ratio)
    tr = integrate_wra(traj, field, tol=cfg.tol)
    row = {
        "ratio": ratio,
        "psi_geodetic_rad": tr.psi_geodetic,
        "psi_residual_rad": tr.psi_residual,
        "psi_total_rad": tr.psi_total,
    }
    if "time_reversal" in cfg.analyses:
        rep = delta_psi_time_reversal(traj, field, tol=cfg.tol)
        row["delta_psi_t_rad"] = rep.delta_psi
    if "pt_check" in cfg.analyses:
        rep = pt_check(traj, field)
        row["t_violation_rad"] = rep.t_violation
        row["pt_violation_rad"] = rep.pt_violation
    return row


def _with_degrees(row, keys):
    out = dict(row)
    for k in keys:
        if k in row:
            out[k.replace("_rad", "_deg")] = math.degrees(row[k])
    return out


_RAD_KEYS = ("psi_geodetic_rad", "psi_residual_rad", "psi_total_rad",
             "delta_psi_t_rad", "delta_psi_flip_rad",
             "t_violation_rad", "pt_violation_rad")


def _sweep_rows(cfg, jobs):
    ratios = list(cfg.ratios) or list(cfg.build_scenario().ratios)
    if not ratios:
        raise ConfigError("empty launch grid")
    if jobs > 1 and len(ratios) > 1:
        with concurrent.futures.ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_grid_point, [cfg] * len(ratios), ratios))
    else:
        rows = [_grid_point(cfg, r) for r in ratios]
    by_ratio = {r["ratio"]: r for r in rows}
    if "azimuth_flip" in cfg.analyses:
        for row in rows:
            mirror = by_ratio.get(-row["ratio"])
            if mirror is not None and row["ratio"] > 0:
                row["delta_psi_flip_rad"] = (row["psi_total_rad"]
                                             - mirror["psi_total_rad"])
    return [_with_degrees(r, _RAD_KEYS) for r in rows]


def cmd_trace(args):
    cp = load_config(args.config)
    cfg = scenario_config(cp, args.config)
    out = output_dir(cp, args)
    prefix = _prefix(cp, "trace")
    scen = cfg.build_scenario()
    ratio = cfg.ratios[0] if cfg.ratios else scen.ratios[0]
    traj, field = scen.build(ratio)
    tr = integrate_wra(traj, field, tol=cfg.tol)

    outputs = []
    path = os.path.join(out, f"{prefix}_trajectory.csv")
    xis = np.linspace(0.0, traj.xi_end, 513)
    rows = []
    for xi in xis:
        ev = traj.event_at(xi)
        k = traj.momentum_at(xi)
        rows.append((xi, ev.t, ev.r, ev.theta, ev.phi,
                     k[0], k[1], k[2], k[3]))
    write_csv(path, ("xi", "t", "r", "theta", "phi",
                     "k_t", "k_r", "k_theta", "k_phi"), rows)
    outputs.append(path)

    path = os.path.join(out, f"{prefix}_wra.csv")
    cum = tr.cumulative(tr.xi_nodes)
    rows = [(xi, g, r, c, math.degrees(c))
            for xi, g, r, c in zip(tr.xi_nodes, tr.rate_geodetic,
                                   tr.rate_residual, cum)]
    write_csv(path, ("xi", "rate_geodetic_rad", "rate_residual_rad",
                     "psi_cumulative_rad", "psi_cumulative_deg"), rows)
    outputs.append(path)
    outputs.append(write_manifest(out, "trace", args.config, outputs))
    print(f"trace: ratio {ratio:g}, psi_total "
          f"{tr.psi_total:.6e} rad ({math.degrees(tr.psi_total):.6e} deg)")
    for p in outputs:
        print("  wrote", p)
    return 0


def cmd_sweep(args):
    cp = load_config(args.config)
    cfg = scenario_config(cp, args.config)
    out = output_dir(cp, args)
    prefix = _prefix(cp, "sweep")
    rows = _sweep_rows(cfg, args.jobs)
    keys = sorted({k for r in rows for k in r}, key=_column_order)
    path = os.path.join(out, f"{prefix}_summary.csv")
    write_csv(path, keys, [[r.get(k, "") for k in keys] for r in rows])
    manifest = write_manifest(out, "sweep", args.config, [path])
    print(f"sweep: {len(rows)} grid points")
    print("  wrote", path)
    print("  wrote", manifest)
    return 0


def _column_order(key):
    order = ["ratio", "psi_geodetic_rad", "psi_geodetic_deg",
             "psi_residual_rad", "psi_residual_deg",
             "psi_total_rad", "psi_total_deg",
             "delta_psi_t_rad", "delta_psi_t_deg",
             "delta_psi_flip_rad", "delta_psi_flip_deg",
             "t_violation_rad", "t_violation_deg",
             "pt_violation_rad", "pt_violation_deg"]
    return order.index(key) if key in order else len(order)


def _interferometer_point(name, alpha, sigma):
    scn = get_interferometer_preset(name, alpha=alpha, sigma=sigma)
    obs = scenario_observables(scn)
    d = obs["delta_psi"]
    bright, dark = obs["mz_intensity"]
    return {
        "alpha": alpha,
        "delta_psi_rad": d,
        "delta_psi_deg": math.degrees(d),
        "coincidence_rate": obs["coincidence_rate"],
        "coincidence_rate_amp": obs["coincidence_rate_amp"],
        "mz_bright": bright,
        "mz_dark": dark,
    }


def cmd_interferometer(args):
    cp = load_config(args.config)
    if "interferometer" not in cp:
        raise ConfigError(f"{args.config}: missing [interferometer] section")
    sec = cp["interferometer"]
    name = sec.get("preset", "earth_interferometer")
    if name not in INTERFEROMETER_PRESETS:
        raise ConfigError(
            f"{args.config}: unknown preset {name!r}; choices: "
            + ", ".join(sorted(INTERFEROMETER_PRESETS)))
    alphas = _parse_floats(sec.get("alpha", "0.3"))
    if not alphas:
        raise ConfigError(f"{args.config}: empty alpha grid")
    try:
        sigma = sec.getint("sigma", 1)
    except ValueError as e:
        raise ConfigError(f"{args.config}: [interferometer]: {e}") from None
    out = output_dir(cp, args)
    prefix = _prefix(cp, "interferometer")

    if args.jobs > 1 and len(alphas) > 1:
        with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_interferometer_point,
                                 [name] * len(alphas), alphas,
                                 [sigma] * len(alphas)))
    else:
        rows = [_interferometer_point(name, a, sigma) for a in alphas]
    keys = list(rows[0])
    path = os.path.join(out, f"{prefix}_observables.csv")
    write_csv(path, keys, [[r[k] for k in keys] for r in rows])
    manifest = write_manifest(out, "interferometer", args.config, [path])
    print(f"interferometer: {name}, {len(rows)} alpha points")
    print("  wrote", path)
    print("  wrote", manifest)
    return 0


def _validation_checks(tol_scale):
    """Yield (name, residual, tolerance) for the invariant suite."""
    from .scenarios import earth_polar, minkowski

    for scen in (minkowski(), earth_polar()):
        traj, field = scen.build(scen.ratios[0])
        yield (f"{scen.name}: conserved-quantity drift",
               conservation_drift(traj), 1e-9 * tol_scale)
        yield (f"{scen.name}: null-norm drift",
               norm_drift(traj), 1e-9 * tol_scale)
        mid = traj.event_at(0.5 * traj.xi_end)
        g = metric_at(scen.params, mid)
        tet = field.evaluate(mid)
        yield (f"{scen.name}: tetrad orthonormality",
               orthonormality_residual(g, tet), 1e-10 * tol_scale)
        k_mid = traj.momentum_at(0.5 * traj.xi_end)
        L = lambda_matrix(field, mid, k_mid)
        # relative antisymmetry is meaningless when the generator is
        # zero to roundoff (flat space); report 0 there.  The floor is
        # 1e-8 of the kinematic scale k/r, well above the finite
        # difference noise.
        floor = 1e-8 * float(np.linalg.norm(k_mid)) / mid.r
        resid = (antisymmetry_residual(L)
                 if np.max(np.abs(L)) > floor else 0.0)
        yield (f"{scen.name}: generator antisymmetry", resid,
               1e-8 * tol_scale)
        tr = integrate_wra(traj, field)
        po, _ = composed_wra_extrapolated(traj, field)
        yield (f"{scen.name}: quadrature vs composed oracle",
               abs(tr.psi_total - po), 1e-8 * tol_scale)
    scen = earth_polar()
    yield ("earth_polar: tetrad transport residual",
           transport_residual(scen.field, scen.field.orbit_radius),
           1e-7 * tol_scale)


def cmd_validate(args):
    failures = 0
    for name, residual, tol in _validation_checks(args.tol_scale):
        ok = residual < tol
        failures += 0 if ok else 1
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: "
              f"residual {residual:.3e} (tol {tol:.1e})")
    print(f"{failures} failure(s)" if failures else "all checks passed")
    return 1 if failures else 0


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="kerrwra",
        description="Wigner-rotation-angle scenarios on Kerr spacetimes")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default: "
                        "$KERRWRA_OUT or the config's [output] dir)")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker processes for sweeps")
    common.add_argument("--tol-scale", type=float, default=1.0,
                        dest="tol_scale",
                        help="multiply validation tolerances by this factor")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in (("trace", cmd_trace), ("sweep", cmd_sweep),
                     ("interferometer", cmd_interferometer)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--config", required=True)
        p.set_defaults(fn=fn)
    p = sub.add_parser("validate", parents=[common])
    p.set_defaults(fn=cmd_validate)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (KerrwraError, FloatingPointError) as e:
        print(f"numerical failure: {type(e).__name__}: {e}",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
