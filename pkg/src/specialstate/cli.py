"""Command-line front end: ``specialstate <subcommand> [options]``.

Every run resolves a :class:`~specialstate.config.RunConfig` (defaults,
preset, config file, ``--set`` overrides and per-parameter flags, in that
order), writes its CSV/text outputs into ``--out`` and finishes with
``manifest.json``.  Failures print one JSON error record on stderr and exit
with 2 (validation), 3 (numeric) or 4 (resource exhaustion).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import catmap, decay, fields, kicks, special
from .config import PRESETS, SCHEMAS, RunConfig, resolve
from .errors import SpecialStateError, ValidationError
from .rng import substream

OUT_ENV = "SPECIALSTATE_OUT"


# --- output helpers -------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header, rows) -> Path:
    """CSV with a header row; floats rendered by shortest round-trip ``repr``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def write_lines(path: Path, lines) -> Path:
    path.write_text("".join(f"{ln}\n" for ln in lines))
    return path


def _kv(pairs) -> list[str]:
    return [f"{k}={_cell(v)}" for k, v in pairs]


# --- subcommand bodies ----------------------------------------------------

def _time_grid(p) -> np.ndarray:
    if p["n_times"] < 2 or not p["t_max"] > 0:
        raise ValidationError("need n_times >= 2 and t_max > 0")
    return np.linspace(0.0, p["t_max"], p["n_times"])


def _run_decay(cfg: RunConfig, workers: int) -> list[Path]:
    p = cfg.params
    model = decay.canonical_model(p["N"], recurrence=p["recurrence"], zeno=p["zeno"],
                                  omega=p["omega"])
    times = _time_grid(p)
    curve = decay.survival_curve(model, decay.excited_state(model), times, workers=workers)
    d = decay.diagnose(model, curve)
    out = cfg.out
    return [
        write_csv(out / "decay.csv", ["t", "S"], zip(curve.times, curve.values)),
        write_lines(out / "diagnostics.txt", _kv([
            ("zeno_time", d.zeno_time), ("fitted_zeno_time", d.fitted_zeno_time),
            ("golden_rule_slope", d.golden_rule_slope), ("fitted_slope", d.fitted_slope),
            ("loglinear_rms_residual", d.loglinear_rms_residual),
            ("recurrence_time", d.recurrence_time),
            ("recurrence_peak_time", d.recurrence_peak_time),
            ("recurrence_peak_value", d.recurrence_peak_value),
        ])),
    ]


def _run_special(cfg: RunConfig, workers: int) -> list[Path]:
    p = cfg.params
    phases = None
    if p["random_phases"]:
        rng = substream(cfg.seed, "special.phases")
        phases = rng.uniform(0.0, 2 * math.pi, (p["n"], p["N"]))
    model = special.multilevel_model(p["n"], p["N"], spacing=2 * math.pi / p["recurrence"],
                                     coupling=p["coupling"], channels=p["channels"],
                                     phases=phases)
    states = special.special_states(model, p["t0"])
    times = _time_grid(p)
    prop = decay.SpectralPropagator(decay.assemble_hamiltonian(model))
    avg = special.average_survival(model, times, workers=workers, propagator=prop)
    top = special.specialness_trace(model, 0, p["t0"], times, states=states,
                                    workers=workers, propagator=prop)
    bottom = special.specialness_trace(model, model.n - 1, p["t0"], times, states=states,
                                       workers=workers, propagator=prop)
    out = cfg.out
    return [
        write_csv(out / "spectrum.csv", ["index", "eigenvalue"], enumerate(states.eigenvalues)),
        write_csv(out / "trace.csv", ["t", "S_avg", "S_top", "S_bottom"],
                  zip(times, avg.values, top.values, bottom.values)),
        write_lines(out / "summary.txt", _kv([
            ("t0", p["t0"]), ("mean_survival_t0", float(np.mean(states.eigenvalues))),
            ("top_eigenvalue", states.eigenvalues[0]),
            ("bottom_eigenvalue", states.eigenvalues[-1]),
            ("epsilon", p["epsilon"]),
            ("cluster_fraction", special.cluster_fraction(states, p["epsilon"])),
        ])),
    ]


def _box(values, key) -> catmap.Box:
    if len(values) != 4:
        raise ValidationError(f"{key} needs four numbers x0,y0,x1,y1")
    return catmap.Box(*values)


def _run_catmap(cfg: RunConfig, workers: int) -> list[Path]:
    p = cfg.params
    prob = catmap.TwoTimeProblem(_box(p["initial_box"], "initial_box"),
                                 _box(p["final_box"], "final_box"), p["T"], p["n_points"],
                                 seed=cfg.seed, budget=p["budget"])
    grid = catmap.GrainGrid.with_count(p["grains"])
    exp = catmap.entropy_experiment(prob, grid, horizon=p["horizon"], workers=workers)
    snaps = sorted({int(t) for t in p["snapshot_times"]})
    if any(t < 0 or t != s for t, s in zip(snaps, sorted(p["snapshot_times"]))):
        raise ValidationError("snapshot_times must be non-negative integers")
    rows = []
    if snaps:
        traj = catmap.trajectory(exp.solution.ensemble, max(snaps))
        for t in snaps:
            rows.extend((t, x, y) for x, y in traj[t])
    sol = exp.solution
    out = cfg.out
    return [
        write_csv(out / "snapshots.csv", ["t", "x", "y"], rows),
        write_csv(out / "entropy.csv", ["t", "S_constrained", "S_unconstrained"],
                  zip(exp.times, exp.constrained, exp.unconstrained)),
        write_lines(out / "summary.txt", _kv([
            ("n_candidates", sol.n_candidates), ("n_accepted", sol.n_accepted),
            ("acceptance_rate", sol.acceptance_rate),
            ("final_box_area", prob.final_box.area),
            ("max_entropy", math.log(grid.count)),
        ])),
    ]


def _run_kicks(cfg: RunConfig, workers: int) -> list[Path]:
    p = cfg.params
    out = cfg.out
    task = p["task"]
    if task in ("probs", "expectation"):
        if not p["n_theta"] >= 1:
            raise ValidationError("n_theta must be >= 1")
        thetas = np.linspace(p["theta_min"], p["theta_max"], p["n_theta"])
        models = [kicks.KickModel(p["a"], float(t), p["n_max"]) for t in thetas]
    if task == "probs":
        rows = []
        for m in models:
            pr = kicks.outcome_probabilities(m)
            rows.append((m.theta, pr.p_up, pr.p_down, pr.ratio, math.tan(m.theta / 2) ** 2))
        return [write_csv(out / "probs.csv", ["theta", "p_up", "p_down", "ratio", "tan2"], rows)]
    if task == "expectation":
        from ._parallel import map_ordered
        vals = map_ordered(lambda i: kicks.conditional_kick_expectation(models[i], p["method"]),
                           len(models), workers)
        return [write_csv(out / "expectation.csv", ["theta", "mean_up", "mean_down"],
                          ((m.theta, up, dn) for m, (up, dn) in zip(models, vals)))]
    if task == "selfavg":
        rep = kicks.self_averaging_test(p["a"], p["batch"], p["repeats"], cfg.seed,
                                        distribution=p["distribution"])
        return [write_lines(out / "selfavg.txt", rep.lines())]
    opt = kicks.optimize_entry_angle(p["mode"], grid_points=p["grid_points"])
    return [
        write_lines(out / "optimize.txt", _kv([
            ("mode", opt.mode), ("theta_star_rad", opt.theta_star),
            ("theta_star_deg", opt.degrees), ("objective_value", opt.value),
        ])),
        write_csv(out / "objective.csv", ["theta", "objective"], zip(opt.thetas, opt.objective)),
    ]


def _run_fields(cfg: RunConfig, workers: int) -> list[Path]:
    p = cfg.params
    loop = fields.WireLoop(p["s"], p["L"], p["I"])
    if p["n_y"] < 1:
        raise ValidationError("n_y must be >= 1")
    traj = fields.Trajectory(p["z"], np.linspace(p["y_min"], p["y_max"], p["n_y"]), p["x"])
    from ._parallel import map_ordered
    ys = traj.y_grid
    samples = map_ordered(
        lambda i: fields.field_profile(loop, fields.Trajectory(traj.z, ys[i:i + 1], traj.x),
                                       p["n_nodes"])[0],
        len(ys), workers)
    closed = []
    for y in ys:
        bz = fields.straight_wire_field(loop, float(y), traj.z)[2]
        gx = fields.straight_wire_gradient_x(loop, float(y), traj.z)[0]
        entry, exit_ = fields.semicircle_contributions(loop, float(y), traj.z)
        closed.append((y, bz, gx, entry, exit_))
    S = p["s"] / p["z"]
    s_star, b_max = fields.bracket_maximum(np.linspace(0.05, 3.0, 60))
    est = fields.kick_estimates(p["delta_t"], length=p["length"], velocity=p["velocity"])
    photon = fields.kick_estimates(p["photon_delta_t"], length=p["length"], velocity=p["velocity"])
    out = cfg.out
    return [
        write_csv(out / "profile.csv", ["y", "Bx", "By", "Bz", "dBx_dx"],
                  ((s.position[1], *s.B, s.dBdx[0]) for s in samples)),
        write_csv(out / "closed_form.csv",
                  ["y", "Bz_straight", "dBx_dx_straight", "Bx_entry_semicircle",
                   "Bx_exit_semicircle"], closed),
        write_lines(out / "estimates.txt",
                    ["[field]", *est.lines(), "[photon]", *photon.lines(), "[geometry]",
                     *_kv([("s_over_z", S),
                           ("bracket_max_at_s_over_z", fields._bracket_max_over_y(S)[1]),
                           ("bracket_max_joint", b_max), ("bracket_argmax_s_over_z", s_star),
                           ("external_internal_ratio", fields.external_internal_ratio(S))])]),
    ]


RUNNERS = {
    "decay": _run_decay, "special": _run_special, "catmap": _run_catmap,
    "kicks": _run_kicks, "fields": _run_fields,
}


def run(cfg: RunConfig, *, workers: int = 1) -> list[Path]:
    """Execute one configured run; returns the written files, manifest last.

    ``workers`` only changes scheduling, never output bytes, so it is not
    recorded in the manifest.
    """
    if cfg.subcommand not in RUNNERS:
        raise ValidationError(f"unknown subcommand {cfg.subcommand!r}")
    if workers < 1:
        raise ValidationError("workers must be >= 1")
    cfg.out.mkdir(parents=True, exist_ok=True)
    files = RUNNERS[cfg.subcommand](cfg, workers)
    manifest = {"package": "specialstate", "version": __version__, **cfg.manifest(),
                "files": [f.name for f in files]}
    mpath = cfg.out / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return files + [mpath]


# --- argument parsing -----------------------------------------------------

def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--preset", help=f"named parameter set ({', '.join(PRESETS)})")
    g.add_argument("--config", type=Path, help="key = value config file")
    g.add_argument("--seed", help="master seed (64-bit unsigned integer)")
    g.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./out/<subcommand>)")
    g.add_argument("--workers", type=int, default=1, help="worker threads (output is unaffected)")
    g.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any parameter; repeatable")

    parser = argparse.ArgumentParser(prog="specialstate",
                                     description="Special-state numerical laboratory.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for name, schema in SCHEMAS.items():
        sp = subs.add_parser(name, parents=[common], allow_abbrev=False,
                            help=f"run the {name} computation")
        for key, prm in schema.items():
            if name == "kicks" and key == "task":
                sp.add_argument("task", nargs="?", choices=prm.choices, default=None,
                                help="sub-mode (default probs)")
                continue
            dest = "p_" + key
            sp.add_argument(_flag(key), dest=dest, default=None, metavar=prm.kind.upper(),
                            choices=prm.choices, help=f"{prm.help} (default {prm.default!r})")
    return parser


def _overrides(ns: argparse.Namespace) -> dict:
    out = {}
    for item in ns.set:
        if "=" not in item:
            raise ValidationError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    for k, v in vars(ns).items():
        if k.startswith("p_") and v is not None:
            out[k[2:]] = v
    if getattr(ns, "task", None) is not None:
        out["task"] = ns.task
    return out


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        out = ns.out or os.environ.get(OUT_ENV) or Path("out") / ns.subcommand
        cfg = resolve(ns.subcommand, preset_name=ns.preset, config_file=ns.config,
                      overrides=_overrides(ns), seed=ns.seed, out=out)
        files = run(cfg, workers=ns.workers)
    except SpecialStateError as exc:
        print(json.dumps(exc.record(), sort_keys=True), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(json.dumps({"exit_code": 2, "kind": "io", "message": str(exc)}), file=sys.stderr)
        return 2
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
