"""Command-line scenario runner.

    coherent-soliton {exact|evolve|verify|figures|stability|convert}
        [--config PATH] [--preset NAME] [--out DIR] [--seed N]
        [--g1d G] [--mu MU] [--x0 X0] [--n N] [--L L] [--M M] [--dt DT]
        [--t-end T] [--stride S] [--set section.key=JSON ...]

Configuration is one JSON document; flags override its fields.  Exit codes:
0 success, 1 invalid configuration or failed verification, 2 numerical
failure.  ``COHERENT_SOLITON_OUT`` sets the default output directory.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis, exact, units
from .errors import BlowUpError, ConfigurationError
from .grid import phase_removed_distance
from .solver import EvolutionMode, evolve, grid_for, initial_state

log = logging.getLogger("coherent_soliton")

OUT_ENV = "COHERENT_SOLITON_OUT"
PAPER_G1D = 56.55
FLOAT_FMT = "%.12e"

DEFAULTS = {
    "name": "scenario",
    "seed": 0,
    "sim": {"mu": 10.0, "x0": 10.0, "n": 0, "L": 20.0, "M": 2048, "dt": 1e-3},
    "evolution": {"mode": "nonlinear", "t_end": 2 * math.pi, "stride": None},
    "lattice": {"nx": 201, "nt": 201, "x_min": None, "x_max": None,
                "t_min": 0.0, "t_max": 2 * math.pi},
    "stability": {"perturbation": "center_shift", "magnitude": 0.1,
                  "horizon": 4 * math.pi},
    "verify": {
        "times": 16,
        "dt_fd": 1e-4,
        "dt_fd_refinements": [1e-3, 5e-4, 2.5e-4],
        "tolerances": {
            "balance": 1e-12,
            "pde_residual": 1e-5,
            "pde_order": 0.1,
            "exact_floquet": 1e-12,
            "round_trip": 1e-5,
            "numerical_floquet_phase": 1e-4,
            "norm_drift": 1e-10,
        },
    },
}

PRESETS = {
    "li7": {"name": "li7", "physical": {
        "atom_count": 1e4, "scattering_length": 1.5e-9, "axial_freq": 20.0,
        "radial_freq": 800.0, "mass_in_proton_masses": 7, "frequencies_in_hz": False}},
    "li7-attractive": {"name": "li7-attractive", "physical": {
        "atom_count": 1e4, "scattering_length": -1.5e-9, "axial_freq": 20.0,
        "radial_freq": 800.0, "mass_in_proton_masses": 7, "frequencies_in_hz": False}},
    "paper": {"name": "paper", "sim": {"g1d": PAPER_G1D}},
}

FIGURE_PANELS = {
    # name: (kind, n, sign)
    "fig1a": ("density", 0, 1), "fig1b": ("density", 1, 1),
    "fig2a": ("laser", 0, 1), "fig2b": ("laser", 0, -1),
    "fig2c": ("laser", 1, 1), "fig2d": ("laser", 1, -1),
    "fig3": ("profile", 0, 1), "fig4": ("profile", 0, -1),
}
PROFILE_TIMES = {"a": 0.0, "b": math.pi / 2, "c": math.pi, "d": 5 * math.pi / 4}

SIM_FLAGS = ("g1d", "mu", "x0", "n", "L", "M", "dt")


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _set_path(cfg: dict, dotted: str, value) -> None:
    *head, last = dotted.split(".")
    node = cfg
    for part in head:
        node = node.setdefault(part, {})
    node[last] = value


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigurationError(f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
        cfg = _merge(cfg, PRESETS[args.preset])
    if args.config:
        try:
            with open(args.config) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigurationError(f"cannot read config {args.config}: {err}") from err
        if not isinstance(user, dict):
            raise ConfigurationError("config must be a JSON object")
        if "physical" in user and "g1d" in user.get("sim", {}):
            raise ConfigurationError("give either a physical block or sim.g1d, not both")
        if "physical" in user:
            cfg["sim"].pop("g1d", None)
        if "g1d" in user.get("sim", {}):
            cfg.pop("physical", None)
        cfg = _merge(cfg, user)

    for name in SIM_FLAGS:
        value = getattr(args, name)
        if value is not None:
            cfg["sim"][name] = value
    if args.t_end is not None:
        cfg["evolution"]["t_end"] = args.t_end
    if args.stride is not None:
        cfg["evolution"]["stride"] = args.stride
    if args.seed is not None:
        cfg["seed"] = args.seed
    for item in args.set or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigurationError(f"--set expects key=value, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        _set_path(cfg, key, value)

    if "physical" in cfg and "g1d" in cfg["sim"]:
        raise ConfigurationError("give either a physical block or sim.g1d, not both")
    if "physical" not in cfg:
        cfg["sim"].setdefault("g1d", PAPER_G1D)
    lat = cfg["lattice"]
    reach = abs(float(cfg["sim"]["x0"])) + 5.0
    if lat["x_min"] is None:
        lat["x_min"] = -reach
    if lat["x_max"] is None:
        lat["x_max"] = reach
    return cfg


def physical_params(cfg: dict) -> units.PhysicalParams:
    block = dict(cfg["physical"])
    if "mass_in_proton_masses" in block:
        block["atomic_mass"] = block.pop("mass_in_proton_masses") * units.PROTON_MASS
    try:
        return units.PhysicalParams(**block)
    except TypeError as err:
        raise ConfigurationError(f"bad physical block: {err}") from err


def sim_params(cfg: dict) -> units.SimParams:
    fields = dict(cfg["sim"])
    if "physical" in cfg:
        fields["g1d"] = units.interaction_strength(physical_params(cfg))
    try:
        return units.SimParams(**fields)
    except TypeError as err:
        raise ConfigurationError(f"bad sim block: {err}") from err


def _header(cfg: dict, command: str) -> str:
    shown = {k: v for k, v in cfg.items() if k != "output_dir"}
    return "\n".join([
        f"coherent-soliton {command}",
        "config: " + json.dumps(shown, sort_keys=True),
    ])


def _write_csv(path: Path, columns: list[str], data: np.ndarray, cfg: dict, command: str) -> None:
    np.savetxt(path, data, fmt=FLOAT_FMT, delimiter=",",
               header=_header(cfg, command) + "\n" + ",".join(columns), comments="# ")
    log.info("wrote %s", path)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    log.info("wrote %s", path)


def _lattice(cfg: dict):
    lat = cfg["lattice"]
    xs = np.linspace(lat["x_min"], lat["x_max"], int(lat["nx"]))
    ts = np.linspace(lat["t_min"], lat["t_max"], int(lat["nt"]))
    return xs, ts


def _long(ts: np.ndarray, xs: np.ndarray, *fields: np.ndarray) -> np.ndarray:
    tt, xx = np.meshgrid(ts, xs, indexing="ij")
    return np.column_stack([tt.ravel(), xx.ravel()] + [f.ravel() for f in fields])


# --- subcommands -----------------------------------------------------------

def cmd_exact(cfg: dict, out: Path) -> int:
    params = sim_params(cfg)
    p = exact.ExactStateParams.from_sim(params)
    xs, ts = _lattice(cfg)
    tt, xx = np.meshgrid(ts, xs, indexing="ij")
    psi = exact.coherent_state(p, xx, tt)
    name = cfg["name"]
    _write_csv(out / f"{name}_psi.csv", ["t", "x", "re", "im"],
               _long(ts, xs, psi.real, psi.imag), cfg, "exact")
    _write_csv(out / f"{name}_laser.csv", ["t", "x", "value"],
               _long(ts, xs, exact.laser_potential(p, xx, tt)), cfg, "exact")
    _write_csv(out / f"{name}_potential.csv", ["t", "x", "value"],
               _long(ts, xs, exact.total_potential(p, xx, tt)), cfg, "exact")
    return 0


def cmd_evolve(cfg: dict, out: Path) -> int:
    params = sim_params(cfg)
    ev = cfg["evolution"]
    mode = EvolutionMode(ev["mode"])
    name = cfg["name"]
    status = 0
    try:
        traj = evolve(initial_state(params), float(ev["t_end"]), params.dt, mode, params,
                      stride=ev["stride"])
    except BlowUpError as err:
        log.error("%s", err)
        traj, status = err.trajectory, 2
    _write_csv(out / f"{name}_diagnostics.csv", list(analysis.Diagnostics.FIELDS),
               traj.diagnostics_table(), cfg, "evolve")
    final = traj.final
    _write_csv(out / f"{name}_final.csv", ["x", "re", "im"],
               np.column_stack([final.grid.x, final.values.real, final.values.imag]),
               cfg, "evolve")
    return status


def run_verification(cfg: dict) -> dict:
    params = sim_params(cfg)
    ver = cfg["verify"]
    tol = ver["tolerances"]
    checks = []

    def check(name, value, limit, passed=None):
        ok = bool(value <= limit) if passed is None else bool(passed)
        checks.append({"name": name, "value": float(value), "tolerance": float(limit), "pass": ok})

    times = np.linspace(0, 2 * math.pi, int(ver["times"]))
    check("balance_residual", max(analysis.balance_residual(params, t) for t in times),
          tol["balance"])

    t_probe = 1.0
    check("pde_residual", analysis.pde_residual(params, t_probe, ver["dt_fd"]), tol["pde_residual"])
    steps = ver["dt_fd_refinements"]
    order = analysis.convergence_order(steps, [analysis.pde_residual(params, t_probe, h)
                                               for h in steps])
    check("pde_residual_order", abs(order - 2.0), tol["pde_order"])

    grid = grid_for(params)
    closed = analysis.exact_trajectory(params, [0.0, 2 * math.pi], grid)
    dens_err, phase_err = analysis.floquet_check(params, closed)
    check("exact_floquet_density", dens_err, tol["exact_floquet"])
    check("exact_floquet_phase", phase_err, tol["exact_floquet"])

    psi0 = initial_state(params, 0.0, grid)
    traj = evolve(psi0, 2 * math.pi, params.dt, EvolutionMode.NONLINEAR, params)
    check("round_trip", phase_removed_distance(grid, traj.final.values, psi0.values),
          tol["round_trip"])
    _, num_phase = analysis.floquet_check(params, traj)
    check("numerical_floquet_phase", num_phase, tol["numerical_floquet_phase"])
    norms = np.array([d.norm for d in traj.records])
    check("norm_drift", float(np.max(np.abs(norms - norms[0]))), tol["norm_drift"])

    status = "pass" if all(c["pass"] for c in checks) else "fail"
    return {"status": status, "checks": checks, "config": {k: v for k, v in cfg.items()
                                                            if k != "output_dir"}}


def cmd_verify(cfg: dict, out: Path) -> int:
    report = run_verification(cfg)
    _write_json(out / f"{cfg['name']}_verify.json", report)
    for c in report["checks"]:
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']:<26} {c['value']:.3e}"
              f"  (tol {c['tolerance']:.1e})")
    print(f"status: {report['status']}")
    return 0 if report["status"] == "pass" else 1


def cmd_figures(cfg: dict, out: Path) -> int:
    params = sim_params(cfg)
    g = abs(params.g1d)
    fig_dir = out / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    xs, ts = _lattice(cfg)
    tt, xx = np.meshgrid(ts, xs, indexing="ij")
    for name, (kind, n, sign) in FIGURE_PANELS.items():
        p = exact.ExactStateParams(n=n, x0=params.x0, mu=params.mu, g1d=sign * g)
        if kind == "density":
            _write_csv(fig_dir / f"{name}.csv", ["t", "x", "value"],
                       _long(ts, xs, exact.density(p, xx, tt)), cfg, "figures")
        elif kind == "laser":
            _write_csv(fig_dir / f"{name}.csv", ["t", "x", "value"],
                       _long(ts, xs, exact.laser_potential(p, xx, tt)), cfg, "figures")
        else:
            for suffix, t in PROFILE_TIMES.items():
                rows = np.column_stack([
                    np.full_like(xs, t), xs,
                    p.g1d * exact.density(p, xs, t),
                    exact.total_potential(p, xs, t),
                ])
                _write_csv(fig_dir / f"{name}{suffix}.csv",
                           ["t", "x", "g_density", "total_potential"], rows, cfg, "figures")
    return 0


def _perturbation(cfg: dict):
    st = cfg["stability"]
    kind = st["perturbation"]
    if kind == "center_shift":
        return analysis.CenterShift(float(st["magnitude"]))
    if kind == "amplitude_noise":
        return analysis.AmplitudeNoise(float(st["magnitude"]), seed=int(cfg["seed"]))
    raise ConfigurationError(f"unknown perturbation {kind!r}")


def cmd_stability(cfg: dict, out: Path) -> int:
    params = sim_params(cfg)
    pert = _perturbation(cfg)
    horizon = float(cfg["stability"]["horizon"])
    stride = cfg["evolution"]["stride"]
    name = cfg["name"]
    summaries = {}
    for label, sign in (("repulsive", 1), ("attractive", -1)):
        run = params.with_(g1d=sign * abs(params.g1d))
        report = analysis.stability_probe(run, pert, horizon, stride=stride)
        _write_csv(out / f"{name}_stability_{label}.csv",
                   ["t", "center_deviation", "l2_deviation"],
                   np.column_stack([report.times, report.center_deviation, report.l2_deviation]),
                   cfg, "stability")
        summaries[label] = report.summary()
    summary = {
        "reports": summaries,
        "attractive_deviates_more": summaries["attractive"]["max_center_deviation"]
        > summaries["repulsive"]["max_center_deviation"],
        "config": {k: v for k, v in cfg.items() if k != "output_dir"},
    }
    _write_json(out / f"{name}_stability.json", summary)
    for label, s in summaries.items():
        print(f"{label:<10} max center deviation {s['max_center_deviation']:.3e}"
              f"  max L2 deviation {s['max_l2_deviation']:.3e}  blow_up={s['blow_up']}")
    return 0


def cmd_convert(cfg: dict, out: Path) -> int:
    if "physical" not in cfg:
        raise ConfigurationError("convert needs a physical block (e.g. --preset li7)")
    p = physical_params(cfg)
    l_x, l_r = units.oscillator_lengths(p)
    params = sim_params(cfg)
    print(f"g1d = {units.interaction_strength(p):+.4f}")
    print(f"l_x = {l_x * 1e6:.4f} um")
    print(f"l_r = {l_r * 1e6:.4f} um")
    print(f"l_x/l_r = {l_x / l_r:.6f}")
    print(f"E_{params.n} = {units.quasienergy(params.n, params.mu):.6g} hbar*omega_x")
    if p.quasi_1d_violated:
        print("warning: omega_r/omega_x < 10, quasi-1D reduction questionable")
    return 0


COMMANDS = {
    "exact": cmd_exact,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
    "figures": cmd_figures,
    "stability": cmd_stability,
    "convert": cmd_convert,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coherent-soliton", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON scenario file")
    ap.add_argument("--preset", help=f"built-in scenario: {', '.join(sorted(PRESETS))}")
    ap.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./out)")
    ap.add_argument("--seed", type=int)
    for name in SIM_FLAGS:
        ap.add_argument(f"--{name}", type=int if name in ("n", "M") else float)
    ap.add_argument("--t-end", type=float)
    ap.add_argument("--stride", type=int)
    ap.add_argument("--set", action="append", metavar="KEY=JSON",
                    help="override any config field, e.g. --set stability.magnitude=0.2")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        out = Path(args.out or cfg.get("output_dir") or os.environ.get(OUT_ENV) or "out")
        if args.command != "convert":
            out.mkdir(parents=True, exist_ok=True)
            if not os.access(out, os.W_OK):
                raise ConfigurationError(f"output directory {out} is not writable")
        return COMMANDS[args.command](cfg, out)
    except (ConfigurationError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except BlowUpError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
