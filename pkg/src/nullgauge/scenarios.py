"""Scenario orchestration: run simulations, write CSV series + manifest, verify suites.

Exit codes: 0 success, 1 configuration error, 2 invariant failure,
3 runtime breakdown (e.g. the reconstruction radicand going negative).
A manifest is written for every run, including failed ones.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, bohm, diracflow, emonly, kgm, majorana, unitary
from .config import ScenarioConfig
from .errors import SimulationError
from .grid import GridSpec
from .states import ComplexKgmState, UnitaryState

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INVARIANT = 2
EXIT_RUNTIME = 3


@dataclass
class RunResult:
    exit_code: int
    manifest: dict
    csv_paths: list = field(default_factory=list)
    figure_paths: list = field(default_factory=list)


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(path: Path, columns, rows) -> Path:
    """RFC-4180-style CSV with a mandatory header row and reproducible floats."""
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_csv(path):
    """Columns dict from a headered CSV of floats (non-float cells kept as strings)."""
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    header = text[0].split(",")
    cols: dict = {h: [] for h in header}
    for line in text[1:]:
        for h, cell in zip(header, line.split(",")):
            try:
                cols[h].append(float(cell))
            except ValueError:
                cols[h].append(cell)
    return {h: (np.asarray(v) if v and isinstance(v[0], float) else v) for h, v in cols.items()}


def _initial_complex_state(config: ScenarioConfig) -> ComplexKgmState:
    recipe = config.initial["recipe"]
    if recipe == "gaussian_packet":
        return kgm.gaussian_packet_state(
            config.grid, config.consts,
            amplitude=config.initial["amplitude"],
            sigma=config.initial["sigma"],
            k0=config.initial["k0"],
            offset=config.initial["offset"],
        )
    if recipe == "plane_wave":
        return kgm.plane_wave_state(
            config.grid, config.consts,
            mode=config.initial["mode"],
            amplitude=config.initial["amplitude"],
        )
    if recipe == "csv":
        return kgm.state_from_csv(config.initial["path"], config.grid)
    raise SimulationError(f"unknown recipe {recipe!r}")


def _initial_unitary_state(config: ScenarioConfig) -> UnitaryState:
    node_thr = config.tolerances.get("node_threshold") or None
    result = unitary.to_unitary(_initial_complex_state(config), config.consts, node_threshold=node_thr)
    return unitary.project_continuity(result.unitary)


# ---------------------------------------------------------------------------
# scenario implementations; each returns (columns, rows, invariants, extras)
# ---------------------------------------------------------------------------

def _run_kgm(config: ScenarioConfig):
    state = _initial_complex_state(config)
    consts = config.consts
    n_steps = max(1, round(config.params["t_final"] / config.grid.dt))
    rows = []
    q0 = None
    for step in range(n_steps + 1):
        if step % config.params["record_every"] == 0 or step == n_steps:
            d = kgm.kgm_diagnostics(state, consts)
            if q0 is None:
                q0 = d.total_charge
            rows.append((state.t, d.total_charge, d.lorenz_residual_max, d.energy, d.current_divergence_max))
        if step < n_steps:
            state = kgm.kgm_step(state, consts)
    drift = abs(rows[-1][1] - q0) / max(abs(q0), 1e-300)
    tol = config.tolerances["charge_drift"]
    invariants = [
        {"name": "charge-conservation", "value": drift, "tolerance": tol, "passed": drift <= tol},
    ]
    cols = ("t", "total_charge", "lorenz_residual_max", "energy", "current_divergence_max")
    return cols, rows, invariants, {}


def _run_unitary(config: ScenarioConfig):
    state = _initial_unitary_state(config)
    consts = config.consts
    n_steps = max(1, round(config.params["t_final"] / config.grid.dt))
    rows = []
    q0 = None
    for step in range(n_steps + 1):
        if step % config.params["record_every"] == 0 or step == n_steps:
            j0, _ = unitary.unitary_current(state, consts)
            q = float(j0.sum() * config.grid.dx)
            if q0 is None:
                q0 = q
            rows.append((
                state.t, q,
                float(np.abs(unitary.gauss_residual(state, consts)).max()),
                float(np.abs(unitary.continuity_residual(state)).max()),
                float(state.phi.min()), float(state.phi.max()),
                float(np.abs(state.b0).min()),
            ))
        if step < n_steps:
            state = unitary.unitary_step(state, consts)
    drift = abs(rows[-1][1] - q0) / max(abs(q0), 1e-300)
    tol = config.tolerances["charge_drift"]
    invariants = [
        {"name": "charge-conservation", "value": drift, "tolerance": tol, "passed": drift <= tol},
    ]
    cols = ("t", "total_charge", "gauss_residual_max", "continuity_residual_max",
            "phi_min", "phi_max", "b0_min_abs")
    return cols, rows, invariants, {}


def _run_em_only(config: ScenarioConfig):
    consts = config.consts
    state = _initial_unitary_state(config)
    em = emonly.project_em_only(state, consts)
    n_steps = max(1, round(config.params["t_final"] / config.grid.dt))
    rows = []
    for step in range(n_steps + 1):
        if step % config.params["record_every"] == 0 or step == n_steps:
            rep = emonly.reconstruct_report(em, consts)
            rows.append((
                em.t, rep.radicand_min, rep.b0_min_abs,
                float(rep.phi_rec.min()), float(rep.phi_rec.max()),
            ))
        if step < n_steps:
            em = emonly.em_only_step(em, consts)
    cols = ("t", "radicand_min", "b0_min_abs", "phi_rec_min", "phi_rec_max")
    return cols, rows, [], {}


def _run_compare(config: ScenarioConfig):
    consts = config.consts
    state = _initial_unitary_state(config)
    series = emonly.compare_evolutions(
        state, consts, config.params["t_final"], record_every=config.params["record_every"]
    )
    rows = list(zip(series.t, series.l2_b0, series.l2_b1, series.linf_b0,
                    series.linf_b1, series.radicand_min, series.b0_min_abs))
    cols = ("t", "l2_B0", "l2_B1", "linf_B0", "linf_B1", "radicand_min", "b0_min_abs")
    extras = {}
    if series.failure is not None:
        raise SimulationError(
            f"compare failed on the {series.failure.path} path at t={series.failure.t:.6g}: {series.failure.cause}"
        )
    bnorm = math.sqrt(float(((state.b0**2 + state.b1**2) * config.grid.dx).sum()))
    final_div = math.sqrt(series.l2_b0[-1] ** 2 + series.l2_b1[-1] ** 2)
    extras["final_relative_divergence"] = final_div / bnorm
    return cols, rows, [], extras


def _run_convergence(config: ScenarioConfig):
    """Compare scenario at successively halved (dx, dt); reports observed orders."""
    levels = config.params["refinements"] + 1
    finals = []
    grids = []
    for level in range(levels):
        grid = GridSpec(
            config.grid.n_x * 2**level, config.grid.dx / 2**level, config.grid.dt / 2**level
        )
        sub = ScenarioConfig(
            scenario="compare", grid=grid, consts=config.consts, seed=config.seed,
            out_dir=config.out_dir, initial=config.initial, params=config.params,
            tolerances=config.tolerances,
        )
        _, _, _, extras = _run_compare(sub)
        finals.append(extras["final_relative_divergence"])
        grids.append(grid)
    rows = []
    orders = []
    for i, (g, err) in enumerate(zip(grids, finals)):
        order = math.log2(finals[i - 1] / err) if i > 0 and err > 0 else float("nan")
        if i > 0:
            orders.append(order)
        rows.append((g.n_x, g.dx, g.dt, err, order))
    cols = ("n_x", "dx", "dt", "final_relative_divergence", "observed_order")
    inv = [{
        "name": "em-only-equivalence-order",
        "value": min(orders) if orders else float("nan"),
        "tolerance": 1.7,
        "passed": bool(orders) and min(orders) >= 1.7,
    }]
    return cols, rows, inv, {"orders": orders}


def _run_bohm(config: ScenarioConfig):
    consts = config.consts
    state = _initial_unitary_state(config)
    n_steps = max(1, round(config.params["t_final"] / config.grid.dt))
    states = unitary.unitary_evolve(state, consts, n_steps)
    ens = bohm.sample_ensemble(states[0], consts, config.params["particles"], config.seed)
    result = bohm.advect_ensemble(ens, states, consts)
    bins = config.params["bins"]
    hist, _ = bohm.density_histogram(result.positions[-1], config.grid.length, bins)
    dens = bohm.field_density_binned(states[-1], consts, bins)
    width = config.grid.length / bins
    l1 = float(np.abs(hist - dens).sum() * width)
    rows = [(result.times[i], float(result.max_velocity[i])) for i in range(len(result.times))]
    cols = ("t", "max_velocity")
    centers = (np.arange(bins) + 0.5) * width
    hist_rows = list(zip(centers, hist, dens))
    inv = [{"name": "ensemble-density-l1", "value": l1, "tolerance": 0.05, "passed": l1 <= 0.05}]
    extras = {
        "histogram": (("bin_center", "ensemble_density", "field_density"), hist_rows),
        "l1_distance": l1,
        "stopped_particles": len(result.stopped),
        "rng_seed": config.seed,
    }
    return cols, rows, inv, extras


def _run_dirac_flow(config: ScenarioConfig):
    consts = config.consts
    pot = diracflow.RapidityPotential(consts, u0=config.params["u0"], q=config.params["q"])
    dtau = config.params["dtau"]
    n_steps = config.params["n_steps"]
    x0 = (0.0, 0.4)
    a0, a1 = pot.a(*x0)
    particle = diracflow.RelParticle(np.array(x0), np.array([-consts.e * a0, -consts.e * a1]))
    flow = diracflow.flow_line(pot, consts, x0, dtau, n_steps)
    rows = []
    worst_ms = worst_cd = worst_div = 0.0
    for i in range(n_steps):
        particle = diracflow.lorentz_push(particle, pot, consts, dtau)
        ms = abs(diracflow.mass_shell_residual(particle, consts))
        cd = diracflow.codirection_residual(particle, pot, consts)
        div = float(max(abs(particle.x[0] - flow[i + 1, 0]), abs(particle.x[1] - flow[i + 1, 1])))
        worst_ms, worst_cd, worst_div = max(worst_ms, ms), max(worst_cd, cd), max(worst_div, div)
        if (i + 1) % config.params["record_every"] == 0 or i == n_steps - 1:
            rows.append((particle.tau, particle.x[0], particle.x[1], particle.p[0], particle.p[1],
                         flow[i + 1, 0], flow[i + 1, 1], ms, cd, div))
    res = diracflow.dirac_residuals(pot, consts, np.linspace(0.0, 2 * np.pi / config.params["q"], 64))
    inv = [
        {"name": "push-vs-flow", "value": worst_div, "tolerance": 1e-6, "passed": worst_div <= 1e-6},
        {"name": "mass-shell", "value": worst_ms, "tolerance": 1e-8, "passed": worst_ms <= 1e-8},
        {"name": "constraint", "value": res.constraint_max, "tolerance": 1e-12,
         "passed": res.constraint_max <= 1e-12},
    ]
    cols = ("tau", "t", "x", "p0", "p1", "t_flow", "x_flow", "mass_shell_residual",
            "codirection_residual", "path_divergence")
    return cols, rows, inv, {"eq_space_residual_max": res.eq_space_residual_max}


def majorana_property_table(trials: int, seed: int):
    """(columns, rows, invariants) for the spinor identity suite over both representations."""
    rows = []
    invariants = []
    rng = np.random.default_rng(seed)
    for gs in (majorana.dirac_representation(), majorana.majorana_representation()):
        rep = gs.representation
        cliff = majorana.clifford_residual(gs)
        null_worst = axial_worst = prop_worst = aa_worst = 0.0
        for _ in range(trials):
            psi = majorana.random_majorana(gs, rng)
            j = majorana.dirac_current(psi, gs)
            null_worst = max(null_worst, abs(majorana.minkowski_square(j)) / j[0] ** 2)
            ax = majorana.axial_current(psi, gs)
            n2 = float(np.real(np.conj(psi) @ psi))
            axial_worst = max(axial_worst, float(np.abs(ax).max()) / n2)
            basis, _ = majorana.slash_nullspace(psi, gs)
            for a in basis:
                aa_worst = max(aa_worst, abs(majorana.minkowski_square(a)) / float(a @ a))
                prop_worst = max(prop_worst, majorana.proportionality_residual(a, j))
        checks = [
            ("clifford-relations", cliff, 1e-12),
            ("null-current", null_worst, 1e-12),
            ("axial-current-vanishes", axial_worst, 1e-12),
            ("nullspace-vectors-null", aa_worst, 1e-10),
            ("nullspace-parallel-to-current", prop_worst, 1e-10),
        ]
        for name, value, tol in checks:
            rows.append((name, rep, trials, value, tol, value <= tol))
            invariants.append({"name": f"{name}[{rep}]", "value": value, "tolerance": tol,
                               "passed": bool(value <= tol)})
    cols = ("property", "representation", "trials", "max_residual", "tolerance", "passed")
    return cols, rows, invariants


def _run_majorana_suite(config: ScenarioConfig):
    cols, rows, invariants = majorana_property_table(config.params["trials"], config.seed)
    return cols, rows, invariants, {}


_RUNNERS = {
    "kgm": _run_kgm,
    "unitary": _run_unitary,
    "em-only": _run_em_only,
    "compare": _run_compare,
    "bohm": _run_bohm,
    "dirac-flow": _run_dirac_flow,
    "majorana-suite": _run_majorana_suite,
    "convergence": _run_convergence,
}


def run_scenario(config: ScenarioConfig, out_dir=None, plot: bool = True) -> RunResult:
    """Execute one scenario, writing series CSV, manifest, and (optionally) figures."""
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest: dict = {
        "version": __version__,
        "config": config.echo(),
        "started": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "status": "ok",
        "failure": None,
        "invariants": [],
        "series": None,
        "figures": [],
    }
    csv_paths = []
    figure_paths = []
    exit_code = EXIT_OK
    try:
        cols, rows, invariants, extras = _RUNNERS[config.scenario](config)
        series_path = write_csv(out / f"{config.scenario}_series.csv", cols, rows)
        csv_paths.append(series_path)
        manifest["series"] = {"file": series_path.name, "columns": list(cols), "rows": len(rows)}
        manifest["invariants"] = invariants
        if "histogram" in extras:
            hcols, hrows = extras.pop("histogram")
            hist_path = write_csv(out / "bohm_histogram.csv", hcols, hrows)
            csv_paths.append(hist_path)
            manifest["histogram_file"] = hist_path.name
        manifest["extras"] = {k: v for k, v in extras.items() if isinstance(v, (int, float, str, list))}
        if plot:
            from . import plots
            figure_paths = plots.render_scenario(config.scenario, out, cols, rows, manifest)
            manifest["figures"] = [p.name for p in figure_paths]
        if any(not inv["passed"] for inv in invariants):
            manifest["status"] = "invariant-failure"
            exit_code = EXIT_INVARIANT
    except SimulationError as exc:
        manifest["status"] = "runtime-breakdown"
        manifest["failure"] = {"type": type(exc).__name__, "message": str(exc),
                               "t": getattr(exc, "t", None)}
        exit_code = EXIT_RUNTIME
    manifest["finished"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    manifest["exit_code"] = exit_code
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n",
                                       encoding="utf-8")
    return RunResult(exit_code, manifest, csv_paths, figure_paths)


# ---------------------------------------------------------------------------
# convergence-order post-processing of compare CSVs
# ---------------------------------------------------------------------------

def convergence_report(paths):
    """Richardson-style observed orders from three compare-series CSVs (coarse to fine).

    Series are aligned on common times; per-quantity orders use the final
    common time.  Raises on misaligned inputs.
    """
    if len(paths) != 3:
        raise SimulationError("convergence_report needs exactly three series")
    tables = [read_csv(p) for p in paths]
    for tb in tables:
        if "t" not in tb:
            raise SimulationError("series missing the t column")
    common = set(np.round(tables[0]["t"], 12))
    for tb in tables[1:]:
        common &= set(np.round(tb["t"], 12))
    if len(common) < 2:
        raise SimulationError("time grids share fewer than two instants; cannot align")
    t_end = max(common)
    quantities = [c for c in tables[0] if c != "t" and all(c in tb for tb in tables)]
    report = {}
    for q in quantities:
        vals = []
        for tb in tables:
            idx = int(np.argmin(np.abs(tb["t"] - t_end)))
            vals.append(abs(float(tb[q][idx])))
        if min(vals) <= 0:
            orders = (float("nan"), float("nan"))
        else:
            orders = (math.log2(vals[0] / vals[1]), math.log2(vals[1] / vals[2]))
        report[q] = {"values": vals, "orders": orders}
    return report
