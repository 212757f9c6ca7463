"""Batch command line front end.

Every subcommand reads one strict JSON scenario, computes deterministically
and writes CSV plus a JSON result bundle into the output directory.
Exit codes: 0 success, 1 invalid scenario or usage, 2 physics-domain
failure (degeneracies, truncation, hierarchy violations), 3 I/O failure.
Wall-clock timing goes to stderr only, keeping all emitted files
byte-identical across repeated runs.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bath import omega_dd
from .dipole import build_channels, build_hdp2, coupling_coefficients, matrix_elements
from .errors import PhysicsError, ScenarioError
from .floquet import TimeGrid, dressed_states, floquet_solve
from .io import ResultBundle, Table, emit_csv, emit_json, matrix_to_json
from .lindblad import (
    LindbladModel,
    evolve,
    fme_vs_obe_compare,
    obe_reference,
    coarse_grained_coefficients,
    steady_state,
)
from .scenario import Scenario, load_scenario, task_params
from .spin import build_spin_hamiltonian, j_tensor, pair_geometries_from_positions
from .validity import scan_tau_map, timescale_report


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors map to the invalid-scenario code
        raise ScenarioError(message)


def _solve(scenario: Scenario):
    grid = TimeGrid.for_drive(scenario.drive, scenario.numerics.n_samples)
    return floquet_solve(scenario.drive, grid, scenario.numerics.sideband_cutoff)


def _pipeline(scenario: Scenario):
    sol = _solve(scenario)
    table = matrix_elements(sol)
    coeff = coupling_coefficients(table, sol, scenario.geometry)
    return sol, table, coeff


def _fme_model(scenario: Scenario) -> LindbladModel:
    sol, table, coeff = _pipeline(scenario)
    channels = build_channels(table, sol, scenario.geometry, scenario.bath)
    return LindbladModel(hamiltonian=build_hdp2(coeff), channels=tuple(channels))


def _bundle(scenario: Scenario, task: str, outputs: dict) -> ResultBundle:
    return ResultBundle(
        task=task, inputs=scenario.raw, outputs=outputs, version=__version__
    )


def _run_floquet(scenario: Scenario, outdir, threads: int) -> None:
    sol = _solve(scenario)
    emit_csv(
        Table(
            columns=("branch", "quasienergy_rad_per_s", "quasienergy_over_omega"),
            rows=(
                ("plus", sol.mu_plus, sol.mu_plus / scenario.drive.omega),
                ("minus", sol.mu_minus, sol.mu_minus / scenario.drive.omega),
            ),
        ),
        outdir / "quasienergies.csv",
    )
    weights_p = sol.sideband_weights(0)
    weights_m = sol.sideband_weights(1)
    emit_csv(
        Table(
            columns=("n", "weight_plus", "weight_minus"),
            rows=tuple(
                (int(n), float(weights_p[i]), float(weights_m[i]))
                for i, n in enumerate(range(-sol.truncation, sol.truncation + 1))
            ),
        ),
        outdir / "sidebands.csv",
    )
    outputs = {
        "mu_plus": sol.mu_plus,
        "mu_minus": sol.mu_minus,
        "truncation": sol.truncation,
        "sideband_weights_plus": [float(w) for w in weights_p],
        "sideband_weights_minus": [float(w) for w in weights_m],
    }
    emit_json(_bundle(scenario, "floquet", outputs), outdir / "floquet.json")
    print(f"quasienergies: mu_plus={sol.mu_plus:.9e}  mu_minus={sol.mu_minus:.9e}")


def _run_coefficients(scenario: Scenario, outdir, threads: int) -> None:
    _, _, coeff = _pipeline(scenario)
    rows = tuple(
        (int(m), float(coeff.breakdown_pp[i]), float(coeff.breakdown_pm[i]))
        for i, m in enumerate(coeff.m_values)
    )
    emit_csv(
        Table(columns=("m", "c_pp_contribution", "c_pm_contribution"), rows=rows),
        outdir / "coefficients.csv",
    )
    outputs = {
        "c_pp": coeff.c_pp,
        "c_pm": coeff.c_pm,
        "m_values": [int(m) for m in coeff.m_values],
        "breakdown_pp": [float(v) for v in coeff.breakdown_pp],
        "breakdown_pm": [float(v) for v in coeff.breakdown_pm],
    }
    emit_json(_bundle(scenario, "coefficients", outputs), outdir / "coefficients.json")
    print(f"coefficients: c_pp={coeff.c_pp:.9e}  c_pm={coeff.c_pm:.9e}")


def _run_channels(scenario: Scenario, outdir, threads: int) -> None:
    sol, table, _ = _pipeline(scenario)
    channels = build_channels(table, sol, scenario.geometry, scenario.bath)
    emit_csv(
        Table(
            columns=("channel", "label", "rate_rad_per_s"),
            rows=tuple(
                (k + 1, channels.labels[k], float(channels.rates[k]))
                for k in range(6)
            ),
        ),
        outdir / "channels.csv",
    )
    outputs = {
        "rates": [float(r) for r in channels.rates],
        "labels": list(channels.labels),
        "operators": [matrix_to_json(op) for op in channels.operators],
    }
    emit_json(_bundle(scenario, "channels", outputs), outdir / "channels.json")
    print("channel rates:", " ".join(f"{r:.6e}" for r in channels.rates))


_FME_STATES = {"pp": 0, "pm": 1, "mp": 2, "mm": 3}
_OBE_STATES = {"ee": 0, "eg": 1, "ge": 2, "gg": 3}


def _initial_state(label: str, model: str) -> np.ndarray:
    states = _FME_STATES if model == "fme" else _OBE_STATES
    if label not in states:
        raise ScenarioError(
            f"initial_state must be one of {sorted(states)} for model '{model}'"
        )
    rho = np.zeros((4, 4), dtype=complex)
    rho[states[label], states[label]] = 1.0
    return rho


def _run_evolve(scenario: Scenario, outdir, threads: int) -> None:
    params = task_params(
        scenario,
        {
            "model": (True, str),
            "t_final": (True, float),
            "n_times": (False, int),
            "initial_state": (True, str),
        },
        "evolve",
    )
    model_name = params["model"]
    if model_name not in ("fme", "obe"):
        raise ScenarioError("task.model must be 'fme' or 'obe'")
    if params["t_final"] <= 0.0:
        raise ScenarioError("task.t_final must be positive")
    n_times = params.get("n_times", 201)
    if n_times < 2:
        raise ScenarioError("task.n_times must be at least 2")
    model = (
        _fme_model(scenario)
        if model_name == "fme"
        else obe_reference(scenario.drive, scenario.geometry, scenario.bath, n_atoms=2)
    )
    rho0 = _initial_state(params["initial_state"], model_name)
    times = np.linspace(0.0, params["t_final"], n_times)
    traj = evolve(model, rho0, times, substep_factor=scenario.numerics.substep_factor)
    pops = np.real(np.einsum("tii->ti", traj))
    basis = ("pp", "pm", "mp", "mm") if model_name == "fme" else ("ee", "eg", "ge", "gg")
    emit_csv(
        Table(
            columns=("time_s",) + tuple(f"pop_{b}" for b in basis) + ("trace",),
            rows=tuple(
                (float(times[i]),)
                + tuple(float(p) for p in pops[i])
                + (float(np.trace(traj[i]).real),)
                for i in range(times.size)
            ),
        ),
        outdir / "trajectory.csv",
    )
    outputs = {
        "model": model_name,
        "basis": list(basis),
        "final_state": matrix_to_json(traj[-1]),
    }
    emit_json(_bundle(scenario, "evolve", outputs), outdir / "evolve.json")
    print(f"evolved {model_name} to t={params['t_final']:.3e} s; final populations:", pops[-1])


def _run_steady(scenario: Scenario, outdir, threads: int) -> None:
    params = task_params(scenario, {"model": (True, str)}, "steady")
    if params["model"] not in ("fme", "obe"):
        raise ScenarioError("task.model must be 'fme' or 'obe'")
    model = (
        _fme_model(scenario)
        if params["model"] == "fme"
        else obe_reference(scenario.drive, scenario.geometry, scenario.bath, n_atoms=2)
    )
    rho = steady_state(model)
    rows = tuple(
        (i, j, float(rho[i, j].real), float(rho[i, j].imag))
        for i in range(rho.shape[0])
        for j in range(rho.shape[1])
    )
    emit_csv(Table(columns=("row", "col", "real", "imag"), rows=rows), outdir / "steady_state.csv")
    outputs = {"model": params["model"], "steady_state": matrix_to_json(rho)}
    emit_json(_bundle(scenario, "steady", outputs), outdir / "steady.json")
    print("steady-state populations:", np.real(np.diag(rho)))


def _run_spinmodel(scenario: Scenario, outdir, threads: int) -> None:
    params = task_params(
        scenario,
        {
            "n_atoms": (False, int),
            "positions": (False, list),
            "dipole_axis": (False, list),
            "evaluate_at": (False, str),
        },
        "spinmodel",
    )
    n_atoms = params.get("n_atoms", 2)
    evaluate_at = params.get("evaluate_at", "drive")
    if evaluate_at not in ("drive", "atom"):
        raise ScenarioError("task.evaluate_at must be 'drive' or 'atom'")
    if n_atoms == 2 and "positions" not in params:
        pair_geoms = {(0, 1): scenario.geometry}
    else:
        if "positions" not in params or "dipole_axis" not in params:
            raise ScenarioError(
                "spinmodel with n_atoms != 2 requires task.positions and task.dipole_axis"
            )
        pos = np.asarray(params["positions"], dtype=float)
        if pos.shape != (n_atoms, 3):
            raise ScenarioError("task.positions must list one 3-vector per atom")
        pair_geoms = pair_geometries_from_positions(
            pos, scenario.geometry.dipole_mag, params["dipole_axis"]
        )
    ham = build_spin_hamiltonian(n_atoms, pair_geoms, scenario.drive, evaluate_at=evaluate_at)

    freq = scenario.drive.omega if evaluate_at == "drive" else scenario.drive.omega_eg
    theta = dressed_states(scenario.drive).theta_m
    jt = j_tensor(theta, omega_dd(freq, scenario.geometry))
    emit_csv(
        Table(
            columns=("component", "value_rad_per_s"),
            rows=(
                ("j_xx", jt.j_xx),
                ("j_yy", jt.j_yy),
                ("j_zz", jt.j_zz),
                ("j_xz", jt.j_xz),
            ),
        ),
        outdir / "jtensor.csv",
    )
    emit_csv(
        Table(
            columns=("row", "col", "value_rad_per_s"),
            rows=tuple(
                (i, j, float(ham[i, j]))
                for i in range(ham.shape[0])
                for j in range(ham.shape[1])
            ),
        ),
        outdir / "spin_hamiltonian.csv",
    )
    outputs = {
        "theta_m": theta,
        "j_tensor": {"j_xx": jt.j_xx, "j_yy": jt.j_yy, "j_zz": jt.j_zz, "j_xz": jt.j_xz},
        "hamiltonian": matrix_to_json(ham),
    }
    emit_json(_bundle(scenario, "spinmodel", outputs), outdir / "spinmodel.json")
    print(f"J tensor (rad/s): xx={jt.j_xx:.6e} yy={jt.j_yy:.6e} zz={jt.j_zz:.6e} xz={jt.j_xz:.6e}")


def _run_taumap(scenario: Scenario, outdir, threads: int) -> None:
    params = task_params(
        scenario,
        {
            "rabi_over_omega_min": (True, float),
            "rabi_over_omega_max": (True, float),
            "n_rabi": (True, int),
            "omega_eg_over_omega_min": (True, float),
            "omega_eg_over_omega_max": (True, float),
            "n_omega_eg": (True, int),
        },
        "taumap",
    )
    if params["n_rabi"] < 1 or params["n_omega_eg"] < 1:
        raise ScenarioError("taumap grid sizes must be positive")
    omega = scenario.drive.omega
    rabi = np.linspace(
        params["rabi_over_omega_min"] * omega,
        params["rabi_over_omega_max"] * omega,
        params["n_rabi"],
    )
    omega_eg = np.linspace(
        params["omega_eg_over_omega_min"] * omega,
        params["omega_eg_over_omega_max"] * omega,
        params["n_omega_eg"],
    )
    tau_map = scan_tau_map(
        rabi, omega_eg, omega, n_samples=scenario.numerics.n_samples, threads=threads
    )
    emit_csv(
        Table(
            columns=("omega_R", "omega_eg", "tau_mu_inv_over_omega", "diverged"),
            rows=tuple(tau_map.rows()),
        ),
        outdir / "taumap.csv",
    )
    outputs = {
        "omega": omega,
        "n_rabi": params["n_rabi"],
        "n_omega_eg": params["n_omega_eg"],
        "n_diverged": int(tau_map.diverged.sum()),
    }
    emit_json(_bundle(scenario, "taumap", outputs), outdir / "taumap.json")
    print(f"taumap: {params['n_rabi']}x{params['n_omega_eg']} cells, {outputs['n_diverged']} flagged")


def _run_compare(scenario: Scenario, outdir, threads: int) -> None:
    params = task_params(
        scenario,
        {"horizon": (True, float), "initial_state": (False, str)},
        "compare",
    )
    if params["horizon"] <= 0.0:
        raise ScenarioError("task.horizon must be positive")
    label = params.get("initial_state", "+-")
    comparison = fme_vs_obe_compare(
        scenario.drive,
        scenario.geometry,
        scenario.bath,
        params["horizon"],
        initial_label=label,
        n_samples=scenario.numerics.n_samples,
    )
    basis = ("pp", "pm", "mp", "mm")
    emit_csv(
        Table(
            columns=("time_s",)
            + tuple(f"fme_{b}" for b in basis)
            + tuple(f"obe_{b}" for b in basis),
            rows=tuple(
                (float(comparison.times[i]),)
                + tuple(float(p) for p in comparison.pop_fme[i])
                + tuple(float(p) for p in comparison.pop_obe[i])
                for i in range(comparison.times.size)
            ),
        ),
        outdir / "compare_raw.csv",
    )
    interior_times = comparison.times[comparison.interior]
    emit_csv(
        Table(
            columns=("time_s",)
            + tuple(f"fme_{b}" for b in basis)
            + tuple(f"obe_smoothed_{b}" for b in basis),
            rows=tuple(
                (float(interior_times[i]),)
                + tuple(float(p) for p in comparison.pop_fme[comparison.interior][i])
                + tuple(float(p) for p in comparison.pop_obe_smoothed[i])
                for i in range(interior_times.size)
            ),
        ),
        outdir / "compare_populations.csv",
    )
    outputs = {
        "max_deviation": comparison.max_deviation,
        "window_samples": comparison.window_samples,
        "n_times": int(comparison.times.size),
        "initial_state": label,
    }
    emit_json(_bundle(scenario, "compare", outputs), outdir / "compare.json")
    print(f"max dressed-population deviation: {comparison.max_deviation:.6e}")


def _run_reproduce_paper(scenario: Scenario, outdir, threads: int) -> None:
    """Quantitative endpoints: interaction energy, J ratios, coefficient check."""
    drive = scenario.drive
    geometry = scenario.geometry
    raw_drive = scenario.raw["drive"]
    raw_omega_eg = (
        raw_drive["omega_eg"]
        if "omega_eg" in raw_drive
        else raw_drive["omega"] - raw_drive["detuning"]
    )
    w_eg_angular = raw_omega_eg  # read the quoted number as rad/s
    w_eg_ordinary = 2.0 * np.pi * raw_omega_eg  # read it as Hz

    om_angular = omega_dd(w_eg_angular, geometry)
    om_ordinary = omega_dd(w_eg_ordinary, geometry)

    theta = dressed_states(drive).theta_m
    om_drive = omega_dd(drive.omega_eg, geometry)
    jt = j_tensor(theta, om_drive)

    _, _, coeff = _pipeline(scenario)
    cg_pp, cg_pm = coarse_grained_coefficients(theta, om_drive)
    rel_pp = abs(coeff.c_pp - cg_pp) / abs(cg_pm)
    rel_pm = abs(coeff.c_pm - cg_pm) / abs(cg_pm)

    report = timescale_report(drive, geometry, scenario.bath, n_samples=scenario.numerics.n_samples)

    rows = (
        ("omega_dd_angular_reading", om_angular),
        ("omega_dd_ordinary_reading", om_ordinary),
        ("j_xx", jt.j_xx),
        ("j_yy", jt.j_yy),
        ("j_zz", jt.j_zz),
        ("j_xz", jt.j_xz),
        ("j_xx_over_j_yy", jt.j_xx / jt.j_yy),
        ("j_xx_over_j_zz", jt.j_xx / jt.j_zz),
        ("c_pp_numeric", coeff.c_pp),
        ("c_pm_numeric", coeff.c_pm),
        ("c_pp_closed_form", cg_pp),
        ("c_pm_closed_form", cg_pm),
        ("c_pp_rel_dev", rel_pp),
        ("c_pm_rel_dev", rel_pm),
        ("tau_omega_s", report.tau_omega),
        ("tau_mu_s", report.tau_mu),
        ("tau_omega_gen_s", report.tau_omega_gen),
        ("tau_s_s", report.tau_s),
    )
    emit_csv(Table(columns=("quantity", "value"), rows=rows), outdir / "paper_endpoints.csv")
    outputs = {name: float(value) for name, value in rows}
    outputs["hierarchy_ok"] = bool(report.hierarchy_ok)
    emit_json(_bundle(scenario, "reproduce-paper", outputs), outdir / "paper_endpoints.json")
    print(f"omega_dd (angular reading): {om_angular:.6e} rad/s")
    print(f"J_xx/J_yy = {jt.j_xx / jt.j_yy:.12f}, J_xx/J_zz = {jt.j_xx / jt.j_zz:.12f}")
    print(f"coefficient closed-form deviations: {rel_pp:.3e}, {rel_pm:.3e}")


_RUNNERS = {
    "floquet": _run_floquet,
    "coefficients": _run_coefficients,
    "channels": _run_channels,
    "evolve": _run_evolve,
    "steady": _run_steady,
    "spinmodel": _run_spinmodel,
    "taumap": _run_taumap,
    "compare": _run_compare,
    "reproduce-paper": _run_reproduce_paper,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="floquetdd", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True, help="path to the JSON scenario")
        p.add_argument("--out", required=True, help="output directory (created if absent)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for scans")
        p.add_argument("--seed", type=int, default=None, help="reserved, currently unused")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise ScenarioError("--threads must be positive")
        scenario = load_scenario(args.scenario)
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        started = time.perf_counter()
        _RUNNERS[args.subcommand](scenario, outdir, args.threads)
        print(
            f"{args.subcommand} finished in {time.perf_counter() - started:.2f} s",
            file=sys.stderr,
        )
    except ScenarioError as err:
        print(f"error: invalid scenario: {err}", file=sys.stderr)
        return 1
    except PhysicsError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: I/O failure: {err}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
