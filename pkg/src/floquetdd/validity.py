"""Secular-approximation diagnostics and time-scale bookkeeping.

The Lindblad form of the driven-pair master equation requires the
quasienergy-spacing time scale tau_mu to sit well between the drive period
and the system response time tau_s ~ 1/|omega_dd|.  This module computes
tau_mu from folded quasienergies, scans it over drive-parameter maps with
divergence-stripe detection, and assembles hierarchy reports.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bath import AtomGeometry, BathParams, omega_dd
from .errors import DegenerateQuasienergiesError
from .floquet import (
    DriveParams,
    FloquetSolution,
    TimeGrid,
    dressed_states,
    floquet_solve,
    quasienergy_magnitude_map,
)
from .errors import UndefinedMixingAngleError

_DIVERGENCE_TOL = 1e-12


@dataclass(frozen=True)
class TimescaleReport:
    """Hierarchy of the four relevant time scales for one scenario.

    ``hierarchy_ok`` demands tau_omega <= tau_mu / margin and
    tau_mu <= tau_s / margin (the "much smaller than" orderings quantified
    by the margin factor, default 10).  ``margin_low`` is tau_mu/tau_omega
    and ``margin_high`` is tau_s/tau_mu; both may be infinite.
    """

    tau_omega: float
    tau_mu: float
    tau_s: float
    tau_omega_gen: float
    hierarchy_ok: bool
    margin_low: float
    margin_high: float
    margin: float


def tau_mu(drive: DriveParams, sol: FloquetSolution) -> float:
    """Inverse minimal quasienergy-spacing scale (seconds, possibly inf).

    With the folded |mu_+| the three candidate spacings are

        |omega - 2|mu_+||,   2|mu_+|,   |omega - 4|mu_+||

    and tau_mu is the inverse of their minimum; below 1e-12 * omega the
    scale is reported as infinite (divergence).  The same expression holds
    for any atom number because product quasienergies are sums of the
    single-atom pair.
    """
    omega = drive.omega
    mu_abs = abs(sol.mu_plus)
    if 2.0 * mu_abs >= omega:
        raise ValueError("zone condition violated: 2|mu_+| must stay below omega")
    inv = min(omega - 2.0 * mu_abs, 2.0 * mu_abs, abs(omega - 4.0 * mu_abs))
    if inv < _DIVERGENCE_TOL * omega:
        return np.inf
    return 1.0 / inv


@dataclass(frozen=True)
class TauMap:
    """tau_mu^-1 scan over a (rabi, omega_eg) grid at fixed drive frequency.

    ``tau_inv_over_omega`` is zero on cells flagged divergent; ``diverged``
    marks both sub-tolerance minima and stripe crossings (sign changes of
    the quarter-zone argument, tangencies of the zone edge/center) between
    neighboring cells.
    """

    omega: float
    rabi_values: np.ndarray
    omega_eg_values: np.ndarray
    tau_inv_over_omega: np.ndarray
    diverged: np.ndarray

    def rows(self):
        """Row-major (rabi outer, omega_eg inner) CSV rows."""
        for i, rabi in enumerate(self.rabi_values):
            for j, w_eg in enumerate(self.omega_eg_values):
                yield (
                    float(rabi),
                    float(w_eg),
                    float(self.tau_inv_over_omega[i, j]),
                    int(self.diverged[i, j]),
                )


def _stripe_flags(half_trace: np.ndarray, tau_inv: np.ndarray, omega: float) -> np.ndarray:
    """Divergence flags: threshold hits plus crossings of the stripe loci.

    cos(|mu_+| T) = 0 is exactly the quarter-zone stripe; +-1 tangencies
    are the zone-center/edge collisions.  Sign changes are attributed to
    both neighboring cells, which keeps the flagged set connected along
    smooth stripe curves.
    """
    flags = tau_inv < _DIVERGENCE_TOL * omega
    flags = flags | (np.abs(half_trace) >= 1.0 - _DIVERGENCE_TOL)
    sign = np.sign(half_trace)
    cross_rows = sign[:, 1:] * sign[:, :-1] < 0
    flags[:, 1:] |= cross_rows
    flags[:, :-1] |= cross_rows
    cross_cols = sign[1:, :] * sign[:-1, :] < 0
    flags[1:, :] |= cross_cols
    flags[:-1, :] |= cross_cols
    return flags


def scan_tau_map(
    rabi_values,
    omega_eg_values,
    omega: float,
    n_samples: int = 512,
    threads: int = 1,
) -> TauMap:
    """Vectorized tau_mu^-1 map over drive strength and atomic splitting.

    Each cell is an independent monodromy computation; rows are chunked
    across a thread pool when ``threads`` > 1 (results are identical for
    any thread count).
    """
    rabi = np.asarray(rabi_values, dtype=float)
    omega_eg = np.asarray(omega_eg_values, dtype=float)
    if rabi.size == 0 or omega_eg.size == 0:
        raise ValueError("scan grids must be non-empty")
    if np.any(rabi < 0.0) or np.any(omega_eg <= 0.0):
        raise ValueError("rabi must be >= 0 and omega_eg > 0 everywhere")
    if threads < 1:
        raise ValueError("threads must be positive")

    if threads == 1 or rabi.size < 2 * threads:
        mu_abs, half_trace = quasienergy_magnitude_map(rabi, omega_eg, omega, n_samples)
    else:
        chunks = np.array_split(np.arange(rabi.size), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(
                    lambda idx: quasienergy_magnitude_map(
                        rabi[idx], omega_eg, omega, n_samples
                    ),
                    chunks,
                )
            )
        mu_abs = np.concatenate([p[0] for p in parts], axis=0)
        half_trace = np.concatenate([p[1] for p in parts], axis=0)

    spacings = np.stack(
        [
            omega - 2.0 * mu_abs,
            2.0 * mu_abs,
            np.abs(omega - 4.0 * mu_abs),
        ]
    )
    tau_inv = spacings.min(axis=0)
    flags = _stripe_flags(half_trace, tau_inv, omega)
    tau_inv_over_omega = np.where(tau_inv < _DIVERGENCE_TOL * omega, 0.0, tau_inv / omega)
    return TauMap(
        omega=omega,
        rabi_values=rabi,
        omega_eg_values=omega_eg,
        tau_inv_over_omega=tau_inv_over_omega,
        diverged=flags.astype(int),
    )


def timescale_report(
    drive: DriveParams,
    geometry: AtomGeometry,
    bath: BathParams,
    n_samples: int = 1024,
    margin: float = 10.0,
) -> TimescaleReport:
    """Assemble the time-scale hierarchy for one physical scenario.

    Always returns a report: a quasienergy collision (degenerate monodromy)
    is reported as tau_mu = inf with the hierarchy flagged as violated
    rather than raised.  The bath parameters do not enter the scales and
    are accepted for interface symmetry only.
    """
    del bath
    tau_omega = 1.0 / drive.omega
    try:
        sol = floquet_solve(drive, TimeGrid.for_drive(drive, n_samples))
        t_mu = tau_mu(drive, sol)
    except DegenerateQuasienergiesError:
        t_mu = np.inf
    try:
        t_gen = 1.0 / dressed_states(drive).omega_gen
    except UndefinedMixingAngleError:
        t_gen = np.inf
    interaction = abs(omega_dd(drive.omega_eg, geometry))
    tau_s = np.inf if interaction == 0.0 else 1.0 / interaction

    margin_low = t_mu / tau_omega
    margin_high = tau_s / t_mu if np.isfinite(t_mu) else 0.0
    ok = bool(
        np.isfinite(t_mu)
        and margin_low >= margin
        and tau_s >= margin * t_mu
    )
    return TimescaleReport(
        tau_omega=tau_omega,
        tau_mu=t_mu,
        tau_s=tau_s,
        tau_omega_gen=t_gen,
        hierarchy_ok=ok,
        margin_low=margin_low,
        margin_high=margin_high,
        margin=margin,
    )
