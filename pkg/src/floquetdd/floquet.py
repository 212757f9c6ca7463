"""Single-atom Floquet problem for a cosine-driven two-level atom.

The lab-frame Hamiltonian, in the basis ``{|e>, |g>}`` (index 0 = excited),
is

    H(t) = rabi * cos(omega * t) * sigma_x + (omega_eg / 2) * sigma_z

All frequencies are angular (rad/s).  The one-period propagator is built
from exact 2x2 exponentials of a fourth-order commutator-free Magnus step,
so every sample is unitary by construction.  Quasienergies are folded into
the zone ``(-omega/2, omega/2]`` and the two Floquet branches are labelled
"+" / "-" by overlap with the analytic weak-drive dressed states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateQuasienergiesError, UndefinedMixingAngleError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Two-point Gauss-Legendre nodes and weights of the fourth-order
# commutator-free Magnus step: one step over h is
#   exp(-i h (A1*H(c1) + A2*H(c2))) applied after exp(-i h (A2*H(c1) + A1*H(c2)))
_CF4_NODE_1 = 0.5 - np.sqrt(3.0) / 6.0
_CF4_NODE_2 = 0.5 + np.sqrt(3.0) / 6.0
_CF4_A1 = 0.25 - np.sqrt(3.0) / 6.0
_CF4_A2 = 0.25 + np.sqrt(3.0) / 6.0

_DEGENERACY_TOL = 1e-12
_DISCARDED_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class DriveParams:
    """Monochromatic drive acting on one two-level atom.

    Attributes:
        omega: drive angular frequency (rad/s, > 0)
        rabi: Rabi frequency (rad/s, >= 0)
        omega_eg: atomic transition angular frequency (rad/s, > 0)
        detuning: omega - omega_eg, stored for convenience
    """

    omega: float
    rabi: float
    omega_eg: float
    detuning: float = field(init=False)

    def __post_init__(self):
        for name in ("omega", "rabi", "omega_eg"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega <= 0.0:
            raise ValueError("omega must be positive")
        if self.omega_eg <= 0.0:
            raise ValueError("omega_eg must be positive")
        if self.rabi < 0.0:
            raise ValueError("rabi must be non-negative")
        object.__setattr__(self, "detuning", self.omega - self.omega_eg)

    @classmethod
    def from_detuning(cls, omega: float, rabi: float, detuning: float) -> "DriveParams":
        return cls(omega=omega, rabi=rabi, omega_eg=omega - detuning)

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    def hamiltonian(self, t: float) -> np.ndarray:
        return self.rabi * np.cos(self.omega * t) * SIGMA_X + 0.5 * self.omega_eg * SIGMA_Z


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling of one drive period.

    ``n_samples`` must be a power of two (>= 64) so discrete Fourier
    transforms pair exactly with the sample grid.  Sample k sits at
    ``t_k = k * period / n_samples``.
    """

    n_samples: int
    period: float

    def __post_init__(self):
        n = self.n_samples
        if n < 64 or (n & (n - 1)) != 0:
            raise ValueError("n_samples must be a power of two, at least 64")
        if not (np.isfinite(self.period) and self.period > 0.0):
            raise ValueError("period must be positive and finite")

    @classmethod
    def for_drive(cls, drive: DriveParams, n_samples: int = 1024) -> "TimeGrid":
        return cls(n_samples=n_samples, period=drive.period)

    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) * (self.period / self.n_samples)


@dataclass(frozen=True)
class DressedStates:
    """Weak-drive (rotating wave) dressed-state reference.

    ``cos(theta_m) = -detuning / omega_gen`` with ``theta_m`` in [0, pi];
    the unfolded quasienergies are ``(omega +- omega_gen) / 2``.
    """

    theta_m: float
    mu_plus: float
    mu_minus: float
    omega_gen: float

    def plus_state(self) -> np.ndarray:
        """|+> at t=0 in the bare basis {|e>, |g>} (drive phase removed)."""
        half = 0.5 * self.theta_m
        return np.array([np.cos(half), np.sin(half)], dtype=complex)

    def minus_state(self) -> np.ndarray:
        half = 0.5 * self.theta_m
        return np.array([-np.sin(half), np.cos(half)], dtype=complex)


@dataclass(frozen=True)
class FloquetSolution:
    """Quasienergies, periodic modes and sideband amplitudes of one atom.

    Branch index 0 is "+", branch index 1 is "-".  ``modes[b, k]`` is the
    periodic mode phi_b(t_k) in the bare basis; ``fourier[b, truncation + n]``
    is the Fourier amplitude phi_b^(n) with phi(t) = sum_n phi^(n) e^{i n w t},
    for |n| <= truncation.
    """

    drive: DriveParams
    grid: TimeGrid
    mu_plus: float
    mu_minus: float
    modes: np.ndarray
    fourier: np.ndarray
    truncation: int

    @property
    def quasienergies(self) -> tuple[float, float]:
        return (self.mu_plus, self.mu_minus)

    def mode(self, branch: int) -> np.ndarray:
        return self.modes[branch]

    def fourier_amplitude(self, branch: int, n: int) -> np.ndarray:
        if abs(n) > self.truncation:
            raise ValueError(f"sideband index {n} beyond truncation {self.truncation}")
        return self.fourier[branch, self.truncation + n]

    def sideband_weights(self, branch: int) -> np.ndarray:
        """|phi^(n)|^2 summed over components, n = -truncation..truncation."""
        return np.sum(np.abs(self.fourier[branch]) ** 2, axis=-1)


def fold_to_zone(mu: float, omega: float) -> float:
    """Fold a quasienergy into the zone (-omega/2, omega/2].

    The result is congruent to ``mu`` modulo ``omega``.
    """
    if not (np.isfinite(mu) and np.isfinite(omega)):
        raise ValueError("mu and omega must be finite")
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    folded = mu - omega * np.floor(mu / omega + 0.5)
    if folded <= -0.5 * omega:
        folded += omega
    return float(folded)


def _su2_exponentials(px: np.ndarray, pz: np.ndarray) -> np.ndarray:
    """exp(-i (px*sigma_x + pz*sigma_z)) for arrays of coefficients.

    Exact for every input; returns shape ``px.shape + (2, 2)``.
    """
    px, pz = np.broadcast_arrays(
        np.asarray(px, dtype=float), np.asarray(pz, dtype=float)
    )
    angle = np.hypot(px, pz)
    # sin(a)/a is 1 at a=0; the where-guard avoids 0/0.
    safe = np.where(angle == 0.0, 1.0, angle)
    sinc = np.where(angle == 0.0, 1.0, np.sin(safe) / safe)
    cos = np.cos(angle)
    out = np.empty(px.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = cos - 1j * sinc * pz
    out[..., 0, 1] = -1j * sinc * px
    out[..., 1, 0] = -1j * sinc * px
    out[..., 1, 1] = cos + 1j * sinc * pz
    return out


def _step_matrices(drive: DriveParams, grid: TimeGrid) -> np.ndarray:
    """Per-step CF4 propagators U(t_{k+1}, t_k), shape (n_samples, 2, 2)."""
    dt = grid.period / grid.n_samples
    t0 = np.arange(grid.n_samples) * dt
    hx1 = drive.rabi * np.cos(drive.omega * (t0 + _CF4_NODE_1 * dt))
    hx2 = drive.rabi * np.cos(drive.omega * (t0 + _CF4_NODE_2 * dt))
    hz = 0.5 * drive.omega_eg
    first = _su2_exponentials(dt * (_CF4_A2 * hx1 + _CF4_A1 * hx2), dt * 0.5 * hz)
    second = _su2_exponentials(dt * (_CF4_A1 * hx1 + _CF4_A2 * hx2), dt * 0.5 * hz)
    return second @ first


def propagate_period(drive: DriveParams, grid: TimeGrid) -> np.ndarray:
    """Propagators U(t_k, 0) over one period, shape (n_samples + 1, 2, 2).

    Entry k is U(t_k, 0) with t_k = k * period / n_samples; entry 0 is the
    identity and the last entry is the one-period (monodromy) propagator.
    Every entry is unitary to machine precision because each step is an
    exact 2x2 exponential.
    """
    steps = _step_matrices(drive, grid)
    out = np.empty((grid.n_samples + 1, 2, 2), dtype=complex)
    out[0] = np.eye(2)
    for k in range(grid.n_samples):
        out[k + 1] = steps[k] @ out[k]
    return out


def dressed_states(drive: DriveParams) -> DressedStates:
    """Analytic rotating-wave dressed states of the drive.

    Raises :class:`UndefinedMixingAngleError` when the generalized Rabi
    frequency sqrt(detuning^2 + rabi^2) vanishes.
    """
    omega_gen = float(np.hypot(drive.detuning, drive.rabi))
    if omega_gen == 0.0:
        raise UndefinedMixingAngleError(
            "omega_gen = 0: resonant undriven atom has no dressed basis"
        )
    theta = float(np.arccos(np.clip(-drive.detuning / omega_gen, -1.0, 1.0)))
    return DressedStates(
        theta_m=theta,
        mu_plus=0.5 * (drive.omega + omega_gen),
        mu_minus=0.5 * (drive.omega - omega_gen),
        omega_gen=omega_gen,
    )


def _orthonormal_eigenpairs(monodromy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormalized eigenvectors of a 2x2 unitary."""
    values, vectors = np.linalg.eig(monodromy)
    if abs(values[0] - values[1]) < _DEGENERACY_TOL:
        raise DegenerateQuasienergiesError(
            "monodromy eigenvalues coincide within 1e-12; "
            "perturb the drive parameters"
        )
    v0 = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
    v1 = vectors[:, 1] - v0 * np.vdot(v0, vectors[:, 1])
    v1 = v1 / np.linalg.norm(v1)
    return values, np.stack([v0, v1], axis=1)


def floquet_solve(drive: DriveParams, grid: TimeGrid, truncation: int = 16) -> FloquetSolution:
    """Solve the one-atom Floquet problem on the given grid.

    Diagonalizes the monodromy operator, folds the eigenphases into the
    quasienergy zone, and builds the periodic modes phi(t_k) together with
    their Fourier amplitudes.  ``truncation`` is the smallest sideband cutoff
    kept; it is enlarged automatically until the discarded Fourier weight of
    both branches drops below 1e-12 (never beyond n_samples / 4).
    """
    if truncation < 1 or truncation > grid.n_samples // 4:
        raise ValueError("truncation must satisfy 1 <= M <= n_samples / 4")
    propagators = propagate_period(drive, grid)
    values, vectors = _orthonormal_eigenpairs(propagators[-1])

    mus = [fold_to_zone(-float(np.angle(v)) / grid.period, drive.omega) for v in values]

    # Branch labels: maximal overlap with the analytic dressed "+" state at
    # t=0; ties fall back to the |e> population, then the folded quasienergy.
    try:
        plus_ref = dressed_states(drive).plus_state()
        overlaps = np.abs(plus_ref.conj() @ vectors) ** 2
    except UndefinedMixingAngleError:
        overlaps = np.abs(vectors[0, :]) ** 2
    if abs(overlaps[0] - overlaps[1]) > 1e-12:
        plus = int(np.argmax(overlaps))
    else:
        e_pop = np.abs(vectors[0, :]) ** 2
        if abs(e_pop[0] - e_pop[1]) > 1e-12:
            plus = int(np.argmax(e_pop))
        else:
            plus = int(np.argmax(mus))
    minus = 1 - plus

    times = grid.times()
    # phi_b(t_k) = e^{i mu_b t_k} U(t_k, 0) v_b
    modes = np.empty((2, grid.n_samples, 2), dtype=complex)
    for row, branch in enumerate((plus, minus)):
        phases = np.exp(1j * mus[branch] * times)
        modes[row] = phases[:, None] * (propagators[:-1] @ vectors[:, branch])

    # phi^(n) = (1/T) integral phi(t) e^{-i n w t} dt  ->  forward DFT / n.
    spectra = np.fft.fft(modes, axis=1) / grid.n_samples
    weights = np.sum(np.abs(spectra) ** 2, axis=-1)

    m_kept = min(truncation, grid.n_samples // 4)
    while m_kept < grid.n_samples // 4:
        kept = np.concatenate([np.arange(0, m_kept + 1), np.arange(-m_kept, 0)])
        discarded = 1.0 - weights[:, kept].sum(axis=1).min()
        if discarded < _DISCARDED_WEIGHT_TOL:
            break
        m_kept += 2
    m_kept = min(m_kept, grid.n_samples // 4)

    indexes = np.arange(-m_kept, m_kept + 1) % grid.n_samples
    fourier = spectra[:, indexes, :]

    return FloquetSolution(
        drive=drive,
        grid=grid,
        mu_plus=mus[plus],
        mu_minus=mus[minus],
        modes=modes,
        fourier=fourier,
        truncation=m_kept,
    )


def quasienergy_magnitude_map(
    rabi_values: np.ndarray,
    omega_eg_values: np.ndarray,
    omega: float,
    n_samples: int = 512,
) -> tuple[np.ndarray, np.ndarray]:
    """|mu_+| and cos(mu_+ T) on a (rabi, omega_eg) parameter grid.

    Vectorized over all grid cells at once: the monodromy of the traceless
    2x2 problem lies in SU(2), so |mu_+| = arccos(Re tr U / 2) / T without
    any eigendecomposition or branch labelling.  Returns two arrays of shape
    ``(len(rabi_values), len(omega_eg_values))``: the folded quasienergy
    magnitude and the monodromy half-trace (useful for crossing detection).
    """
    if omega <= 0.0 or not np.isfinite(omega):
        raise ValueError("omega must be positive and finite")
    rabi = np.asarray(rabi_values, dtype=float)
    omega_eg = np.asarray(omega_eg_values, dtype=float)
    if rabi.ndim != 1 or omega_eg.ndim != 1 or rabi.size == 0 or omega_eg.size == 0:
        raise ValueError("rabi_values and omega_eg_values must be non-empty 1-d arrays")
    period = 2.0 * np.pi / omega
    dt = period / n_samples

    rr = rabi[:, None]
    ee = omega_eg[None, :]
    shape = (rabi.size, omega_eg.size)
    hz = np.broadcast_to(0.5 * ee, shape)

    u = np.broadcast_to(np.eye(2, dtype=complex), shape + (2, 2)).copy()
    t0 = np.arange(n_samples) * dt
    cos1 = np.cos(omega * (t0 + _CF4_NODE_1 * dt))
    cos2 = np.cos(omega * (t0 + _CF4_NODE_2 * dt))
    for k in range(n_samples):
        hx1 = rr * cos1[k]
        hx2 = rr * cos2[k]
        first = _su2_exponentials(dt * (_CF4_A2 * hx1 + _CF4_A1 * hx2), dt * 0.5 * hz)
        second = _su2_exponentials(dt * (_CF4_A1 * hx1 + _CF4_A2 * hx2), dt * 0.5 * hz)
        u = second @ (first @ u)

    half_trace = 0.5 * np.real(u[..., 0, 0] + u[..., 1, 1])
    half_trace = np.clip(half_trace, -1.0, 1.0)
    mu_abs = np.arccos(half_trace) / period
    return mu_abs, half_trace
