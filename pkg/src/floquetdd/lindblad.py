"""Dense Lindblad master-equation engine for small systems (d <= 16).

Models are time independent (the Floquet-Markov equation is integrated in
the interaction picture, the optical Bloch equations in the rotating
frame), so evolution reduces to a fixed-step fourth-order Runge-Kutta
integration of

    drho/dt = -i [H, rho] + sum_k g_k (L rho L^+ - {L^+ L, rho} / 2)

with Hermitization after every step, plus a superoperator-matrix path for
steady states and cross checks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bath import AtomGeometry, BathParams, gamma_thermal_pair, gamma_thermal_single, omega_dd
from .errors import SteadyStateDegeneracyError, StepUnderflowError, HierarchyViolationError
from .floquet import DriveParams, TimeGrid, dressed_states, floquet_solve

_RATE_CLAMP_TOL = 1e-12
_MAX_TOTAL_STEPS = 50_000_000


@dataclass(frozen=True)
class LindbladModel:
    """Hermitian Hamiltonian plus a list of (rate, jump operator) channels.

    Rates must be non-negative; round-off negatives within 1e-12 of the
    largest rate are clamped to zero with a warning, anything below that is
    rejected.
    """

    hamiltonian: np.ndarray
    channels: tuple = ()
    dimension: int = field(init=False)

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("hamiltonian must be a square matrix")
        scale = max(float(np.max(np.abs(h))), 1.0)
        if np.max(np.abs(h - h.conj().T)) > 1e-12 * scale:
            raise ValueError("hamiltonian must be Hermitian")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "dimension", h.shape[0])

        rate_scale = max((abs(float(r)) for r, _ in self.channels), default=0.0)
        cleaned = []
        for rate, op in self.channels:
            op = np.asarray(op, dtype=complex)
            if op.shape != h.shape:
                raise ValueError("jump operator dimension mismatch")
            rate = float(rate)
            if rate < 0.0:
                if rate < -_RATE_CLAMP_TOL * max(rate_scale, 1.0):
                    raise ValueError(f"negative channel rate {rate:.3e}")
                warnings.warn("clamping round-off-negative channel rate to zero")
                rate = 0.0
            cleaned.append((rate, op))
        object.__setattr__(self, "channels", tuple(cleaned))

    @property
    def max_rate(self) -> float:
        return max((r for r, _ in self.channels), default=0.0)


def validate_density_matrix(
    rho: np.ndarray,
    herm_tol: float = 1e-10,
    trace_tol: float = 1e-10,
    eig_floor: float = -1e-9,
) -> np.ndarray:
    """Check Hermiticity, unit trace and near-positivity of a state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > trace_tol or abs(np.trace(rho).imag) > trace_tol:
        raise ValueError("density matrix trace differs from one")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < eig_floor:
        raise ValueError("density matrix has a significantly negative eigenvalue")
    return rho


def build_liouvillian(model: LindbladModel) -> np.ndarray:
    """Superoperator matrix acting on C-order vectorized density matrices."""
    d = model.dimension
    ident = np.eye(d, dtype=complex)
    h = model.hamiltonian
    out = -1j * (np.kron(h, ident) - np.kron(ident, h.T))
    for rate, op in model.channels:
        ldl = op.conj().T @ op
        out += rate * (
            np.kron(op, op.conj())
            - 0.5 * np.kron(ldl, ident)
            - 0.5 * np.kron(ident, ldl.T)
        )
    return out


def _channel_products(model: LindbladModel):
    return tuple(
        (rate, op, op.conj().T, op.conj().T @ op)
        for rate, op in model.channels
        if rate > 0.0
    )


def _rhs(h: np.ndarray, products, rho: np.ndarray) -> np.ndarray:
    out = -1j * (h @ rho - rho @ h)
    for rate, op, op_dag, ldl in products:
        out += rate * (op @ rho @ op_dag - 0.5 * (ldl @ rho + rho @ ldl))
    return out


def _step_bound(model: LindbladModel, substep_factor: float) -> float:
    """Largest allowed step: 1 / (factor * max(||H||, max rate))."""
    h_norm = float(np.linalg.norm(model.hamiltonian, 2))
    scale = max(h_norm, model.max_rate)
    if scale == 0.0:
        return np.inf
    return 1.0 / (substep_factor * scale)


def evolve(
    model: LindbladModel,
    rho0: np.ndarray,
    times,
    substep_factor: float = 150.0,
) -> np.ndarray:
    """Integrate the master equation; returns states at the requested times.

    Classical fixed-step RK4 with Hermitization (rho -> (rho + rho^+)/2)
    after every step; the step never exceeds 1/(substep_factor * scale)
    with scale = max(||H||_2, max rate), and ``substep_factor`` must be at
    least 50 so fourth-order error stays far below the trace/positivity
    tolerances.
    """
    if substep_factor < 50.0:
        raise ValueError("substep_factor must be at least 50")
    rho = validate_density_matrix(rho0).copy()
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d array")
    if times[0] < 0.0 or np.any(np.diff(times) < 0.0):
        raise ValueError("times must be non-negative and non-decreasing")

    h_max = _step_bound(model, substep_factor)
    ham = model.hamiltonian
    products = _channel_products(model)
    out = np.empty((times.size,) + rho.shape, dtype=complex)
    t_now = 0.0
    total_steps = 0
    for idx, t_target in enumerate(times):
        span = t_target - t_now
        if span > 0.0 and np.isfinite(h_max):
            n_steps = max(int(np.ceil(span / h_max)), 1)
            total_steps += n_steps
            if total_steps > _MAX_TOTAL_STEPS:
                raise StepUnderflowError(
                    "integration would need more than "
                    f"{_MAX_TOTAL_STEPS} steps; rates and horizon are inconsistent"
                )
            h = span / n_steps
            for _ in range(n_steps):
                k1 = _rhs(ham, products, rho)
                k2 = _rhs(ham, products, rho + 0.5 * h * k1)
                k3 = _rhs(ham, products, rho + 0.5 * h * k2)
                k4 = _rhs(ham, products, rho + h * k3)
                rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                rho = 0.5 * (rho + rho.conj().T)
        t_now = t_target
        out[idx] = rho
    return out


def _propagate_uniform(model: LindbladModel, rho0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """States on a uniformly spaced time grid via the matrix exponential."""
    from scipy.linalg import expm

    steps = np.diff(times)
    if steps.size and not np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
        raise ValueError("uniform propagation needs equally spaced times")
    d = model.dimension
    out = np.empty((times.size, d, d), dtype=complex)
    rho = validate_density_matrix(rho0).copy()
    if times[0] != 0.0:
        rho = (expm(build_liouvillian(model) * times[0]) @ rho.reshape(-1)).reshape(d, d)
    out[0] = rho
    if steps.size:
        stepper = expm(build_liouvillian(model) * steps[0])
        vec = rho.reshape(-1)
        for k in range(1, times.size):
            vec = stepper @ vec
            rho = vec.reshape(d, d)
            rho = 0.5 * (rho + rho.conj().T)
            vec = rho.reshape(-1)
            out[k] = rho
    return out


def steady_state(model: LindbladModel) -> np.ndarray:
    """Unique trace-one null state of the Liouvillian.

    Found from the singular value decomposition; raises
    :class:`SteadyStateDegeneracyError` when the null space is not
    one-dimensional (gap tolerance 1e-12 relative to the largest singular
    value).
    """
    liou = build_liouvillian(model)
    _, singulars, vh = np.linalg.svd(liou)
    tol = 1e-12 * singulars[0]
    multiplicity = int(np.sum(singulars <= tol))
    if multiplicity != 1:
        raise SteadyStateDegeneracyError(max(multiplicity, 2))
    vec = vh[-1].conj()
    d = model.dimension
    rho = vec.reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)
    trace = np.trace(rho).real
    if abs(trace) < 1e-14:
        raise SteadyStateDegeneracyError(2)
    rho = rho / trace
    residual = np.linalg.norm(liou @ rho.reshape(-1))
    if residual > 1e-10 * max(np.linalg.norm(liou), 1.0):
        raise SteadyStateDegeneracyError(2)
    return rho


def _pauli_ops():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    lower = np.array([[0, 0], [1, 0]], dtype=complex)
    return sx, sz, lower


def obe_reference(
    drive: DriveParams,
    geometry: AtomGeometry,
    bath: BathParams,
    n_atoms: int = 2,
) -> LindbladModel:
    """Optical Bloch equations in the rotating frame for one or two atoms.

    Hamiltonian per atom: rabi/2 * sigma_x - detuning/2 * sigma_z; for two
    atoms the bare flip-flop coupling omega_dd(omega_eg) * (s+ s- + s- s+)
    is added.  Decay channels use the bare symmetric/antisymmetric lowering
    combinations with rates Gamma_11 +- Gamma_12 at omega_eg; for a warm
    bath the corresponding raising channels appear with the rates at
    -omega_eg.  Bare basis ordering: {|ee>, |eg>, |ge>, |gg>}.
    """
    if n_atoms not in (1, 2):
        raise ValueError("the Bloch-equation reference supports 1 or 2 atoms")
    sx, sz, lower = _pauli_ops()
    w_eg = drive.omega_eg
    g11_down = gamma_thermal_single(w_eg, geometry, bath)
    g11_up = gamma_thermal_single(-w_eg, geometry, bath)

    if n_atoms == 1:
        h = 0.5 * drive.rabi * sx - 0.5 * drive.detuning * sz
        channels = [(g11_down, lower)]
        if g11_up > 0.0:
            channels.append((g11_up, lower.conj().T))
        return LindbladModel(hamiltonian=h, channels=tuple(channels))

    eye = np.eye(2, dtype=complex)
    one = lambda op, site: np.kron(op, eye) if site == 0 else np.kron(eye, op)
    h = sum(0.5 * drive.rabi * one(sx, i) - 0.5 * drive.detuning * one(sz, i) for i in (0, 1))
    raiser = lower.conj().T
    flip_flop = np.kron(raiser, lower) + np.kron(lower, raiser)
    h = h + omega_dd(w_eg, geometry) * flip_flop

    g12_down = gamma_thermal_pair(w_eg, geometry, bath)
    g12_up = gamma_thermal_pair(-w_eg, geometry, bath)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    low_sym = inv_sqrt2 * (one(lower, 0) + one(lower, 1))
    low_asym = inv_sqrt2 * (one(lower, 0) - one(lower, 1))
    channels = [(g11_down + g12_down, low_sym), (g11_down - g12_down, low_asym)]
    if g11_up > 0.0:
        channels.append((g11_up + g12_up, low_sym.conj().T))
        channels.append((g11_up - g12_up, low_asym.conj().T))
    return LindbladModel(hamiltonian=h, channels=tuple(channels))


def coarse_grained_coefficients(theta_m: float, omega_dd_val: float) -> tuple[float, float]:
    """Closed-form coupling coefficients after time averaging the flip-flop.

        c_++ = 2 * W * cos^2(theta/2) sin^2(theta/2)
        c_+- = W * (sin^4(theta/2) + cos^4(theta/2))

    Their sum equals W for every mixing angle.
    """
    if not (0.0 <= theta_m <= np.pi):
        raise ValueError("theta_m must lie in [0, pi]")
    s2 = np.sin(0.5 * theta_m) ** 2
    c2 = np.cos(0.5 * theta_m) ** 2
    return (2.0 * omega_dd_val * c2 * s2, omega_dd_val * (s2 * s2 + c2 * c2))


def smoothed_populations(populations: np.ndarray, window: int) -> tuple[np.ndarray, slice]:
    """Centered moving average along the first axis.

    Returns the smoothed array together with the slice of original indices
    it aligns with (edges where the window does not fit are dropped).
    """
    populations = np.asarray(populations, dtype=float)
    if window < 1:
        raise ValueError("window must be positive")
    if window % 2 == 0:
        window += 1
    if window > populations.shape[0]:
        raise ValueError("window exceeds the trajectory length")
    kernel = np.full(window, 1.0 / window)
    cols = [np.convolve(populations[:, j], kernel, mode="valid") for j in range(populations.shape[1])]
    half = (window - 1) // 2
    return np.stack(cols, axis=1), slice(half, populations.shape[0] - half)


def max_population_deviation(pops_a: np.ndarray, pops_b: np.ndarray) -> float:
    """Largest absolute entrywise deviation between two population tables."""
    a = np.asarray(pops_a, dtype=float)
    b = np.asarray(pops_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("population tables must have equal shapes")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


@dataclass(frozen=True)
class FmeObeComparison:
    """Outcome of evolving the Floquet-Markov and Bloch models side by side.

    Populations are in the dressed/Floquet product basis ordering
    {++, +-, -+, --}; the smoothed Bloch populations carry a centered
    moving average over ``window_samples`` report steps (about ten dressed
    beat periods) and align with ``times[interior]``.
    """

    times: np.ndarray
    pop_fme: np.ndarray
    pop_obe: np.ndarray
    pop_obe_smoothed: np.ndarray
    interior: slice
    window_samples: int
    max_deviation: float


def fme_vs_obe_compare(
    drive: DriveParams,
    geometry: AtomGeometry,
    bath: BathParams,
    horizon: float,
    initial_label: str = "+-",
    n_samples: int = 1024,
    samples_per_beat: int = 16,
    margin: float = 10.0,
) -> FmeObeComparison:
    """Compare Floquet-Markov and Bloch-equation dynamics for the pair.

    Refuses (raising :class:`HierarchyViolationError`) unless the weak
    drive hierarchy 1/omega << 1/omega_gen << 1/|omega_dd| holds with the
    given margin factor and the quasienergy-spacing time scale is finite.
    Both models start in the same dressed product state and are advanced
    with the superoperator exponential on the uniform report grid; the
    Bloch trajectory is rotated into the dressed basis and smoothed over a
    10/omega_gen window before the deviation is taken.
    """
    from .dipole import build_channels, build_hdp2, coupling_coefficients, matrix_elements
    from .validity import timescale_report

    report = timescale_report(drive, geometry, bath, n_samples=n_samples, margin=margin)
    scales_ok = (
        report.hierarchy_ok
        and report.tau_omega * margin <= report.tau_omega_gen
        and report.tau_omega_gen * margin <= report.tau_s
    )
    if not scales_ok:
        raise HierarchyViolationError(
            "time-scale hierarchy violated: "
            f"tau_omega={report.tau_omega:.3e}, tau_mu={report.tau_mu:.3e}, "
            f"tau_omega_gen={report.tau_omega_gen:.3e}, tau_s={report.tau_s:.3e} "
            f"(margin factor {margin})"
        )
    gen = dressed_states(drive)

    labels = {"++": 0, "+-": 1, "-+": 2, "--": 3}
    if initial_label not in labels:
        raise ValueError(f"initial_label must be one of {sorted(labels)}")
    rho_f0 = np.zeros((4, 4), dtype=complex)
    rho_f0[labels[initial_label], labels[initial_label]] = 1.0

    sol = floquet_solve(drive, TimeGrid.for_drive(drive, n_samples))
    table = matrix_elements(sol)
    coeff = coupling_coefficients(table, sol, geometry)
    fme = LindbladModel(
        hamiltonian=build_hdp2(coeff),
        channels=tuple(build_channels(table, sol, geometry, bath)),
    )
    obe = obe_reference(drive, geometry, bath, n_atoms=2)

    # Dressed single-atom frame at t=0: columns |+>, |->.
    w1 = np.stack([gen.plus_state(), gen.minus_state()], axis=1)
    w2 = np.kron(w1, w1)
    rho_o0 = w2 @ rho_f0 @ w2.conj().T

    beat = 2.0 * np.pi / gen.omega_gen
    n_report = max(400, int(np.ceil(horizon / beat * samples_per_beat)))
    times = np.linspace(0.0, horizon, n_report + 1)

    # Both generators are time independent, so the trajectory on the uniform
    # report grid is one superoperator exponential applied repeatedly.
    traj_f = _propagate_uniform(fme, rho_f0, times)
    traj_o = _propagate_uniform(obe, rho_o0, times)

    pop_f = np.real(np.einsum("tii->ti", traj_f))
    dressed_o = np.einsum("ij,tjk,kl->til", w2.conj().T, traj_o, w2)
    pop_o = np.real(np.einsum("tii->ti", dressed_o))

    dt_report = times[1] - times[0]
    window = max(int(round(10.0 / gen.omega_gen / dt_report)), 1)
    smoothed, interior = smoothed_populations(pop_o, window)
    deviation = max_population_deviation(pop_f[interior], smoothed)
    return FmeObeComparison(
        times=times,
        pop_fme=pop_f,
        pop_obe=pop_o,
        pop_obe_smoothed=smoothed,
        interior=interior,
        window_samples=window,
        max_deviation=deviation,
    )
