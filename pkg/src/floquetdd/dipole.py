"""Dipole couplings between Floquet states of two driven atoms.

Combines a single-atom Floquet solution with the reservoir spectral
functions: sideband-resolved matrix elements of sigma_x, the two coupling
coefficients of the dressed-pair interaction Hamiltonian, the six decay
channels of the two-atom Lindblad equation, and general-N jump-operator
builders.

Two-atom matrices use the product Floquet basis in the fixed ordering
``{|++>, |+->, |-+>, |-->}``.  Sideband index convention:

    <<phi_a| sigma_x |phi_b>>_m = (1/T) int_0^T <phi_a(t)|sigma_x|phi_b(t)> e^{+i m w t} dt
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .bath import (
    AtomGeometry,
    BathParams,
    gamma_thermal_pair,
    gamma_thermal_single,
    omega_dd,
)
from .errors import NonCompletelyPositiveError, SidebandTruncationError
from .floquet import SIGMA_X, DriveParams, FloquetSolution

_CONVERGED_RING_TOL = 1e-10

PLUS, MINUS = 0, 1

_BASIS_LABELS = ("++", "+-", "-+", "--")


@dataclass(frozen=True)
class MatrixElementTable:
    """Sideband matrix elements <<phi_a|sigma_x|phi_b>>_m for |m| <= truncation.

    ``entries[a, b, truncation + m]`` holds the element with branch indices
    0 = "+", 1 = "-".
    """

    entries: np.ndarray
    truncation: int

    def entry(self, alpha: int, beta: int, m: int) -> complex:
        if abs(m) > self.truncation:
            raise ValueError(f"sideband index {m} beyond truncation {self.truncation}")
        return complex(self.entries[alpha, beta, self.truncation + m])

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(-self.truncation, self.truncation + 1)

    def column_weight(self, beta: int) -> float:
        """sum_{alpha, m} |<<phi_a|sigma_x|phi_b>>_m|^2 (sum rule -> 1)."""
        return float(np.sum(np.abs(self.entries[:, beta, :]) ** 2))


@dataclass(frozen=True)
class CouplingCoefficients:
    """Coefficients of the two-atom dipole Hamiltonian in the Floquet basis.

    ``c_pp`` multiplies the sigma_z-like (population) part and ``c_pm`` the
    excitation-exchange part; the per-sideband breakdown carries one
    contribution per m for diagnostics.  Totals are the exact sums of their
    breakdown arrays.
    """

    c_pp: float
    c_pm: float
    m_values: np.ndarray
    breakdown_pp: np.ndarray
    breakdown_pm: np.ndarray


@dataclass(frozen=True)
class ChannelSet:
    """Diagonal Lindblad channels (rate, jump operator) of the driven pair.

    Operators are 4x4 matrices in the ordering {|++>, |+->, |-+>, |-->};
    all six jump operators are unit-normalized symmetric/antisymmetric
    one-atom combinations so the channel rates are the physical collective
    (superradiant/subradiant) rates.
    """

    rates: np.ndarray
    operators: np.ndarray
    labels: tuple

    def __iter__(self):
        return iter(zip(self.rates, self.operators))


def _sigma_x_spectrum(sol: FloquetSolution) -> np.ndarray:
    """All DFT bins of <phi_a(t)|sigma_x|phi_b(t)>, shape (2, 2, n_samples)."""
    sx_modes = sol.modes @ SIGMA_X.T  # sigma_x |phi_b(t_k)>
    n = sol.grid.n_samples
    out = np.empty((2, 2, n), dtype=complex)
    for a in range(2):
        for b in range(2):
            samples = np.sum(sol.modes[a].conj() * sx_modes[b], axis=-1)
            # ifft carries both the e^{+imwt} kernel and the 1/n average
            out[a, b] = np.fft.ifft(samples)
    return out


def matrix_elements(sol: FloquetSolution, truncation: int | None = None) -> MatrixElementTable:
    """Sideband matrix elements of sigma_x between the Floquet branches.

    The element products spread over twice the mode bandwidth, so the
    default cutoff is twice the solution's sideband truncation (capped at
    the grid Nyquist index).
    """
    n = sol.grid.n_samples
    if truncation is None:
        truncation = min(2 * sol.truncation, n // 2 - 1)
    if truncation < 1 or truncation > n // 2 - 1:
        raise ValueError("cutoff must satisfy 1 <= M <= n_samples/2 - 1")
    spectrum = _sigma_x_spectrum(sol)
    indexes = np.arange(-truncation, truncation + 1) % n
    return MatrixElementTable(entries=spectrum[:, :, indexes], truncation=truncation)


def coupling_coefficients(
    table: MatrixElementTable,
    sol: FloquetSolution,
    geometry: AtomGeometry,
    drive: DriveParams | None = None,
) -> CouplingCoefficients:
    """Coupling coefficients c_++ and c_+- from sideband sums.

        c_++ = sum_m |<<phi_+|sx|phi_+>>_m|^2 * omega_dd(m w)
        c_+- = sum_m |<<phi_-|sx|phi_+>>_m|^2 * omega_dd(mu_+ - mu_- + m w)

    The sums must be converged: the two outermost sideband rings may not
    contribute more than 1e-10 of the larger coefficient, otherwise a
    :class:`SidebandTruncationError` asks for a larger table.
    """
    if drive is None:
        drive = sol.drive
    ms = table.m_values
    delta = sol.mu_plus - sol.mu_minus
    w_pp = np.abs(table.entries[PLUS, PLUS, :]) ** 2
    w_mp = np.abs(table.entries[MINUS, PLUS, :]) ** 2
    om_pp = np.array([omega_dd(m * drive.omega, geometry) for m in ms])
    om_pm = np.array([omega_dd(delta + m * drive.omega, geometry) for m in ms])
    breakdown_pp = w_pp * om_pp
    breakdown_pm = w_mp * om_pm

    scale = max(abs(breakdown_pp.sum()), abs(breakdown_pm.sum()))
    if scale > 0.0 and table.truncation >= 3:
        outer = np.zeros(ms.size, dtype=bool)
        outer[:2] = outer[-2:] = True
        ring_pp = abs(breakdown_pp[outer].sum())
        ring_pm = abs(breakdown_pm[outer].sum())
        if max(ring_pp, ring_pm) > _CONVERGED_RING_TOL * scale:
            raise SidebandTruncationError(
                "sideband sums not converged at cutoff "
                f"{table.truncation}; enlarge the matrix-element table"
            )
    return CouplingCoefficients(
        c_pp=float(breakdown_pp.sum()),
        c_pm=float(breakdown_pm.sum()),
        m_values=ms,
        breakdown_pp=breakdown_pp,
        breakdown_pm=breakdown_pm,
    )


def build_hdp2(coeff: CouplingCoefficients) -> np.ndarray:
    """Two-atom dipole Hamiltonian in the product Floquet basis.

    c_++ weights the parity pattern (+1, -1, -1, +1) on the diagonal and
    c_+- the exchange coupling between |+-> and |-+>.
    """
    if not (np.isfinite(coeff.c_pp) and np.isfinite(coeff.c_pm)):
        raise ValueError("coefficients must be finite")
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = coeff.c_pp
    h[1, 1] = -coeff.c_pp
    h[2, 2] = -coeff.c_pp
    h[3, 3] = coeff.c_pp
    h[1, 2] = coeff.c_pm
    h[2, 1] = coeff.c_pm
    return h


def _one_atom_ops():
    proj_p = np.diag([1.0, 0.0]).astype(complex)
    proj_m = np.diag([0.0, 1.0]).astype(complex)
    lower = np.zeros((2, 2), dtype=complex)
    lower[1, 0] = 1.0  # |-><+|
    return proj_p - proj_m, lower


def build_channels(
    table: MatrixElementTable,
    sol: FloquetSolution,
    geometry: AtomGeometry,
    bath: BathParams,
) -> ChannelSet:
    """Six diagonal decay channels of the driven identical pair.

    Rates pair the single-atom and collective thermal rates as
    Gamma_11 +- Gamma_12 evaluated at the sideband-shifted transition
    frequencies m w (population channels), m w + (mu_+ - mu_-) (downward
    dressed transitions) and m w - (mu_+ - mu_-) (upward ones).  Jump
    operators are the unit-normalized symmetric/antisymmetric one-atom
    combinations, so each rate is directly the physical collective rate.
    """
    ms = table.m_values
    delta = sol.mu_plus - sol.mu_minus
    omega = sol.drive.omega

    w_pp = np.abs(table.entries[PLUS, PLUS, :]) ** 2
    w_mp = np.abs(table.entries[MINUS, PLUS, :]) ** 2
    w_pm = np.abs(table.entries[PLUS, MINUS, :]) ** 2

    def g11(x):
        return gamma_thermal_single(x, geometry, bath)

    def g12(x):
        return gamma_thermal_pair(x, geometry, bath)

    def rate_pair(weights, shift):
        tot_sum = 0.0
        tot_dif = 0.0
        ring = 0.0
        for w, m in zip(weights, ms):
            arg = m * omega + shift
            a, b = g11(arg), g12(arg)
            tot_sum += w * (a + b)
            tot_dif += w * (a - b)
            if abs(m) >= table.truncation - 1:
                ring += w * (abs(a) + abs(b))
        return tot_sum, tot_dif, ring

    g1, g2, ring1 = rate_pair(w_pp, 0.0)
    g3, g4, ring3 = rate_pair(w_mp, delta)
    g5, g6, ring5 = rate_pair(w_pm, -delta)
    scale = max(g1, g3, g5)
    if scale > 0.0 and max(ring1, ring3, ring5) > _CONVERGED_RING_TOL * scale:
        raise SidebandTruncationError(
            "decay-rate sideband sums not converged at cutoff "
            f"{table.truncation}; enlarge the matrix-element table"
        )

    sz, lower = _one_atom_ops()
    eye = np.eye(2, dtype=complex)
    raiser = lower.conj().T
    inv_sqrt2 = 1.0 / np.sqrt(2.0)

    def sym(op):
        return inv_sqrt2 * (np.kron(op, eye) + np.kron(eye, op))

    def asym(op):
        return inv_sqrt2 * (np.kron(op, eye) - np.kron(eye, op))

    operators = np.stack(
        [sym(sz), asym(sz), sym(lower), asym(lower), sym(raiser), asym(raiser)]
    )
    rates = np.array([g1, g2, g3, g4, g5, g6])
    labels = (
        "population symmetric",
        "population antisymmetric",
        "lowering symmetric",
        "lowering antisymmetric",
        "raising symmetric",
        "raising antisymmetric",
    )
    return ChannelSet(rates=rates, operators=operators, labels=labels)


def _sigma_x_coefficient(spectrum: np.ndarray, alpha: int, beta: int, m: int, n: int) -> complex:
    return complex(spectrum[alpha, beta, m % n])


def quasienergy_difference_classes(
    solutions: list, omega: float, tol_factor: float = 1e-9
) -> np.ndarray:
    """Distinct pairwise product-quasienergy differences, grouped within tolerance.

    Product quasienergies are plain sums of the folded single-atom ones;
    differences closer than ``tol_factor * omega`` fall into one class and
    are represented by their mean.  Sorted ascending.
    """
    mus = _product_quasienergies(solutions)
    diffs = np.sort((mus[None, :] - mus[:, None]).ravel())
    tol = tol_factor * omega
    classes = []
    start = 0
    for i in range(1, diffs.size + 1):
        if i == diffs.size or diffs[i] - diffs[i - 1] > tol:
            classes.append(diffs[start:i].mean())
            start = i
    return np.array(classes)


def _product_quasienergies(solutions: list) -> np.ndarray:
    singles = [(s.mu_plus, s.mu_minus) for s in solutions]
    mus = []
    for combo in itertools.product((0, 1), repeat=len(solutions)):
        mus.append(sum(singles[i][b] for i, b in enumerate(combo)))
    return np.array(mus)


def build_D_operators(
    solutions: list,
    m: int,
    delta_mu: float,
    tol_factor: float = 1e-9,
) -> list[np.ndarray]:
    """Per-atom secular jump blocks D_m^i at quasienergy difference delta_mu.

    For N atoms (N <= 6) in the product Floquet basis at t = 0:

        D_m^i = sum_{mu_B - mu_A = delta_mu} <<phi_a|sigma_x_i|phi_b>>_m |A><B|

    where only the atom-i branch differs between A and B.  Differences are
    matched within ``tol_factor * omega``; an empty match yields the zero
    operator.
    """
    n_atoms = len(solutions)
    if n_atoms < 1 or n_atoms > 6:
        raise ValueError("supported atom counts are 1..6")
    omega = solutions[0].drive.omega
    tol = tol_factor * omega
    n = solutions[0].grid.n_samples
    spectra = [_sigma_x_spectrum(s) for s in solutions]
    singles = [(s.mu_plus, s.mu_minus) for s in solutions]

    combos = list(itertools.product((0, 1), repeat=n_atoms))
    index = {c: i for i, c in enumerate(combos)}
    mus = _product_quasienergies(solutions)

    dim = 2**n_atoms
    ops = [np.zeros((dim, dim), dtype=complex) for _ in range(n_atoms)]
    for i in range(n_atoms):
        for bra in combos:  # A: target of the jump
            for a_branch in (0, 1):
                ket = bra[:i] + (a_branch,) + bra[i + 1 :]  # B: source
                row, col = index[bra], index[ket]
                if abs((mus[col] - mus[row]) - delta_mu) > tol:
                    continue
                elem = _sigma_x_coefficient(spectra[i], bra[i], ket[i], m, n)
                ops[i][row, col] += elem
    return ops


def dissipator_blocks(
    table: MatrixElementTable,
    sol: FloquetSolution,
    geometry: AtomGeometry,
    bath: BathParams,
) -> list[tuple[np.ndarray, list[np.ndarray]]]:
    """Generic (rate-matrix, jump-operator) blocks of the two-atom dissipator.

    One block per (m, delta_mu) combination with the 2x2 thermal rate matrix
    [[G11, G12], [G12, G11]] at argument m w + delta_mu and the per-atom
    secular operators from :func:`build_D_operators`.  Blocks whose operators
    vanish are dropped.
    """
    omega = sol.drive.omega
    classes = quasienergy_difference_classes([sol, sol], omega)
    blocks = []
    for delta_mu in classes:
        for m in table.m_values:
            ops = build_D_operators([sol, sol], int(m), float(delta_mu))
            if all(np.allclose(op, 0.0, atol=0.0) for op in ops):
                continue
            arg = m * omega + delta_mu
            g11 = gamma_thermal_single(arg, geometry, bath)
            g12 = gamma_thermal_pair(arg, geometry, bath)
            gamma_matrix = np.array([[g11, g12], [g12, g11]])
            blocks.append((gamma_matrix, ops))
    return blocks


def diagonalize_dissipator(
    blocks: list[tuple[np.ndarray, list[np.ndarray]]],
) -> list[tuple[float, np.ndarray]]:
    """Diagonal Lindblad channels from rate-matrix blocks.

    Each Hermitian positive-semidefinite rate matrix is eigendecomposed and
    its eigenvectors combine the jump operators; for the symmetric 2x2 case
    this yields rates Gamma_11 +- Gamma_12 with (D_1 +- D_2)/sqrt(2).
    Raises :class:`NonCompletelyPositiveError` on a genuinely negative
    eigenvalue; round-off negatives are clamped to zero.
    """
    channels = []
    for gamma_matrix, ops in blocks:
        gm = np.asarray(gamma_matrix, dtype=complex)
        scale = float(np.linalg.norm(gm))
        if scale == 0.0:
            continue
        if np.max(np.abs(gm - gm.conj().T)) > 1e-12 * scale:
            raise ValueError("rate matrix must be Hermitian")
        values, vectors = np.linalg.eigh(gm)
        if values.min() < -1e-10 * values.max():
            raise NonCompletelyPositiveError(
                f"rate matrix has negative eigenvalue {values.min():.3e}"
            )
        for k in range(values.size):
            rate = float(max(values[k], 0.0))
            if rate == 0.0:
                continue
            jump = sum(vectors[i, k] * ops[i] for i in range(len(ops)))
            channels.append((rate, jump))
    return channels


def dissipator_superoperator(channels) -> np.ndarray:
    """Matrix of rho -> sum_k g_k (L rho L^+ - {L^+L, rho}/2), C-order vec.

    Accepts any iterable of (rate, operator) pairs; useful to compare the
    closed-form six-channel set against the generic diagonalization.
    """
    first = True
    out = None
    for rate, op in channels:
        d = op.shape[0]
        if first:
            out = np.zeros((d * d, d * d), dtype=complex)
            first = False
        ident = np.eye(d, dtype=complex)
        ldl = op.conj().T @ op
        out += rate * (
            np.kron(op, op.conj())
            - 0.5 * np.kron(ldl, ident)
            - 0.5 * np.kron(ident, ldl.T)
        )
    if out is None:
        raise ValueError("no channels given")
    return out
