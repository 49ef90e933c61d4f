"""
Wavefunctions and density matrices on a grid, the position <-> momentum
transform, and scalar diagnostics.

Density matrices store kernel values rho(x_j, xbar_k). Quadrature weights are
applied where they are needed: traces, spectra and transforms all work on the
weight-symmetrized matrix S = W^1/2 . mat . W^1/2, whose eigenvalues are the
probabilities of the continuum operator.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.linalg

from smeared_measurement.config import (
    DIRECT_TRANSFORM_MAX_N,
    EIGENVALUE_FLOOR,
    HERMITIAN_TOL,
    NORMALIZATION_DEFICIT_TOL,
    PSD_TOL,
    TRACE_TOL,
)
from smeared_measurement.exceptions import (
    BasisMismatchError,
    NormalizationError,
    ValidationError,
)
from smeared_measurement.smeared_measurement.py.grid import (
    Grid,
    conjugate_grid,
)
from smeared_measurement.utils import throw


class Basis(enum.Enum):
    POSITION = "position"
    MOMENTUM = "momentum"
    FINITE = "finite"


class Section(enum.Enum):
    DIAGONAL = "diagonal"
    ANTI_DIAGONAL = "anti_diagonal"


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid
    amp: np.ndarray

    def norm(self):
        return float(np.sum(self.grid.weights * np.abs(self.amp) ** 2))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Basis-tagged density matrix.

    ``grid`` is a Grid for POSITION, a MomentumGrid for MOMENTUM and None for
    FINITE, where the quadrature weights are all ones.
    """

    basis: Basis
    mat: np.ndarray
    grid: object = None

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            throw(f"Density matrix must be square, got shape {mat.shape}", exc=ValidationError)
        if self.basis is not Basis.FINITE and (self.grid is None or self.grid.n != mat.shape[0]):
            throw(f"{self.basis.value} density matrix needs a grid with {mat.shape[0]} points", exc=ValidationError)
        object.__setattr__(self, "mat", mat)

    @property
    def n(self):
        return self.mat.shape[0]

    @property
    def weights(self):
        if self.grid is None:
            return np.ones(self.n)
        return self.grid.weights

    @property
    def points(self):
        if self.grid is None:
            return np.arange(self.n, dtype=float)
        return self.grid.points

    def replace(self, mat):
        return DensityMatrix(self.basis, mat, self.grid)


# ? DIAGNOSTICS SHARED BY EVERY BASIS


def max_relative_deviation(a, b):
    """max |a - b| / max |b|, the comparison metric for kernel agreement."""
    a = np.asarray(a)
    b = np.asarray(b)
    scale = np.max(np.abs(b))
    if scale == 0:
        return float(np.max(np.abs(a)))
    return float(np.max(np.abs(a - b)) / scale)


def weight_symmetrized(rho):
    sw = np.sqrt(rho.weights)
    return sw[:, None] * rho.mat * sw[None, :]


def from_weight_symmetrized(s_mat, basis, grid):
    weights = np.ones(s_mat.shape[0]) if grid is None else grid.weights
    sw = np.sqrt(weights)
    return DensityMatrix(basis, s_mat / sw[:, None] / sw[None, :], grid)


def trace(rho):
    return float(np.real(np.sum(rho.weights * np.diag(rho.mat))))


def spectrum(rho):
    """Ascending eigenvalues of the weight-symmetrized matrix."""
    s_mat = weight_symmetrized(rho)
    return scipy.linalg.eigvalsh(0.5 * (s_mat + s_mat.conj().T))


def is_hermitian(rho, tol=HERMITIAN_TOL):
    return bool(np.max(np.abs(rho.mat - rho.mat.conj().T)) <= tol)


def is_positive_semidefinite(rho, tol=PSD_TOL):
    return bool(spectrum(rho)[0] >= -tol)


def validate(rho, require_unit_trace=True):
    """
    Check Hermiticity, unit trace and positivity.

    Raises:
        ValidationError: If rho is not Hermitian or not positive semidefinite
        NormalizationError: If the trace differs from 1 and require_unit_trace is set
    """
    if not is_hermitian(rho):
        throw("Density matrix is not Hermitian", exc=ValidationError)
    if require_unit_trace and abs(trace(rho) - 1.0) > TRACE_TOL:
        throw(f"Density matrix trace {trace(rho):.12g} differs from 1", exc=NormalizationError)
    if not is_positive_semidefinite(rho):
        throw(f"Density matrix has eigenvalue {spectrum(rho)[0]:.3e} below -{PSD_TOL}", exc=ValidationError)
    return rho


def purity(rho):
    """Tr rho^2 = sum_jk w_j w_k |mat_jk|^2."""
    w = rho.weights
    return float(np.real(np.sum(np.outer(w, w) * np.abs(rho.mat) ** 2)))


def entropy(rho):
    """von Neumann entropy -sum lambda ln lambda; eigenvalues below 1e-12 are skipped."""
    lam = spectrum(rho)
    lam = lam[lam > EIGENVALUE_FLOOR]
    return float(max(0.0, -np.sum(lam * np.log(lam))))


def diagonal_expectation(rho, observable):
    """Expectation of an observable diagonal in rho's basis, given as samples on the grid."""
    return float(np.real(np.sum(rho.weights * np.asarray(observable) * np.diag(rho.mat))))


# * WAVEFUNCTIONS


def normalized_wavefunction(g, amp):
    """
    Normalize samples on ``g`` under trapezoidal quadrature.

    Raises:
        NormalizationError: If the samples vanish
    """
    amp = np.asarray(amp, dtype=complex)
    norm = float(np.sum(g.weights * np.abs(amp) ** 2))
    if not norm > 0:
        throw("Wavefunction has zero norm", exc=NormalizationError)
    return WaveFunction(g, amp / math.sqrt(norm))


def gaussian_packet(g, s, x0=0.0, p0=0.0):
    """
    Gaussian packet (2 pi s^2)^(-1/4) exp(-(x - x0)^2 / 4 s^2 + i p0 x).

    Args:
        g (Grid): Position grid
        s (float): Position standard deviation of |psi|^2
        x0 (float): Centre
        p0 (float): Momentum boost

    Returns:
        WaveFunction: Normalized under the grid's quadrature

    Raises:
        ValidationError: If s <= 0
        NormalizationError: If the packet leaks out of the box
    """
    if not s > 0:
        throw(f"Packet width s must be positive, got {s}", exc=ValidationError)
    x = g.points
    amp = (2.0 * math.pi * s**2) ** -0.25 * np.exp(-((x - x0) ** 2) / (4.0 * s**2) + 1j * p0 * x)
    norm = float(np.sum(g.weights * np.abs(amp) ** 2))
    if abs(1.0 - norm) > NORMALIZATION_DEFICIT_TOL:
        # ! PACKET NOT CONTAINED IN THE BOX OR NOT RESOLVED BY IT
        throw(
            f"Gaussian packet (s={s}, x0={x0}) has quadrature norm {norm:.9f} on [{g.x_min}, {g.x_max}] "
            f"with n={g.n}",
            exc=NormalizationError,
            title="Packet Normalization Error",
        )
    return WaveFunction(g, amp / math.sqrt(norm))


def position_moment(psi, power):
    return float(np.sum(psi.grid.weights * psi.grid.points**power * np.abs(psi.amp) ** 2))


def pure_density(psi):
    return DensityMatrix(Basis.POSITION, np.outer(psi.amp, psi.amp.conj()), psi.grid)


def mixed_density(states, probabilities):
    """Convex mixture sum_i p_i |psi_i><psi_i| of wavefunctions sharing one grid."""
    probabilities = np.asarray(probabilities, dtype=float)
    if np.any(probabilities < 0) or abs(probabilities.sum() - 1.0) > TRACE_TOL:
        throw("Mixture probabilities must be non-negative and sum to 1", exc=ValidationError)
    g = states[0].grid
    mat = sum(p * np.outer(psi.amp, psi.amp.conj()) for p, psi in zip(probabilities, states))
    return DensityMatrix(Basis.POSITION, mat, g)


def finite_density(mat):
    return DensityMatrix(Basis.FINITE, mat)


# * POSITION <-> MOMENTUM
#
# U_aj = exp(-i p_a x_j) / sqrt(n) is exactly unitary on the conjugate pair, so
# S_p = U S_x U^H preserves trace, purity and spectrum and inverts exactly.
# In the interior, mat_p = (dx^2 / 2 pi) sum_jk exp(-i p x + i pbar xbar) mat_x,
# i.e. rho(p, pbar) = (1/2 pi) int dx dxbar exp(-i p x + i pbar xbar) rho(x, xbar).


def _transform_matrix(g, mg):
    return np.exp(-1j * np.outer(mg.points, g.points)) / math.sqrt(g.n)


def _fft_phases(g, mg):
    sign = np.where(np.arange(g.n) % 2 == 0, 1.0, -1.0)
    phase = np.exp(-1j * mg.points * g.points[0])
    return sign, phase


def _apply_forward(v, g, mg):
    """U @ v along axis 0 with phase-corrected FFT."""
    sign, phase = _fft_phases(g, mg)
    return phase[:, None] * scipy.fft.fft(sign[:, None] * v, axis=0, norm="ortho")


def _apply_backward(v, g, mg):
    """U^H @ v along axis 0."""
    sign, phase = _fft_phases(g, mg)
    return sign[:, None] * scipy.fft.ifft(phase.conj()[:, None] * v, axis=0, norm="ortho")


def _resolve_method(method, n):
    if method == "auto":
        return "direct" if n <= DIRECT_TRANSFORM_MAX_N else "fft"
    if method not in ("direct", "fft"):
        throw(f"Unknown transform method {method!r}", exc=ValidationError)
    return method


def to_momentum(rho, method="auto"):
    """
    Momentum representation of a position-basis density matrix.

    Args:
        rho (DensityMatrix): Position-basis input
        method (str): ``direct`` quadrature, ``fft`` or ``auto`` (direct for n <= 512)

    Returns:
        DensityMatrix: Momentum basis, on conjugate_grid(rho.grid)

    Raises:
        BasisMismatchError: If rho is not in the position basis
    """
    if rho.basis is not Basis.POSITION:
        throw(f"to_momentum expects a position-basis matrix, got {rho.basis.value}", exc=BasisMismatchError)
    g = rho.grid
    mg = conjugate_grid(g)
    s_x = weight_symmetrized(rho)
    if _resolve_method(method, g.n) == "direct":
        u = _transform_matrix(g, mg)
        s_p = u @ s_x @ u.conj().T
    else:
        half = _apply_forward(s_x, g, mg)
        s_p = _apply_forward(half.conj().T, g, mg).conj().T
    return from_weight_symmetrized(s_p, Basis.MOMENTUM, mg)


def to_position(rho, method="auto"):
    """Inverse of to_momentum."""
    if rho.basis is not Basis.MOMENTUM:
        throw(f"to_position expects a momentum-basis matrix, got {rho.basis.value}", exc=BasisMismatchError)
    mg = rho.grid
    g = mg.grid
    s_p = weight_symmetrized(rho)
    if _resolve_method(method, g.n) == "direct":
        u = _transform_matrix(g, mg)
        s_x = u.conj().T @ s_p @ u
    else:
        half = _apply_backward(s_p, g, mg)
        s_x = _apply_backward(half.conj().T, g, mg).conj().T
    return from_weight_symmetrized(s_x, Basis.POSITION, g)


def momentum_wavefunction_density(mg, phi):
    """Pure momentum-basis density matrix from amplitudes phi(p_j), normalized on ``mg``."""
    phi = np.asarray(phi, dtype=complex)
    phi = phi / math.sqrt(float(np.sum(mg.weights * np.abs(phi) ** 2)))
    return DensityMatrix(Basis.MOMENTUM, np.outer(phi, phi.conj()), mg)


# * SECTIONAL WIDTHS


def section_profile(rho, section):
    """
    Cut of |rho| along the diagonal (xbar = x) or anti-diagonal (xbar = -x).

    Returns:
        tuple: (u, q) coordinates along the cut and |rho| there
    """
    if rho.basis is Basis.FINITE:
        throw("Sectional cuts need a position or momentum grid", exc=BasisMismatchError)
    section = Section(section)
    pts = rho.grid.points
    idx = np.arange(rho.n)
    if section is Section.DIAGONAL:
        return pts, np.abs(rho.mat[idx, idx])
    mirror = rho.grid.mirror_index()
    keep = mirror >= 0
    return pts[keep], np.abs(rho.mat[idx[keep], mirror[keep]])


def sectional_width(rho, section):
    """
    Gaussian-equivalent standard deviation of a cut: w^2 = sum u^2 q / sum q.

    Raises:
        ValidationError: If the cut is all zero or holds non-finite values
    """
    u, q = section_profile(rho, section)
    if not np.all(np.isfinite(q)):
        throw(f"Non-finite entries along the {Section(section).value} cut", exc=ValidationError)
    total = q.sum()
    if total == 0:
        throw(f"The {Section(section).value} cut is identically zero", exc=ValidationError)
    return float(math.sqrt(np.sum(u**2 * q) / total))


def four_widths(rho_x, rho_p):
    """(x-diag, x-antidiag, p-diag, p-antidiag) widths of a state in both bases."""
    return (
        sectional_width(rho_x, Section.DIAGONAL),
        sectional_width(rho_x, Section.ANTI_DIAGONAL),
        sectional_width(rho_p, Section.DIAGONAL),
        sectional_width(rho_p, Section.ANTI_DIAGONAL),
    )