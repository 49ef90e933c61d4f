"""
Finite-dimensional measurement theory: generalized and projective measurements,
POVMs, their realization through an ancilla, the von Neumann entangling step,
reduction, statistical averaging and partial traces.

Joint index convention: system-major, |i>|a> sits at row i * d_A + a, i.e.
joint vectors are np.kron(system, ancilla).
"""

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from smeared_measurement.config import COMPLETENESS_TOL, NEGLIGIBLE_PROBABILITY, TRACE_TOL
from smeared_measurement.exceptions import (
    CompletenessError,
    NegligibleOutcomeError,
    NormalizationError,
    UnitarityError,
    ValidationError,
)
from smeared_measurement.smeared_measurement.py.qstate import finite_density
from smeared_measurement.utils import throw


class Keep(enum.Enum):
    SYSTEM = "system"
    ANCILLA = "ancilla"


def _hermitian_part(mat):
    return 0.5 * (mat + mat.conj().T)


def _max_abs(mat):
    return float(np.max(np.abs(mat))) if np.size(mat) else 0.0


@dataclass(frozen=True, eq=False)
class FiniteState:
    """Pure (``vec``) or mixed (``mat``) state of a d-level system."""

    dim: int
    vec: np.ndarray = None
    mat: np.ndarray = None

    @classmethod
    def pure(cls, vec):
        vec = np.asarray(vec, dtype=complex).ravel()
        if abs(np.linalg.norm(vec) - 1.0) > COMPLETENESS_TOL:
            throw(f"State vector has norm {np.linalg.norm(vec):.12g}, expected 1", exc=NormalizationError)
        return cls(vec.size, vec=vec)

    @classmethod
    def mixed(cls, mat):
        mat = np.asarray(mat, dtype=complex)
        if _max_abs(mat - mat.conj().T) > COMPLETENESS_TOL:
            throw("Mixed state matrix is not Hermitian", exc=ValidationError)
        if abs(np.trace(mat).real - 1.0) > COMPLETENESS_TOL:
            throw(f"Mixed state has trace {np.trace(mat).real:.12g}, expected 1", exc=NormalizationError)
        if scipy.linalg.eigvalsh(_hermitian_part(mat))[0] < -COMPLETENESS_TOL:
            throw("Mixed state matrix is not positive semidefinite", exc=ValidationError)
        return cls(mat.shape[0], mat=mat)

    @property
    def density(self):
        if self.mat is not None:
            return self.mat
        return np.outer(self.vec, self.vec.conj())

    def to_density_matrix(self):
        return finite_density(self.density)


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Measurement operators {M_k} with sum_k M_k^H M_k = 1."""

    ops: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(m, dtype=complex) for m in self.ops)
        if not ops:
            throw("A measurement set needs at least one operator", exc=CompletenessError)
        dim = ops[0].shape[0]
        total = sum(m.conj().T @ m for m in ops)
        deviation = _max_abs(total - np.eye(dim))
        if deviation > COMPLETENESS_TOL:
            throw(f"Measurement operators violate completeness by {deviation:.3e}", exc=CompletenessError)
        object.__setattr__(self, "ops", ops)

    @property
    def dim(self):
        return self.ops[0].shape[0]

    def __len__(self):
        return len(self.ops)

    def conjugated(self, v):
        """Same measurement in a rotated basis: M_k -> V M_k V^H."""
        return MeasurementSet(tuple(v @ m @ v.conj().T for m in self.ops))


@dataclass(frozen=True, eq=False)
class Povm:
    """Effects E_i, each Hermitian and positive, summing to the identity."""

    effects: tuple

    def __post_init__(self):
        effects = tuple(np.asarray(e, dtype=complex) for e in self.effects)
        dim = effects[0].shape[0]
        for i, e in enumerate(effects):
            if _max_abs(e - e.conj().T) > COMPLETENESS_TOL:
                throw(f"POVM effect {i} is not Hermitian", exc=ValidationError)
            if scipy.linalg.eigvalsh(_hermitian_part(e))[0] < -COMPLETENESS_TOL:
                throw(f"POVM effect {i} has a negative eigenvalue", exc=ValidationError)
        deviation = _max_abs(sum(effects) - np.eye(dim))
        if deviation > COMPLETENESS_TOL:
            throw(f"POVM effects sum to the identity only within {deviation:.3e}", exc=CompletenessError)
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self):
        return self.effects[0].shape[0]

    def __len__(self):
        return len(self.effects)

    def is_projective(self, tol=COMPLETENESS_TOL):
        """True iff every effect is idempotent, E_i^2 = E_i."""
        return all(_max_abs(e @ e - e) <= tol for e in self.effects)


@dataclass(frozen=True, eq=False)
class JointState:
    """
    System (x) ancilla density matrix.

    ``readoff`` holds the apparatus read-off states as columns when the state
    came out of an entangling step; reduction projects onto those rays.
    """

    dims: tuple
    mat: np.ndarray
    readoff: np.ndarray = field(default=None)

    @property
    def dim_s(self):
        return self.dims[0]

    @property
    def dim_a(self):
        return self.dims[1]

    def trace(self):
        return float(np.trace(self.mat).real)


# ? SEEDED RANDOM OBJECTS FOR DEMOS AND PROPERTY TESTS


def random_unitary(dim, rng):
    return unitary_group.rvs(dim, random_state=rng)


def random_finite_state(dim, rng, rank=None):
    """Random mixed state of the given rank (full rank by default)."""
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    mat = g @ g.conj().T
    return FiniteState.mixed(mat / np.trace(mat).real)


def random_measurement_set(dim, n_outcomes, rng):
    """Measurement operators cut from a Haar isometry C^d -> C^(k d)."""
    isometry = random_unitary(n_outcomes * dim, rng)[:, :dim]
    return MeasurementSet(tuple(isometry[k * dim : (k + 1) * dim, :] for k in range(n_outcomes)))


# * GENERALIZED MEASUREMENTS


def outcome_probabilities(state, mset):
    rho = state.density
    return np.array([np.trace(m @ rho @ m.conj().T).real for m in mset.ops])


def apply_measurement(state, mset, k):
    """
    Outcome k of a generalized measurement: rho -> M_k rho M_k^H / p_k.

    Args:
        state (FiniteState): Pre-measurement state
        mset (MeasurementSet): Measurement operators
        k (int): Outcome index

    Returns:
        tuple: (FiniteState post-measurement state, float p_k)

    Raises:
        NegligibleOutcomeError: If p_k <= 1e-12, where the conditional state is undefined
    """
    if not 0 <= k < len(mset):
        throw(f"Outcome {k} out of range for {len(mset)} operators", exc=ValidationError)
    m = mset.ops[k]
    branch = m @ state.density @ m.conj().T
    p_k = float(np.trace(branch).real)
    if p_k <= NEGLIGIBLE_PROBABILITY:
        throw(f"Outcome {k} has probability {p_k:.3e}; its conditional state is undefined", exc=NegligibleOutcomeError)
    return FiniteState.mixed(_hermitian_part(branch) / p_k), p_k


def is_projective(mset, tol=COMPLETENESS_TOL):
    """True iff every M_k is Hermitian and M_k M_l = delta_kl M_k."""
    ops = mset.ops
    for k, m in enumerate(ops):
        if _max_abs(m - m.conj().T) > tol:
            return False
        for l, n in enumerate(ops):
            target = m if k == l else np.zeros_like(m)
            if _max_abs(m @ n - target) > tol:
                return False
    return True


def povm_from(mset):
    """E_i = M_i^H M_i."""
    return Povm(tuple(_hermitian_part(m.conj().T @ m) for m in mset.ops))


def povm_probabilities(povm, state):
    rho = state.density
    return np.array([np.trace(e @ rho).real for e in povm.effects])


# * ANCILLA REALIZATION


def _check_unitary(u):
    deviation = _max_abs(u.conj().T @ u - np.eye(u.shape[0]))
    if deviation > COMPLETENESS_TOL:
        throw(f"Operator is not unitary (deviation {deviation:.3e})", exc=UnitarityError)


def _check_orthonormal(basis, name):
    deviation = _max_abs(basis.conj().T @ basis - np.eye(basis.shape[1]))
    if deviation > COMPLETENESS_TOL:
        throw(f"{name} is not orthonormal (deviation {deviation:.3e})", exc=ValidationError)


def _prepare_ancilla_inputs(u, alpha, sys_basis, anc_basis):
    u = np.asarray(u, dtype=complex)
    alpha = np.asarray(alpha, dtype=complex).ravel()
    dim_a = alpha.size
    if u.shape[0] % dim_a:
        throw(f"Unitary of size {u.shape[0]} does not factor with ancilla dimension {dim_a}", exc=ValidationError)
    dim_s = u.shape[0] // dim_a
    sys_basis = np.eye(dim_s, dtype=complex) if sys_basis is None else np.asarray(sys_basis, dtype=complex)
    anc_basis = np.eye(dim_a, dtype=complex) if anc_basis is None else np.asarray(anc_basis, dtype=complex)
    _check_unitary(u)
    _check_orthonormal(sys_basis, "System basis")
    _check_orthonormal(anc_basis, "Ancilla basis")
    if abs(np.linalg.norm(alpha) - 1.0) > COMPLETENESS_TOL:
        throw("Ancilla state is not normalized", exc=NormalizationError)
    # V = U (1 (x) |alpha>) : system -> joint
    isometry = u @ np.kron(np.eye(dim_s), alpha[:, None])
    return isometry, sys_basis, anc_basis


def povm_from_ancilla(u, alpha, sys_basis=None, anc_basis=None):
    """
    POVM induced on the system by a joint unitary and a projective readout.

    E_i = sum_j <alpha| U^H |lambda_i alpha_j><lambda_i alpha_j| U |alpha>

    Args:
        u (ndarray): Unitary on C^(d_S d_A), system-major
        alpha (ndarray): Initial ancilla state
        sys_basis (ndarray, optional): Columns |lambda_i>, computational basis by default
        anc_basis (ndarray, optional): Columns |alpha_j>, computational basis by default

    Returns:
        Povm: One effect per system outcome lambda_i

    Raises:
        UnitarityError: If u is not unitary
        ValidationError: If a basis is not orthonormal
    """
    isometry, sys_basis, anc_basis = _prepare_ancilla_inputs(u, alpha, sys_basis, anc_basis)
    effects = []
    for i in range(sys_basis.shape[1]):
        effect = np.zeros((sys_basis.shape[0],) * 2, dtype=complex)
        for j in range(anc_basis.shape[1]):
            row = np.kron(sys_basis[:, i], anc_basis[:, j]).conj() @ isometry
            effect += np.outer(row.conj(), row)
        effects.append(_hermitian_part(effect))
    return Povm(tuple(effects))


def joint_projective_probabilities(u, alpha, state, sys_basis=None, anc_basis=None):
    """P(lambda_i) = sum_j <lambda_i alpha_j| U (rho (x) |alpha><alpha|) U^H |lambda_i alpha_j>."""
    isometry, sys_basis, anc_basis = _prepare_ancilla_inputs(u, alpha, sys_basis, anc_basis)
    joint = isometry @ state.density @ isometry.conj().T
    probs = np.zeros(sys_basis.shape[1])
    for i in range(sys_basis.shape[1]):
        for j in range(anc_basis.shape[1]):
            ray = np.kron(sys_basis[:, i], anc_basis[:, j])
            probs[i] += (ray.conj() @ joint @ ray).real
    return probs


# * VON NEUMANN MEASUREMENT


def von_neumann_entangle(c, readoff):
    """
    Final joint state sum_jk c_j c_k^* |lambda_j>|alpha_j><alpha_k|<lambda_k|.

    Args:
        c (array): System amplitudes in the measured basis, sum |c_i|^2 = 1
        readoff (ndarray): d_A x d_S matrix whose column i is |alpha_i>

    Returns:
        JointState: Entangled state remembering its read-off basis

    Raises:
        NormalizationError: If c is not normalized
        ValidationError: If the read-off states are not orthonormal
    """
    c = np.asarray(c, dtype=complex).ravel()
    readoff = np.asarray(readoff, dtype=complex)
    if abs(np.vdot(c, c).real - 1.0) > COMPLETENESS_TOL:
        throw(f"Amplitudes have squared norm {np.vdot(c, c).real:.12g}, expected 1", exc=NormalizationError)
    if readoff.shape[1] != c.size:
        throw(f"Need {c.size} read-off states, got {readoff.shape[1]}", exc=ValidationError)
    _check_orthonormal(readoff, "Read-off states")
    dim_s, dim_a = c.size, readoff.shape[0]
    psi = sum(c[j] * np.kron(np.eye(dim_s)[j], readoff[:, j]) for j in range(dim_s))
    return JointState((dim_s, dim_a), np.outer(psi, psi.conj()), readoff)


def verify_entangling_evolution(c, readoff, t_final=1.0):
    """
    Exponentiate H_int = sum_i |lambda_i><lambda_i| (x) A_i and compare with the closed form.

    A_i = i log(R_i) / T where R_i is a unitary taking |alpha> = |0> to |alpha_i>,
    so exp(-i A_i T)|alpha> = |alpha_i>. Limited to dimensions up to 3.

    Returns:
        float: Max elementwise deviation between the evolved and closed-form states
    """
    c = np.asarray(c, dtype=complex).ravel()
    readoff = np.asarray(readoff, dtype=complex)
    dim_s, dim_a = c.size, readoff.shape[0]
    if max(dim_s, dim_a) > 3:
        throw("Explicit evolution check is limited to dimensions <= 3", exc=ValidationError)
    expected = von_neumann_entangle(c, readoff)
    hamiltonian = np.zeros((dim_s * dim_a,) * 2, dtype=complex)
    for i in range(dim_s):
        q, r = np.linalg.qr(np.column_stack([readoff[:, i], np.eye(dim_a)]))
        rotation = q.copy()
        rotation[:, 0] *= r[0, 0]
        generator = _hermitian_part(1j * scipy.linalg.logm(rotation) / t_final)
        hamiltonian += np.kron(np.diag(np.eye(dim_s)[i]), generator)
    psi0 = np.kron(c, np.eye(dim_a)[0])
    psi_t = scipy.linalg.expm(-1j * hamiltonian * t_final) @ psi0
    return _max_abs(np.outer(psi_t, psi_t.conj()) - expected.mat)


def branch_projectors(rho):
    """P_i = |lambda_i a_i><a_i lambda_i| for each system outcome i."""
    readoff = rho.readoff
    if readoff is None:
        readoff = np.eye(rho.dim_a, rho.dim_s, dtype=complex)
    projectors = []
    for i in range(rho.dim_s):
        ray = np.kron(np.eye(rho.dim_s)[i], readoff[:, i])
        projectors.append(np.outer(ray, ray.conj()))
    return projectors


def outcome_probability(rho, i):
    """P(lambda_i) = Tr(P_i rho)."""
    return float(np.trace(branch_projectors(rho)[i] @ rho.mat).real)


def reduce(rho, i):
    """
    Reduction onto outcome i: rho -> P_i rho P_i / Tr(P_i rho).

    Raises:
        NegligibleOutcomeError: If Tr(P_i rho) <= 1e-12
    """
    projector = branch_projectors(rho)[i]
    p_i = float(np.trace(projector @ rho.mat).real)
    if p_i <= NEGLIGIBLE_PROBABILITY:
        throw(f"Outcome {i} has probability {p_i:.3e}; reduction is undefined", exc=NegligibleOutcomeError)
    return JointState(rho.dims, projector @ rho.mat @ projector / p_i, rho.readoff)


def statistical_average(rho, projectors=None):
    """
    rho_r = sum_j P_j rho P_j^H, the state when the outcome is not read.

    Args:
        rho (JointState): Joint state
        projectors (list, optional): Projector family; the read-off branch family by default

    Raises:
        CompletenessError: If the family loses more than 1e-8 of the trace
    """
    projectors = branch_projectors(rho) if projectors is None else [np.asarray(p, dtype=complex) for p in projectors]
    averaged = sum(p @ rho.mat @ p.conj().T for p in projectors)
    deficit = rho.trace() - float(np.trace(averaged).real)
    if abs(deficit) > TRACE_TOL:
        throw(f"Projector family is incomplete on this state (trace deficit {deficit:.3e})", exc=CompletenessError)
    return JointState(rho.dims, averaged, rho.readoff)


def partial_trace(rho, keep=Keep.SYSTEM):
    """
    Trace out one factor of a joint state.

    Returns:
        FiniteState: Mixed state of the kept factor
    """
    d_s, d_a = rho.dims
    tensor = rho.mat.reshape(d_s, d_a, d_s, d_a)
    if Keep(keep) is Keep.SYSTEM:
        reduced = np.einsum("iaja->ij", tensor)
    else:
        reduced = np.einsum("iaib->ab", tensor)
    return FiniteState.mixed(_hermitian_part(reduced))


def product_state(rho_s, rho_a):
    """rho_S (x) rho_A as a JointState."""
    return JointState((rho_s.dim, rho_a.dim), np.kron(rho_s.density, rho_a.density))
