import math
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from smeared_measurement.exceptions import (
    CompletenessError,
    NegligibleOutcomeError,
    NormalizationError,
    UnitarityError,
    ValidationError,
)
from smeared_measurement.smeared_measurement.py.measure import (
    FiniteState,
    JointState,
    Keep,
    MeasurementSet,
    Povm,
    apply_measurement,
    is_projective,
    joint_projective_probabilities,
    outcome_probabilities,
    outcome_probability,
    partial_trace,
    povm_from,
    povm_from_ancilla,
    povm_probabilities,
    product_state,
    random_finite_state,
    random_measurement_set,
    random_unitary,
    reduce,
    statistical_average,
    verify_entangling_evolution,
    von_neumann_entangle,
)

HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def computational_projectors(dim):
    return MeasurementSet(tuple(np.diag(np.eye(dim)[k]) for k in range(dim)))


class TestGeneralizedMeasurement(unittest.TestCase):
    def test_projective_measurement_of_plus_state(self):
        plus = FiniteState.pure([1 / math.sqrt(2), 1 / math.sqrt(2)])
        mset = computational_projectors(2)
        np.testing.assert_allclose(outcome_probabilities(plus, mset), [0.5, 0.5])
        post, p = apply_measurement(plus, mset, 0)
        self.assertAlmostEqual(p, 0.5)
        np.testing.assert_allclose(post.density, np.diag([1.0, 0.0]), atol=1e-12)

    def test_incomplete_set_rejected(self):
        with self.assertRaises(CompletenessError):
            MeasurementSet((np.diag([1.0, 0.0]),))

    def test_negligible_outcome(self):
        zero = FiniteState.pure([1.0, 0.0])
        with self.assertRaises(NegligibleOutcomeError):
            apply_measurement(zero, computational_projectors(2), 1)

    def test_unnormalized_state_rejected(self):
        with self.assertRaises(NormalizationError):
            FiniteState.pure([1.0, 1.0])

    def test_projectivity(self):
        self.assertTrue(is_projective(computational_projectors(3)))
        rng = np.random.default_rng(7)
        self.assertFalse(is_projective(random_measurement_set(2, 3, rng)))

    def test_scaled_identities_are_not_projective(self):
        half = np.eye(2) / math.sqrt(2)
        self.assertFalse(is_projective(MeasurementSet((half, half))))

    def test_conjugated_set_stays_complete(self):
        rng = np.random.default_rng(11)
        rotated = computational_projectors(2).conjugated(HADAMARD)
        self.assertTrue(is_projective(rotated))
        plus = FiniteState.pure([1 / math.sqrt(2), 1 / math.sqrt(2)])
        np.testing.assert_allclose(outcome_probabilities(plus, rotated), [1.0, 0.0], atol=1e-12)
        random_set = random_measurement_set(3, 2, rng)
        self.assertEqual(len(random_set.conjugated(random_unitary(3, rng))), 2)

    def test_povm_from_measurement_set(self):
        rng = np.random.default_rng(5)
        mset = random_measurement_set(3, 4, rng)
        state = random_finite_state(3, rng)
        povm = povm_from(mset)
        np.testing.assert_allclose(povm_probabilities(povm, state), outcome_probabilities(state, mset), atol=1e-12)

    def test_povm_rejects_negative_effect(self):
        with self.assertRaises(ValidationError):
            Povm((np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=4))
    def test_post_measurement_states_are_valid(self, seed, dim):
        rng = np.random.default_rng(seed)
        mset = random_measurement_set(dim, 3, rng)
        state = random_finite_state(dim, rng, rank=2)
        probs = outcome_probabilities(state, mset)
        self.assertAlmostEqual(probs.sum(), 1.0, places=10)
        for k, p in enumerate(probs):
            if p > 1e-9:
                post, p_k = apply_measurement(state, mset, k)
                self.assertAlmostEqual(np.trace(post.density).real, 1.0, places=10)
                self.assertAlmostEqual(p_k, p, places=12)


class TestAncilla(unittest.TestCase):
    def test_identity_unitary_gives_projective_povm(self):
        povm = povm_from_ancilla(np.eye(4), [1.0, 0.0])
        self.assertTrue(povm.is_projective())
        np.testing.assert_allclose(povm.effects[0], np.diag([1.0, 0.0]), atol=1e-12)

    def test_controlled_shift_reads_out_the_system(self):
        for dim in (2, 3):
            with self.subTest(dim=dim):
                shift = np.zeros((dim * dim, dim * dim))
                for i in range(dim):
                    for a in range(dim):
                        shift[i * dim + (a + i) % dim, i * dim + a] = 1.0
                povm = povm_from_ancilla(shift, np.eye(dim)[0])
                self.assertTrue(povm.is_projective())
                for i, effect in enumerate(povm.effects):
                    np.testing.assert_allclose(effect, np.diag(np.eye(dim)[i]), atol=1e-12)

    def test_rejects_non_unitary(self):
        with self.assertRaises(UnitarityError):
            povm_from_ancilla(2 * np.eye(4), [1.0, 0.0])

    def test_rejects_dimension_mismatch(self):
        with self.assertRaises(ValidationError):
            povm_from_ancilla(np.eye(5), [1.0, 0.0])

    def test_rejects_non_orthonormal_basis(self):
        with self.assertRaises(ValidationError):
            povm_from_ancilla(np.eye(4), [1.0, 0.0], sys_basis=np.ones((2, 2)))

    def test_hundred_random_constructions(self):
        # dims up to 4 x 4, agreement with the joint projective readout within 1e-10
        for seed in range(100):
            rng = np.random.default_rng(seed)
            dim_s, dim_a = rng.integers(2, 5, size=2)
            u = random_unitary(dim_s * dim_a, rng)
            alpha = random_unitary(dim_a, rng)[:, 0]
            state = random_finite_state(dim_s, rng)
            sys_basis = random_unitary(dim_s, rng)
            with self.subTest(seed=seed):
                povm = povm_from_ancilla(u, alpha, sys_basis=sys_basis)
                self.assertEqual(len(povm), dim_s)
                direct = joint_projective_probabilities(u, alpha, state, sys_basis=sys_basis)
                np.testing.assert_allclose(povm_probabilities(povm, state), direct, atol=1e-10)


class TestVonNeumann(unittest.TestCase):
    def setUp(self):
        self.c = np.array([0.6, 0.8j])
        self.readoff = HADAMARD.astype(complex)

    def test_entangled_state_is_pure(self):
        joint = von_neumann_entangle(self.c, self.readoff)
        self.assertAlmostEqual(joint.trace(), 1.0)
        self.assertAlmostEqual(np.trace(joint.mat @ joint.mat).real, 1.0)

    def test_partial_trace_decoheres_system(self):
        joint = von_neumann_entangle(self.c, self.readoff)
        reduced = partial_trace(joint, Keep.SYSTEM).density
        np.testing.assert_allclose(np.diag(reduced).real, [0.36, 0.64], atol=1e-12)
        self.assertLess(abs(reduced[0, 1]), 1e-12)

    def test_partial_trace_of_ancilla(self):
        joint = von_neumann_entangle(self.c, np.eye(2, dtype=complex))
        reduced = partial_trace(joint, Keep.ANCILLA).density
        np.testing.assert_allclose(reduced, np.diag([0.36, 0.64]), atol=1e-12)

    def test_partial_trace_of_product(self):
        rng = np.random.default_rng(2)
        rho_s, rho_a = random_finite_state(2, rng), random_finite_state(3, rng)
        joint = product_state(rho_s, rho_a)
        np.testing.assert_allclose(partial_trace(joint, "system").density, rho_s.density, atol=1e-12)
        np.testing.assert_allclose(partial_trace(joint, "ancilla").density, rho_a.density, atol=1e-12)

    def test_reduction_and_statistical_average(self):
        joint = von_neumann_entangle(self.c, self.readoff)
        self.assertAlmostEqual(outcome_probability(joint, 1), 0.64)
        branch = reduce(joint, 1)
        self.assertAlmostEqual(branch.trace(), 1.0)
        averaged = statistical_average(joint)
        np.testing.assert_allclose(averaged.mat, 0.36 * reduce(joint, 0).mat + 0.64 * branch.mat, atol=1e-12)

    def test_reduction_is_idempotent(self):
        joint = von_neumann_entangle(self.c, self.readoff)
        once = reduce(joint, 0)
        np.testing.assert_allclose(reduce(once, 0).mat, once.mat, atol=1e-12)

    def test_partial_trace_keeps_local_expectations(self):
        rng = np.random.default_rng(3)
        joint = JointState((2, 3), random_finite_state(6, rng).density)
        for keep, dim, lift in ((Keep.SYSTEM, 2, lambda o: np.kron(o, np.eye(3))), (Keep.ANCILLA, 3, lambda o: np.kron(np.eye(2), o))):
            with self.subTest(keep=keep):
                g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
                observable = g + g.conj().T
                reduced = partial_trace(joint, keep).density
                self.assertAlmostEqual(
                    np.trace(lift(observable) @ joint.mat).real, np.trace(observable @ reduced).real, places=10
                )

    def test_reduction_of_impossible_outcome(self):
        joint = von_neumann_entangle([1.0, 0.0], self.readoff)
        with self.assertRaises(NegligibleOutcomeError):
            reduce(joint, 1)

    def test_incomplete_projector_family(self):
        joint = von_neumann_entangle(self.c, self.readoff)
        with self.assertRaises(CompletenessError):
            statistical_average(joint, projectors=[np.diag([1.0, 0.0, 0.0, 0.0])])

    def test_read_off_states_must_be_orthonormal(self):
        with self.assertRaises(ValidationError):
            von_neumann_entangle(self.c, np.ones((2, 2)))

    def test_joint_state_without_readoff_uses_computational_rays(self):
        joint = JointState((2, 2), np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex))
        self.assertAlmostEqual(outcome_probability(joint, 1), 0.5)

    def test_entangling_evolution(self):
        rng = np.random.default_rng(1)
        for dims in ((2, 2), (3, 3), (2, 3)):
            with self.subTest(dims=dims):
                c = random_unitary(dims[0], rng)[:, 0]
                readoff = random_unitary(dims[1], rng)[:, : dims[0]]
                self.assertLess(verify_entangling_evolution(c, readoff), 1e-10)

    def test_entangling_evolution_limited_to_small_dims(self):
        with self.assertRaises(ValidationError):
            verify_entangling_evolution(np.eye(4)[0], np.eye(4))
