import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entangle_lab.instances import random_pvm, random_unitary
from entangle_lab.quantum import (
    AngularAssignment,
    OperatorError,
    ProjectionValuedMeasure,
    Wavefunction,
    angular_chsh_strategy,
    angular_chsh_value,
    chsh_delta,
    chsh_value_closed_form,
    eval_quantum_commuting,
    eval_quantum_spatial,
    q_hat_projection,
    q_projection,
    schmidt_report,
    tensor,
)


def random_state(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return Wavefunction(v / np.linalg.norm(v))


class TestPVM:
    def test_rejects_non_projection(self):
        with pytest.raises(OperatorError, match="idempotent"):
            ProjectionValuedMeasure([np.diag([2.0, 0.0]), np.diag([0.0, 1.0])])

    def test_rejects_incomplete(self):
        with pytest.raises(OperatorError, match="identity"):
            ProjectionValuedMeasure([np.diag([1.0, 0.0])])

    def test_rejects_overlap(self):
        with pytest.raises(OperatorError, match="orthogonal"):
            ProjectionValuedMeasure([np.eye(2), np.diag([1.0, 0.0])])

    def test_wavefunction_norm(self):
        with pytest.raises(OperatorError, match="norm"):
            Wavefunction([1.0, 1.0])


class TestEvaluators:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_spatial_equals_commuting_on_tensor_lift(self, seed):
        rng = np.random.default_rng(seed)
        dh, dk = 3, 2
        A = [random_pvm(rng, dh, 2) for _ in range(2)]
        B = [random_pvm(rng, dk, 3) for _ in range(2)]
        psi = random_state(rng, dh * dk)
        lift_a = [ProjectionValuedMeasure([tensor(P, np.eye(dk)) for P in X.projections]) for X in A]
        lift_b = [ProjectionValuedMeasure([tensor(np.eye(dh), P) for P in X.projections]) for X in B]
        sp = eval_quantum_spatial(A, B, psi).table
        co = eval_quantum_commuting(lift_a, lift_b, psi).table
        assert np.abs(sp - co).max() < 1e-12

    def test_spatial_matches_direct_formula(self):
        rng = np.random.default_rng(5)
        A, B = [random_pvm(rng, 2, 2)], [random_pvm(rng, 3, 2)]
        psi = random_state(rng, 6)
        v = psi.amplitudes
        for a in range(2):
            for b in range(2):
                direct = np.vdot(v, np.kron(A[0][a], B[0][b]) @ v)
                assert eval_quantum_spatial(A, B, psi).table[0, 0, a, b] == pytest.approx(direct.real, abs=1e-12)

    def test_commutator_gate_names_indices(self):
        A = [ProjectionValuedMeasure([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])]
        B = [ProjectionValuedMeasure([q_projection(np.pi / 4), q_hat_projection(np.pi / 4)])]
        with pytest.raises(OperatorError, match=r"A\^0_0 and B\^0_0"):
            eval_quantum_commuting(A, B, Wavefunction([1.0, 0.0]))

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(0)
        with pytest.raises(OperatorError, match="dimension"):
            eval_quantum_spatial([random_pvm(rng, 2, 2)], [random_pvm(rng, 2, 2)], random_state(rng, 5))


class TestAngular:
    def test_projections_complementary(self):
        for t in np.linspace(-2, 2, 9):
            assert np.abs(q_projection(t) + q_hat_projection(t) - np.eye(2)).max() < 1e-15

    def test_elementary_identities(self):
        i, j = np.eye(2)
        for t in np.linspace(-1.5, 1.5, 7):
            q, qh = q_projection(t).real, q_hat_projection(t).real
            assert np.linalg.norm(q @ i) ** 2 == pytest.approx(np.cos(t) ** 2)
            assert np.linalg.norm(qh @ j) ** 2 == pytest.approx(np.cos(t) ** 2)
            assert np.linalg.norm(q @ j) ** 2 == pytest.approx(np.sin(t) ** 2)
            assert i @ q @ j == pytest.approx(-(i @ qh @ j))
            assert i @ q @ j == pytest.approx(np.cos(t) * np.sin(t))

    def test_value_thirteen_sixteenths(self):
        ang = AngularAssignment.standard()
        assert chsh_value_closed_form(ang).value == pytest.approx(13 / 16, abs=1e-12)
        assert angular_chsh_value(ang).value == pytest.approx(13 / 16, abs=1e-12)

    def test_table_entries(self):
        # cos^2(pi/6)/2 = 3/8 on matching answers for three question pairs
        t = angular_chsh_strategy(AngularAssignment.standard()).table
        for x, y in [(0, 0), (0, 1), (1, 0)]:
            assert np.allclose(t[x, y], [[3 / 8, 1 / 8], [1 / 8, 3 / 8]], atol=1e-12)
        assert np.allclose(t[1, 1], [[0, 1 / 2], [1 / 2, 0]], atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=4, max_size=4))
    def test_closed_form_equals_evaluator(self, a):
        ang = AngularAssignment((a[0], a[1]), (a[2], a[3]))
        assert chsh_value_closed_form(ang).value == pytest.approx(angular_chsh_value(ang).value, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=4, max_size=4))
    def test_tsirelson_bound(self, a):
        v = angular_chsh_value(AngularAssignment((a[0], a[1]), (a[2], a[3]))).value
        assert v <= (2 + np.sqrt(2)) / 4 + 1e-12


class TestSchmidt:
    def test_bell_state(self):
        r = schmidt_report(chsh_delta(), 2, 2)
        assert np.allclose(r.schmidt_coefficients, [2**-0.5] * 2)
        assert r.l1_norm == pytest.approx(np.sqrt(2))
        assert not r.classical

    def test_product_state_is_classical(self):
        rng = np.random.default_rng(1)
        u, v = random_unitary(rng, 3)[:, 0], random_unitary(rng, 2)[:, 0]
        r = schmidt_report(np.kron(u, v), 3, 2)
        assert len(r.schmidt_coefficients) == 1 and r.classical
