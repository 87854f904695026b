from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entangle_lab.chsh import forward_observable, reversed_observable, three_atom_space
from entangle_lab.instances import random_consistent_family, random_observable, random_spatial_instance, random_wavefunction
from entangle_lab.observables import (
    ConsistencyError,
    FiniteSampleSpace,
    Observable,
    ObservableError,
    check_consistency,
    eval_statistical_commuting,
    eval_statistical_spatial,
    inner,
    lift_function,
    lift_observable,
    materialize_pvm,
    observable_from_json,
    observable_to_json,
    observation_apply,
    observation_matrix,
    partial_average,
    product_space,
    to_euclidean,
)
from entangle_lab.quantum import Wavefunction, eval_quantum_commuting, eval_quantum_spatial
from entangle_lab.suites import pvm_residual, random_ladder

seeds = st.integers(0, 2**32 - 1)


def loop_observation(alpha, k, f):
    """Class by class: keep labels 1..k, replace the rest by their mean."""
    out = np.array(f, dtype=complex)
    for c in alpha.classes:
        tail = [u for u in c if alpha.labels[u] > k]
        if tail and k >= 0:
            out[tail] = np.mean([f[u] for u in tail])
        if k < 0:
            out[list(c)] = 0
    return out


class TestSpaceAndObservable:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ObservableError, match="total_mass"):
            FiniteSampleSpace([0.5, 0.6])

    def test_class_sizes_uniform(self):
        with pytest.raises(ObservableError, match="uniform_class_size"):
            Observable(FiniteSampleSpace.uniform(3), ((0, 1), (2,)), (1, 2, 1))

    def test_labels_bijective(self):
        with pytest.raises(ObservableError, match="class_bijective"):
            Observable(FiniteSampleSpace.uniform(2), ((0, 1),), (1, 1))

    def test_equal_weights_in_class(self):
        with pytest.raises(ObservableError, match="equal_class_weights"):
            Observable(FiniteSampleSpace([0.3, 0.7]), ((0, 1),), (1, 2))

    def test_json_roundtrip(self):
        a = random_observable(np.random.default_rng(2), 3, 4)
        b = observable_from_json(observable_to_json(a))
        assert b.classes == a.classes and b.labels == a.labels and b.space == a.space

    def test_json_missing_field(self):
        with pytest.raises(ObservableError, match="schema"):
            observable_from_json('{"weights": [1.0], "classes": [[0]]}')


class TestPartialAverage:
    def test_examples(self):
        f = np.array([1.0, -1.0, 0.0])
        assert np.array_equal(partial_average(3, 3, f), f)
        assert np.allclose(partial_average(0, 3, f), 0)
        assert np.allclose(partial_average(1, 3, f), [1, -0.5, -0.5])

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            partial_average(4, 3, np.zeros(3))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 6), st.data())
    def test_idempotent(self, n, data):
        k = data.draw(st.integers(0, n))
        f = np.array(data.draw(st.lists(st.floats(-5, 5), min_size=n, max_size=n)))
        once = partial_average(k, n, f)
        assert np.allclose(partial_average(k, n, once), once, atol=1e-12)


class TestObservationOperator:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 5), seeds)
    def test_matches_loop_oracle(self, n, classes, seed):
        rng = np.random.default_rng(seed)
        a = random_observable(rng, n, classes)
        f = random_wavefunction(rng, a.space)
        for k in range(-1, n + 1):
            assert np.abs(observation_apply(a, k, f) - loop_observation(a, k, f)).max() < 1e-12
            assert np.abs(observation_matrix(a, k) @ f - observation_apply(a, k, f)).max() < 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 5), seeds)
    def test_weighted_self_adjoint_projection(self, n, classes, seed):
        rng = np.random.default_rng(seed)
        a = random_observable(rng, n, classes)
        f, g = random_wavefunction(rng, a.space), random_wavefunction(rng, a.space)
        for k in range(n + 1):
            O = observation_matrix(a, k)
            assert np.abs(O @ O - O).max() < 1e-12
            assert abs(inner(a.space, O @ f, g) - inner(a.space, f, O @ g)) < 1e-12

    def test_order_n_minus_one_is_identity(self):
        a = random_observable(np.random.default_rng(0), 4, 3)
        f = random_wavefunction(np.random.default_rng(1), a.space)
        assert np.array_equal(observation_apply(a, 3, f), f)

    def test_resolution_one_matrix_is_identity(self):
        a = Observable.trivial(FiniteSampleSpace.uniform(4))
        assert np.array_equal(observation_matrix(a, 0), np.eye(4))

    def test_reversed_kills_example(self):
        f = np.array([Fraction(1), Fraction(-1), Fraction(0)], dtype=object)
        assert all(v == 0 for v in observation_apply(reversed_observable(), 1, f))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 4), seeds)
    def test_ladder_pvm(self, n, seed):
        rng = np.random.default_rng(seed)
        a = random_observable(rng, n, 3)
        assert pvm_residual(materialize_pvm(a).projections) < 1e-12
        assert pvm_residual(materialize_pvm(a, random_ladder(rng, n)).projections) < 1e-12


class TestConsistency:
    def test_resolution_one_partner(self):
        a = random_observable(np.random.default_rng(4), 3, 2)
        check_consistency(a, Observable.trivial(a.space))

    def test_same_classes_reversed_labels_rejected(self):
        with pytest.raises(ConsistencyError):
            check_consistency(forward_observable(), reversed_observable())

    def test_latin_layout_rejected(self):
        # one saturated block of 9 with bijective joint labels, but alpha
        # classes are not beta-label fibres; the operators then fail to commute
        sp = FiniteSampleSpace.uniform(9)
        rows = tuple(tuple(3 * i + j for j in range(3)) for i in range(3))
        cols = tuple(tuple(3 * i + j for i in range(3)) for j in range(3))
        a = Observable(sp, rows, tuple(j + 1 for i in range(3) for j in range(3)))
        b = Observable(sp, cols, tuple((i + j) % 3 + 1 for i in range(3) for j in range(3)))
        with pytest.raises(ConsistencyError, match="grid"):
            check_consistency(a, b)
        Oa, Ob = observation_matrix(a, 1), observation_matrix(b, 1)
        assert np.abs(Oa @ Ob - Ob @ Oa).max() == pytest.approx(0.25)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 2), seeds)
    def test_consistent_pairs_commute(self, n, m, blocks, seed):
        inst = random_consistent_family(np.random.default_rng(seed), n, m, blocks)
        a, b = inst.alphas[0], inst.betas[0]
        w = check_consistency(a, b)
        assert all(len(blk) == n * m for blk in w.blocks)
        for k in range(n):
            for j in range(m):
                Oa, Ob = observation_matrix(a, k), observation_matrix(b, j)
                assert np.abs(Oa @ Ob - Ob @ Oa).max() < 1e-12


class TestLifting:
    def test_single_atom_partner(self):
        a = random_observable(np.random.default_rng(1), 3, 2)
        la = lift_observable(a, FiniteSampleSpace([1.0]))
        assert la.labels == a.labels and la.classes == a.classes

    def test_structure_counts(self):
        la = lift_observable(forward_observable(), three_atom_space())
        assert la.space.size == 9 and len(la.classes) == 3 and la.resolution == 3

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), seeds)
    def test_lifts_consistent_and_commute(self, n, m, seed):
        rng = np.random.default_rng(seed)
        a, b = random_observable(rng, n, 2), random_observable(rng, m, 3)
        la, lb = lift_observable(a, b.space, "left"), lift_observable(b, a.space, "right")
        check_consistency(la, lb)
        for k in range(n):
            for j in range(m):
                Oa, Ob = observation_matrix(la, k), observation_matrix(lb, j)
                assert np.abs(Oa @ Ob - Ob @ Oa).max() < 1e-12

    def test_lift_function_layout(self):
        f = np.array([1.0, 2.0])
        assert np.array_equal(lift_function(f, 3, "left"), [1, 1, 1, 2, 2, 2])
        assert np.array_equal(lift_function(f, 3, "right"), [1, 2, 1, 2, 1, 2])


class TestStatisticalStrategies:
    def test_constant_wavefunction(self):
        inst = random_consistent_family(np.random.default_rng(0), 3, 2, 2)
        f = np.ones(inst.space.size)
        p = eval_statistical_commuting(inst.alphas, inst.betas, f).table
        expect = np.zeros((3, 2))
        expect[0, 0] = 1
        assert np.allclose(p[0, 0], expect, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), seeds)
    def test_product_wavefunction_factorizes(self, n, m, seed):
        rng = np.random.default_rng(seed)
        a, b = random_observable(rng, n, 2), random_observable(rng, m, 2)
        g, h = random_wavefunction(rng, a.space), random_wavefunction(rng, b.space)
        p = eval_statistical_spatial([a], [b], np.kron(g, h)).table[0, 0]
        pa = [inner(a.space, d, d).real for d in
              (observation_apply(a, k, g) - observation_apply(a, k - 1, g) for k in range(n))]
        pb = [inner(b.space, d, d).real for d in
              (observation_apply(b, k, h) - observation_apply(b, k - 1, h) for k in range(m))]
        assert np.abs(p - np.outer(pa, pb)).max() < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), seeds)
    def test_commuting_matches_quantum(self, n, m, seed):
        inst = random_consistent_family(np.random.default_rng(seed), n, m, 2, 2, 2)
        psi = Wavefunction(to_euclidean(inst.space, inst.f))
        q = eval_quantum_commuting([materialize_pvm(a) for a in inst.alphas], [materialize_pvm(b) for b in inst.betas], psi)
        s = eval_statistical_commuting(inst.alphas, inst.betas, inst.f)
        assert np.abs(q.table - s.table).max() < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), seeds)
    def test_spatial_matches_quantum(self, n, m, seed):
        sp = random_spatial_instance(np.random.default_rng(seed), n, m, 2, 2, 2, 2)
        prod = product_space(sp.alphas[0].space, sp.betas[0].space)
        psi = Wavefunction(to_euclidean(prod, sp.f))
        q = eval_quantum_spatial([materialize_pvm(a) for a in sp.alphas], [materialize_pvm(b) for b in sp.betas], psi)
        assert np.abs(q.table - eval_statistical_spatial(sp.alphas, sp.betas, sp.f).table).max() < 1e-10

    def test_inconsistent_pair_named(self):
        a, b = forward_observable(), reversed_observable()
        with pytest.raises(ConsistencyError, match="alpha_0 and beta_0"):
            eval_statistical_commuting([a], [b], np.array([1.0, 1.0, 1.0]))

    def test_annihilation_required(self):
        a = forward_observable()
        b = Observable.trivial(a.space)
        with pytest.raises(ValueError, match="annihilate"):
            eval_statistical_commuting([a], [b], np.ones(3), ladder_a=(0, 1, 2), ladder_b=(-1, 0))

    def test_norm_required(self):
        a = forward_observable()
        with pytest.raises(ValueError, match="norm"):
            eval_statistical_commuting([a], [Observable.trivial(a.space)], np.full(3, 2.0))
