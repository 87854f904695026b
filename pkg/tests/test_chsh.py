from fractions import Fraction

import numpy as np
import pytest

from entangle_lab.chsh import (
    ConstructionError,
    build_chsh_statistical,
    build_vw,
    chsh_ergodic_realization,
    forward_observable,
    make_basis,
    noncommutation_witness,
    rank_one_generator,
    reflection_transposition,
    reversed_observable,
    solve_fg,
    three_atom_space,
    verify_angle_equations,
)
from entangle_lab.games import fourier_transform_2d
from entangle_lab.observables import inner, observation_apply

SQ2 = np.sqrt(2)


@pytest.fixture(scope="module")
def result():
    return build_chsh_statistical()


class TestGenerators:
    def test_displayed_vectors_need_a_sign(self):
        sp = three_atom_space()
        raw_v = np.array([1 / SQ2, 1 / SQ2, -SQ2])
        raw_w = np.array([-SQ2, 1 / SQ2, 1 / SQ2])
        assert inner(sp, raw_v, raw_w).real == pytest.approx(-0.5)
        v, w = build_vw()
        assert inner(sp, v, w).real == pytest.approx(0.5)
        assert inner(sp, v, v).real == pytest.approx(1) and inner(sp, w, w).real == pytest.approx(1)

    def test_forward_generator(self):
        # O_1 - O_0 on one class: projection onto (2, -1, -1) / sqrt2
        u = rank_one_generator(forward_observable())
        assert np.allclose(u, [SQ2, -1 / SQ2, -1 / SQ2])

    def test_reversed_generator(self):
        u = rank_one_generator(reversed_observable())
        assert np.allclose(u, [1 / SQ2, 1 / SQ2, -SQ2])

    def test_rank_one_action(self):
        sp = three_atom_space()
        u = rank_one_generator(forward_observable())
        f = np.array([0.3, -1.2, 0.9])
        lhs = observation_apply(forward_observable(), 1, f) - observation_apply(forward_observable(), 0, f)
        assert np.allclose(lhs, inner(sp, f, u) * u)

    def test_solve_fg_rejects_wrong_angle(self):
        v, w = build_vw()
        with pytest.raises(ConstructionError, match="cos"):
            solve_fg(three_atom_space(), v, w, 0.0, np.pi / 2)

    @pytest.mark.parametrize("kappa", [0.0, -np.pi / 6])
    def test_basis_orthonormal_and_reconstructs(self, kappa):
        b = make_basis(kappa)
        sp = b.space
        gram = np.array([[inner(sp, x, y).real for y in (b.f, b.g)] for x in (b.f, b.g)])
        assert np.abs(gram - np.eye(2)).max() < 1e-12
        assert np.abs(np.cos(kappa) * b.f + np.sin(kappa) * b.g - b.v).max() < 1e-12
        assert np.abs(np.cos(b.lam) * b.f + np.sin(b.lam) * b.g - b.w).max() < 1e-12
        # both span the mean-zero functions, so O_0 kills them
        assert abs(inner(sp, b.f, np.ones(3))) < 1e-12 and abs(inner(sp, b.g, np.ones(3))) < 1e-12


class TestAngleEquations:
    @pytest.mark.parametrize("kappa", [0.0, -np.pi / 6])
    def test_six_integrals(self, kappa):
        b = make_basis(kappa)
        for obs, ang, u, uh in ((b.obs_kappa, b.kappa, b.v, b.v_hat), (b.obs_lambda, b.lam, b.w, b.w_hat)):
            rep = verify_angle_equations(obs, ang, b.f, b.g, u, uh)
            assert rep.max_residual < 1e-10
            for key in ("a1", "a2", "a3", "a4", "a5", "a6"):
                assert rep.ledger[key] == pytest.approx(rep.integrals[key], abs=1e-12)

    def test_integrals_against_cos_sin(self):
        b = make_basis(0.0)
        rep = verify_angle_equations(b.obs_lambda, np.pi / 3, b.f, b.g)
        assert rep.integrals["a1"] == pytest.approx(0.25)
        assert rep.integrals["a3"] == pytest.approx(0.75)
        assert rep.integrals["a5"] == pytest.approx(np.sqrt(3) / 4)

    def test_w_hat_sign(self):
        # with the given w_hat the pairing <g, w_hat> equals -cos(lambda)
        b = make_basis(0.0)
        assert inner(b.space, b.g, b.w_hat).real == pytest.approx(-np.cos(b.lam))
        assert inner(b.space, b.g, b.v_hat).real == pytest.approx(np.cos(b.kappa))


class TestStatisticalStrategy:
    def test_value(self, result):
        assert abs(result.value.value - 13 / 16) < 1e-10
        assert result.classical.exact == Fraction(3, 4)

    def test_matches_angular_table(self, result):
        assert result.angular_deviation < 1e-10

    def test_angle_residuals(self, result):
        assert result.max_angle_residual < 1e-10

    def test_entangled(self, result):
        assert np.allclose(result.schmidt.schmidt_coefficients, [1 / SQ2, 1 / SQ2])
        assert result.schmidt.l1_norm > 1 + 1e-6 and not result.schmidt.classical

    def test_pairing(self, result):
        assert result.pairing == {"forward_generator": "-w", "reversed_generator": "+v"}

    def test_wavefunction_normalized(self, result):
        d = result.data
        assert inner(d.product, d.delta, d.delta).real == pytest.approx(1)


class TestNoncommutation:
    def test_exact_values(self):
        w = noncommutation_witness()
        assert w.beta_then_alpha[2] == Fraction(-1, 2)
        assert w.alpha_then_beta[2] == 0
        assert all(isinstance(v, Fraction) for v in w.beta_then_alpha + w.alpha_then_beta)

    def test_alpha_step(self):
        f = np.array([Fraction(1), Fraction(-1), Fraction(0)], dtype=object)
        assert list(observation_apply(forward_observable(), 1, f)) == [1, Fraction(-1, 2), Fraction(-1, 2)]

    def test_commutator_is_large(self):
        from entangle_lab.observables import observation_matrix

        A, B = observation_matrix(forward_observable(), 1), observation_matrix(reversed_observable(), 1)
        assert np.linalg.norm(A @ B - B @ A, 2) > 0.1


class TestErgodicRealization:
    def test_transpositions(self):
        assert reflection_transposition(forward_observable()) == (1, 2)
        assert reflection_transposition(reversed_observable()) == (0, 1)

    def test_dual_table(self, result):
        erg = chsh_ergodic_realization(result)
        assert erg.residual < 1e-10
        assert np.abs(erg.target - fourier_transform_2d(result.angular.table)).max() < 1e-10
        assert np.abs(erg.table.to_strategy().table - result.angular.table).max() < 1e-10

    def test_orbits_have_size_two(self, result):
        erg = chsh_ergodic_realization(result)
        assert all(T.orbit_size == 2 for T in erg.transformations_a + erg.transformations_b)
