import math

import numpy as np
import pytest

from src.twinfock.classes.exceptions import NumericalInvariantError, PhotonRangeError
from src.twinfock.classes.numerics import binomial
from src.twinfock.classes.parity import (
    FringeCoefficients,
    fringe_coefficients,
    fringe_coefficients_hypergeometric,
    fringe_phase_terms,
    parity_expectation,
    parity_expectation_trace,
    parity_operator,
)
from src.twinfock.classes.state_channel import (
    LossPair,
    TwinFockState,
    TwoModeDensityMatrix,
    lossy_density_matrix,
    oracle_density_matrix,
)

LOSS_GRID = [round(0.1 * i, 1) for i in range(11)]
PHASES = [0.0, 0.3, 0.7, math.pi / 2]


def states_up_to_total(max_total):
    return [
        TwinFockState(m, mp)
        for m in range(1, max_total + 1)
        for mp in range(m)
        if m + mp <= max_total
    ]


# ------------------------------------------------------------------
# Operador de paridad
# ------------------------------------------------------------------


def test_parity_operator_vacuum():
    op = parity_operator(0)
    assert dict(op.entries) == {((0, 0), (0, 0)): 1}


def test_parity_operator_single_photon_entries():
    op = parity_operator(1)
    assert op.entry((0, 1), (1, 0)) == 1j
    assert op.entry((1, 0), (0, 1)) == -1j
    assert len(op.entries) == 3


@pytest.mark.parametrize("n_max", range(0, 13))
def test_parity_operator_squares_to_identity(n_max):
    assert parity_operator(n_max).identity_error() <= 1e-12


def test_parity_operator_sparse_layout():
    op = parity_operator(3)
    q = op.to_sparse()
    assert q.shape == (10, 10)
    assert q.nnz == len(op.entries) == 10
    assert op.square() == {(occupation, occupation): 1 for occupation in op.basis()}


def test_parity_operator_rejects_invalid_cutoff():
    with pytest.raises(PhotonRangeError):
        parity_operator(-1)
    with pytest.raises(PhotonRangeError):
        parity_operator(65)


# ------------------------------------------------------------------
# Coeficientes de la franja
# ------------------------------------------------------------------


def test_fringe_coefficients_noon():
    coefficients = fringe_coefficients(TwinFockState(6, 0), LossPair.equal(0.05))
    assert coefficients.k1 == pytest.approx(0.05**6, rel=1e-12)
    assert coefficients.k2 == pytest.approx(0.95**6, rel=1e-12)
    assert coefficients.k2 == pytest.approx(0.735092, abs=1e-6)


def test_fringe_coefficients_two_one():
    coefficients = fringe_coefficients(TwinFockState(2, 1), LossPair.equal(0.3))
    assert coefficients.k1 == pytest.approx(0.321, abs=1e-12)
    assert coefficients.k2 == pytest.approx(0.469, abs=1e-10)


def test_fringe_coefficients_three_two():
    coefficients = fringe_coefficients(TwinFockState(3, 2), LossPair.equal(0.3))
    assert coefficients.k1 == pytest.approx(0.2979, abs=1e-4)
    assert coefficients.k2 == pytest.approx(0.3703, abs=1e-4)


@pytest.mark.parametrize("state", states_up_to_total(14), ids=str)
def test_fringe_coefficients_lossless_and_full_loss(state):
    lossless = fringe_coefficients(state, LossPair(0.0, 0.0))
    assert (lossless.k1, lossless.k2) == (0.0, 1.0)
    full = fringe_coefficients(state, LossPair(1.0, 1.0))
    assert (full.k1, full.k2) == (1.0, 0.0)


@pytest.mark.parametrize("state", states_up_to_total(14), ids=str)
def test_fringe_coefficients_at_half_loss(state):
    expected = 0.5 ** state.total * binomial(state.total, state.m)
    coefficients = fringe_coefficients(state, LossPair.equal(0.5))
    assert abs(coefficients.k1 - expected) <= 1e-12
    assert abs(coefficients.k2 - expected) <= 1e-12


@pytest.mark.parametrize("state", states_up_to_total(12), ids=str)
def test_fringe_coefficients_arm_swap_symmetry(state):
    for loss in (LossPair(0.1, 0.7), LossPair(0.0, 0.4), LossPair(0.9, 0.25)):
        direct = fringe_coefficients(state, loss)
        swapped = fringe_coefficients(state, loss.swapped())
        assert direct.k1 == pytest.approx(swapped.k1, abs=1e-14)
        assert direct.k2 == pytest.approx(swapped.k2, abs=1e-14)


@pytest.mark.parametrize("state", states_up_to_total(12), ids=str)
def test_loss_complement_duality_equal_arms(state):
    for loss_value in LOSS_GRID:
        loss = LossPair.equal(loss_value)
        direct = fringe_coefficients(state, loss)
        dual = fringe_coefficients(state, loss.complement())
        assert abs(direct.k1 - dual.k2) <= 1e-10
        assert abs(direct.k2 - dual.k1) <= 1e-10


@pytest.mark.parametrize("state", states_up_to_total(10), ids=str)
def test_hypergeometric_path_matches_binomial_path(state):
    for loss in (LossPair(0.05, 0.05), LossPair(0.3, 0.6), LossPair(0.5, 0.5), LossPair(0.9, 0.2)):
        binomial_form = fringe_coefficients(state, loss)
        hypergeometric = fringe_coefficients_hypergeometric(state, loss)
        assert hypergeometric.k1 == pytest.approx(binomial_form.k1, rel=1e-10, abs=1e-15)
        assert hypergeometric.k2 == pytest.approx(binomial_form.k2, rel=1e-10, abs=1e-15)


def test_hypergeometric_path_requires_positive_loss():
    with pytest.raises(PhotonRangeError):
        fringe_coefficients_hypergeometric(TwinFockState(2, 1), LossPair(0.0, 0.3))


def test_fringe_coefficients_validation():
    with pytest.raises(NumericalInvariantError):
        FringeCoefficients(-0.1, 0.5)
    with pytest.raises(NumericalInvariantError):
        FringeCoefficients(0.6, 0.6)
    assert FringeCoefficients(0.0, 0.0).signal == 0.0


@pytest.mark.parametrize("delta_m", range(1, 9))
def test_fringe_phase_terms_match_direct_evaluation(delta_m):
    for phi in (0.0, 0.1, 0.7, 1.3, 2.9, -0.4):
        cos_term, sin_term = fringe_phase_terms(delta_m, phi)
        argument = delta_m * (phi - math.pi / 2)
        assert cos_term == pytest.approx(math.cos(argument), abs=1e-12)
        assert sin_term == pytest.approx(math.sin(argument), abs=1e-12)


# ------------------------------------------------------------------
# Valor esperado
# ------------------------------------------------------------------


def test_parity_expectation_examples():
    assert parity_expectation(TwinFockState(1, 0), LossPair(0.0, 0.0), math.pi / 2) == pytest.approx(1.0)
    assert parity_expectation(TwinFockState(6, 0), LossPair.equal(0.05), 0.0) == pytest.approx(
        -0.735092, abs=1e-6
    )
    assert parity_expectation(TwinFockState(2, 1), LossPair.equal(0.3), 0.0) == pytest.approx(
        0.321, abs=1e-12
    )


def test_parity_expectation_bounded_and_periodic():
    for state in states_up_to_total(10):
        period = 2 * math.pi / state.delta_m
        for loss in (LossPair(0.0, 0.0), LossPair(0.2, 0.6), LossPair.equal(0.5), LossPair(1.0, 0.3)):
            for phi in (0.0, 0.25, 1.0, 2.2, 3.9):
                value = parity_expectation(state, loss, phi)
                assert abs(value) <= 1.0 + 1e-12
                assert parity_expectation(state, loss, phi + period) == pytest.approx(value, abs=1e-12)


def test_trace_of_single_photon_state():
    rho = lossy_density_matrix(TwinFockState(1, 0), LossPair(0.0, 0.0), math.pi / 2)
    assert parity_expectation_trace(rho, parity_operator(1)) == pytest.approx(1.0, abs=1e-12)


def test_trace_of_vacuum():
    vacuum = TwoModeDensityMatrix({((0, 0), (0, 0)): 1.0}, 0)
    assert parity_expectation_trace(vacuum, parity_operator(4)) == 1.0


def test_trace_matches_dense_product():
    rho = lossy_density_matrix(TwinFockState(3, 1), LossPair(0.2, 0.4), 0.7)
    op = parity_operator(4)
    basis = rho.basis()
    dense_q = np.array([[op.entry(row, col) for col in basis] for row in basis])
    expected = np.trace(dense_q @ rho.to_dense())
    assert abs(expected.imag) <= 1e-12
    assert parity_expectation_trace(rho, op) == pytest.approx(expected.real, abs=1e-12)


def test_trace_requires_large_enough_cutoff():
    rho = lossy_density_matrix(TwinFockState(3, 1), LossPair.equal(0.2), 0.0)
    with pytest.raises(PhotonRangeError):
        parity_expectation_trace(rho, parity_operator(3))


@pytest.mark.parametrize(
    "state", [TwinFockState(m, mp) for m in range(1, 6) for mp in range(m)], ids=str
)
def test_closed_form_expectation_matches_oracle_trace(state):
    op = parity_operator(state.total)
    for loss_a in LOSS_GRID:
        for loss_b in LOSS_GRID:
            loss = LossPair(loss_a, loss_b)
            for phi in PHASES:
                rho = oracle_density_matrix(state, loss, phi)
                assert parity_expectation_trace(rho, op) == pytest.approx(
                    parity_expectation(state, loss, phi), abs=1e-10
                )
