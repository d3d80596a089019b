import math

import pytest

from src.twinfock.classes.exceptions import (
    NumericalInvariantError,
    PhotonRangeError,
    UsageError,
)
from src.twinfock.classes.metrology import (
    DIVERGENT,
    ExpansionRegime,
    analytic_optimal_phases,
    beats_snl_criterion,
    is_divergent,
    limits,
    optimal_fringe_cosine,
    optimal_sensitivity,
    seed_phase,
    sensitivity,
    sensitivity_smallloss_expansion,
    visibility,
    visibility_complement_expansion,
)
from src.twinfock.classes.numerics import binomial
from src.twinfock.classes.parity import (
    fringe_coefficients,
    fringe_phase_terms,
    parity_expectation,
)
from src.twinfock.classes.state_channel import LossPair, TwinFockState

LOSS_GRID = [round(0.1 * i, 1) for i in range(11)]


def states_up_to_total(max_total):
    return [
        TwinFockState(m, mp)
        for m in range(1, max_total + 1)
        for mp in range(m)
        if m + mp <= max_total
    ]


def delta_phi_at_cosine(state, loss, cosine):
    coefficients = fringe_coefficients(state, loss)
    k1, k2 = coefficients.k1, coefficients.k2
    expectation = k1 + k2 * cosine
    return math.sqrt(1 - expectation**2) / (k2 * state.delta_m * math.sqrt(1 - cosine**2))


# ------------------------------------------------------------------
# Visibilidad
# ------------------------------------------------------------------


@pytest.mark.parametrize("state", states_up_to_total(14), ids=str)
def test_visibility_is_exactly_one_half_at_half_loss(state):
    report = visibility(state, LossPair.equal(0.5))
    assert abs(report.visibility - 0.5) <= 1e-12


def test_visibility_examples():
    assert visibility(TwinFockState(1, 0), LossPair.equal(0.3)).visibility == pytest.approx(0.7, abs=1e-12)
    assert visibility(TwinFockState(3, 2), LossPair.equal(0.3)).visibility == pytest.approx(0.5542, abs=1e-4)


@pytest.mark.parametrize("state", states_up_to_total(10), ids=str)
def test_visibility_limits(state):
    lossless = visibility(state, LossPair(0.0, 0.0))
    assert lossless.visibility == 1.0
    assert lossless.signal == 1.0
    assert visibility(state, LossPair(1.0, 1.0)).visibility == 0.0
    for loss in (LossPair(0.2, 0.9), LossPair(0.6, 0.1)):
        assert 0.0 <= visibility(state, loss).visibility <= 1.0


@pytest.mark.parametrize("state", [TwinFockState(2, 1), TwinFockState(3, 2), TwinFockState(8, 2)], ids=str)
@pytest.mark.parametrize("loss", [LossPair(1.0, 0.0), LossPair(0.0, 1.0)], ids=str)
def test_visibility_vanishes_with_one_dark_arm(state, loss):
    coefficients = fringe_coefficients(state, loss)
    assert (coefficients.k1, coefficients.k2) == (0.0, 0.0)
    report = visibility(state, loss)
    assert report.signal == 0.0
    assert report.visibility == 0.0
    assert optimal_sensitivity(state, loss).diverges


@pytest.mark.parametrize("state", states_up_to_total(12), ids=str)
def test_visibility_complement_symmetry(state):
    for loss_value in LOSS_GRID:
        direct = visibility(state, LossPair.equal(loss_value)).visibility
        complement = visibility(state, LossPair.equal(1.0 - loss_value)).visibility
        assert abs(direct + complement - 1.0) <= 1e-10


@pytest.mark.parametrize(
    "state",
    [
        TwinFockState(1, 0),
        TwinFockState(2, 1),
        TwinFockState(2, 0),
        TwinFockState(3, 1),
        TwinFockState(4, 0),
        TwinFockState(5, 1),
    ],
    ids=str,
)
def test_visibility_central_slope(state):
    step = 1e-5
    slope = (
        visibility(state, LossPair.equal(0.5 + step)).visibility
        - visibility(state, LossPair.equal(0.5 - step)).visibility
    ) / (2 * step)
    assert slope == pytest.approx(-(state.delta_m**2) / state.total, rel=1e-4)


@pytest.mark.parametrize(
    "state",
    [TwinFockState(delta_m + mp, mp) for delta_m in range(1, 5) for mp in range(0, 3)],
    ids=str,
)
def test_visibility_near_zero_law(state):
    loss_value = 1e-3
    complement = 1.0 - visibility(state, LossPair.equal(loss_value)).visibility
    ratio = complement / (binomial(state.m, state.delta_m) * loss_value**state.delta_m)
    assert 0.95 <= ratio <= 1.05


@pytest.mark.parametrize("delta_m", [1, 2, 3])
def test_noon_has_highest_visibility_below_half_loss(delta_m):
    noon = TwinFockState(delta_m, 0)
    for m_prime in range(1, 4):
        competitor = TwinFockState(delta_m + m_prime, m_prime)
        low = LossPair.equal(0.3)
        high = LossPair.equal(0.7)
        assert visibility(noon, low).visibility > visibility(competitor, low).visibility
        assert visibility(noon, high).visibility < visibility(competitor, high).visibility


def test_visibility_gap_grows_with_total_photons():
    loss = LossPair.equal(0.3)
    noon = visibility(TwinFockState(1, 0), loss).visibility
    gaps = [noon - visibility(TwinFockState(1 + mp, mp), loss).visibility for mp in (1, 2)]
    assert 0 < gaps[0] < gaps[1]


# ------------------------------------------------------------------
# Desarrollos
# ------------------------------------------------------------------


def test_visibility_complement_expansion_examples():
    assert visibility_complement_expansion(TwinFockState(1, 0), 0.5, "near_half") == 0.5
    assert visibility_complement_expansion(TwinFockState(6, 0), 0.01, ExpansionRegime.NEAR_ZERO) == pytest.approx(
        1e-12, rel=1e-12
    )
    state = TwinFockState(3, 2)
    predicted = visibility_complement_expansion(state, 0.45, "near_half")
    assert predicted == pytest.approx(0.49, abs=1e-12)
    assert 1.0 - visibility(state, LossPair.equal(0.45)).visibility == pytest.approx(predicted, abs=0.05**2)


def test_visibility_complement_expansion_near_one():
    state = TwinFockState(4, 1)
    predicted = visibility_complement_expansion(state, 0.999, "near_one")
    assert predicted == pytest.approx(1.0 - binomial(4, 3) * 0.001**3)
    actual = 1.0 - visibility(state, LossPair.equal(0.999)).visibility
    assert (1.0 - actual) / (1.0 - predicted) == pytest.approx(1.0, abs=0.05)


def test_visibility_complement_expansion_unknown_regime():
    with pytest.raises(UsageError):
        visibility_complement_expansion(TwinFockState(2, 0), 0.1, "near_quarter")


def test_sensitivity_smallloss_expansion_even_branch():
    state = TwinFockState(6, 0)
    assert sensitivity_smallloss_expansion(state, 0.0, math.pi / 12) == pytest.approx(1 / 6)
    predicted = sensitivity_smallloss_expansion(state, 0.01, math.pi / 12)
    assert predicted == pytest.approx(0.17667, abs=1e-5)
    full = sensitivity(state, LossPair.equal(0.01), math.pi / 12).delta_phi
    assert abs(full - predicted) <= 10 * 0.01**2


def test_sensitivity_smallloss_expansion_odd_branch():
    predicted = sensitivity_smallloss_expansion(TwinFockState(5, 0), 0.01, math.pi / 5)
    assert predicted == pytest.approx(0.19, abs=1e-12)


def test_sensitivity_smallloss_expansion_diverges():
    with pytest.raises(NumericalInvariantError):
        sensitivity_smallloss_expansion(TwinFockState(6, 0), 0.01, 0.0)


# ------------------------------------------------------------------
# Sensibilidad
# ------------------------------------------------------------------


def test_sensitivity_examples():
    noon = TwinFockState(6, 0)
    assert sensitivity(noon, LossPair(0.0, 0.0), math.pi / 12).delta_phi == pytest.approx(1 / 6, rel=1e-12)
    assert sensitivity(noon, LossPair.equal(0.05), math.pi / 12).delta_phi == pytest.approx(0.2267, abs=1e-4)


@pytest.mark.parametrize("loss_value", [0.0, 0.05, 0.4, 0.99])
def test_sensitivity_diverges_at_fringe_extremum(loss_value):
    point = sensitivity(TwinFockState(6, 0), LossPair.equal(loss_value), math.pi / 6)
    assert point.delta_phi == DIVERGENT
    assert point.diverges
    assert not point.beats_shot_noise


def test_sensitivity_at_full_loss_is_divergent():
    point = sensitivity(TwinFockState(3, 1), LossPair(1.0, 1.0), 0.4)
    assert is_divergent(point.delta_phi)
    assert is_divergent(point.shot_noise_limit)
    assert point.effective_photons == 0.0


def test_sensitivity_fields():
    point = sensitivity(TwinFockState(8, 2), LossPair(0.1, 0.3), 0.3)
    assert point.phi == 0.3
    assert point.effective_photons == pytest.approx(10 * (1 - 0.05 - 0.15))
    assert point.shot_noise_limit == pytest.approx(1 / math.sqrt(8.0))
    assert point.heisenberg_limit == pytest.approx(1 / 8.0)


@pytest.mark.parametrize(
    "state",
    [TwinFockState(3, 1), TwinFockState(6, 0), TwinFockState(8, 2), TwinFockState(4, 3), TwinFockState(5, 0)],
    ids=str,
)
def test_sensitivity_matches_error_propagation(state):
    step = 1e-6
    for loss in (LossPair.equal(0.05), LossPair(0.2, 0.4)):
        for phi in (0.05, 0.2, 0.45, 0.9, 1.7):
            _, sin_term = fringe_phase_terms(state.delta_m, phi)
            if abs(sin_term) < 0.2:
                continue
            derivative = (
                parity_expectation(state, loss, phi + step) - parity_expectation(state, loss, phi - step)
            ) / (2 * step)
            expectation = parity_expectation(state, loss, phi)
            numeric = math.sqrt(1 - expectation**2) / abs(derivative)
            assert sensitivity(state, loss, phi).delta_phi == pytest.approx(numeric, rel=1e-6)


# ------------------------------------------------------------------
# Sensibilidad optima
# ------------------------------------------------------------------


def test_optimal_sensitivity_table_rows():
    loss = LossPair.equal(0.05)
    assert optimal_sensitivity(TwinFockState(8, 2), loss).delta_phi == pytest.approx(0.2665, abs=1e-4)
    assert optimal_sensitivity(TwinFockState(14, 8), loss).delta_phi == pytest.approx(0.387, abs=0.002)


def test_optimal_sensitivity_odd_lossless():
    point = optimal_sensitivity(TwinFockState(5, 0), LossPair(0.0, 0.0))
    assert point.delta_phi == pytest.approx(0.2, abs=1e-12)
    assert point.phi == pytest.approx(math.pi / 5, abs=1e-12)


@pytest.mark.parametrize("delta_m", range(1, 11))
@pytest.mark.parametrize("m_prime", [0, 1, 3])
def test_optimal_sensitivity_lossless_heisenberg(delta_m, m_prime):
    state = TwinFockState(delta_m + m_prime, m_prime)
    point = optimal_sensitivity(state, LossPair(0.0, 0.0))
    assert abs(point.delta_phi - 1.0 / delta_m) <= 1e-9
    assert 0.0 <= point.phi < 2 * math.pi / delta_m
    half_period = math.pi / delta_m
    offset = (point.phi - analytic_optimal_phases(delta_m)[0]) / half_period
    assert offset == pytest.approx(round(offset), abs=1e-9)


def test_analytic_optimal_phases():
    assert analytic_optimal_phases(6) == pytest.approx([math.pi / 12, 3 * math.pi / 12])
    assert analytic_optimal_phases(5, count=3) == pytest.approx([math.pi / 5, 2 * math.pi / 5, 3 * math.pi / 5])


@pytest.mark.parametrize("delta_m", range(1, 11))
def test_seed_phase_is_lossless_optimum_inside_search_interval(delta_m):
    seed = seed_phase(delta_m)
    assert math.pi / 2 < seed < math.pi / 2 + math.pi / delta_m
    assert seed == pytest.approx(math.pi / 2 + math.pi / (2 * delta_m), abs=1e-12)
    offset = (seed - analytic_optimal_phases(delta_m)[0]) / (math.pi / delta_m)
    assert offset == pytest.approx(round(offset), abs=1e-12)
    state = TwinFockState(delta_m, 0)
    assert sensitivity(state, LossPair(0.0, 0.0), seed).delta_phi == pytest.approx(1 / delta_m, rel=1e-12)


@pytest.mark.parametrize(
    "state, loss",
    [
        (TwinFockState(8, 2), LossPair.equal(0.05)),
        (TwinFockState(3, 2), LossPair.equal(0.4)),
        (TwinFockState(6, 0), LossPair.equal(0.3)),
        (TwinFockState(5, 2), LossPair(0.1, 0.6)),
        (TwinFockState(2, 1), LossPair.equal(0.75)),
    ],
    ids=str,
)
def test_optimal_sensitivity_matches_closed_form_cosine(state, loss):
    cosine = optimal_fringe_cosine(fringe_coefficients(state, loss))
    expected = delta_phi_at_cosine(state, loss, cosine)
    assert optimal_sensitivity(state, loss).delta_phi == pytest.approx(expected, rel=1e-9)


def test_optimal_sensitivity_single_photon_tends_to_wall():
    loss = LossPair.equal(0.05)
    assert optimal_fringe_cosine(fringe_coefficients(TwinFockState(1, 0), loss)) == pytest.approx(1.0)
    point = optimal_sensitivity(TwinFockState(1, 0), loss)
    assert point.delta_phi == pytest.approx(1 / math.sqrt(0.95), rel=1e-6)


def test_optimal_sensitivity_at_full_loss():
    point = optimal_sensitivity(TwinFockState(4, 1), LossPair(1.0, 1.0))
    assert point.diverges


# ------------------------------------------------------------------
# Limites y criterio
# ------------------------------------------------------------------


def test_limits_examples():
    assert limits(TwinFockState(6, 0), LossPair.equal(0.05)).snl == pytest.approx(0.419, abs=1e-3)
    assert limits(TwinFockState(10, 4), LossPair.equal(0.05)).snl == pytest.approx(0.274, abs=1e-3)
    snl, hl = limits(TwinFockState(6, 0), LossPair(0.0, 0.0))
    assert snl == pytest.approx(1 / math.sqrt(6))
    assert hl == pytest.approx(1 / 6)


def test_limits_full_loss():
    with pytest.raises(PhotonRangeError):
        limits(TwinFockState(6, 0), LossPair(1.0, 1.0))


@pytest.mark.parametrize(
    "state, expected",
    [
        (TwinFockState(6, 0), True),
        (TwinFockState(8, 2), True),
        (TwinFockState(12, 6), True),
        (TwinFockState(3, 1), False),
        (TwinFockState(9, 7), False),
    ],
)
def test_beats_snl_criterion(state, expected):
    assert beats_snl_criterion(state) is expected
