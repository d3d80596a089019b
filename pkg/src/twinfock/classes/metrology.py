"""
Visibilidad, sensibilidad de fase, limites de referencia y desarrollos asintoticos.

Clases principales:
  - VisibilityReport: senal S = K2/(K1+K2) y visibilidad relativa V = S/S(0,0).
  - SensitivityPoint: sensibilidad por propagacion lineal de errores junto a los
    limites shot-noise (1/sqrt(N)) y de Heisenberg (1/N) con N efectivo.
  - NoiseLimits: par (snl, hl).

La sensibilidad usa Delta Q = sqrt(1 - <Q>^2), valido porque Q^2 = 1. En los
extremos de la franja el denominador se anula y se devuelve el centinela
DIVERGENT (infinito) en lugar de lanzar una excepcion.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Union

from src.common.config import DIVERGENCE_THRESHOLD
from src.common.logger import logger
from src.twinfock.classes.exceptions import NumericalInvariantError, PhotonRangeError, UsageError
from src.twinfock.classes.numerics import binomial, golden_section_search
from src.twinfock.classes.parity import (
    FringeCoefficients,
    fringe_coefficients,
    fringe_phase_terms,
)
from src.twinfock.classes.state_channel import LossPair, TwinFockState, validate_phase
from src.twinfock.config.config import PHASE_SEARCH_TOLERANCE, SEED_PREFERENCE_TOLERANCE

# Centinela de divergencia (extremos de la franja o perdida total)
DIVERGENT = math.inf


def is_divergent(value: float) -> bool:
    """Indica si un valor es el centinela de divergencia."""
    return math.isinf(value)


class ExpansionRegime(str, Enum):
    """Regimen de los desarrollos de la visibilidad."""

    NEAR_ZERO = "near_zero"
    NEAR_HALF = "near_half"
    NEAR_ONE = "near_one"


class NoiseLimits(NamedTuple):
    """Limites de ruido shot y de Heisenberg."""

    snl: float
    hl: float


@dataclass(frozen=True)
class VisibilityReport:
    """
    Senal y visibilidad relativa de un estado bajo perdidas.

    :param signal: Senal S = K2/(K1+K2).
    :param visibility: Visibilidad relativa S/S(0,0).
    :param loss: Perdidas por brazo.
    :param state: Estado de entrada.
    """

    signal: float
    visibility: float
    loss: LossPair
    state: TwinFockState


@dataclass(frozen=True)
class SensitivityPoint:
    """
    Sensibilidad de fase en un punto de trabajo.

    :param phi: Fase.
    :param delta_phi: Sensibilidad o DIVERGENT.
    :param shot_noise_limit: 1/sqrt(N efectivo), DIVERGENT con perdida total.
    :param heisenberg_limit: 1/N efectivo, DIVERGENT con perdida total.
    :param effective_photons: N efectivo = (m+m')(1 - L_a/2 - L_b/2).
    """

    phi: float
    delta_phi: float
    shot_noise_limit: float
    heisenberg_limit: float
    effective_photons: float

    @property
    def diverges(self) -> bool:
        return is_divergent(self.delta_phi)

    @property
    def beats_shot_noise(self) -> bool:
        return not self.diverges and self.delta_phi < self.shot_noise_limit


def effective_photons(state: TwinFockState, loss: LossPair) -> float:
    """Numero efectivo de fotones transmitidos (m+m')(1 - L_a/2 - L_b/2)."""
    return state.total * (1.0 - loss.loss_a / 2 - loss.loss_b / 2)


def limits(state: TwinFockState, loss: LossPair) -> NoiseLimits:
    """
    Limites shot-noise y de Heisenberg con el numero efectivo de fotones.

    :param state: Estado de entrada.
    :param loss: Perdidas por brazo.
    :return: (1/sqrt(N), 1/N).
    :rtype: NoiseLimits
    :raises PhotonRangeError: Si N efectivo es nulo (perdida total).
    """
    photons = effective_photons(state, loss)
    if photons <= 0:
        raise PhotonRangeError(
            f"El numero efectivo de fotones de {state} es nulo con perdidas {loss}."
        )
    return NoiseLimits(1.0 / math.sqrt(photons), 1.0 / photons)


def limits_or_divergent(state: TwinFockState, loss: LossPair) -> NoiseLimits:
    """Limites de ruido, o el centinela DIVERGENT si N efectivo es nulo."""
    try:
        return limits(state, loss)
    except PhotonRangeError:
        return NoiseLimits(DIVERGENT, DIVERGENT)


def beats_snl_criterion(state: TwinFockState) -> bool:
    """
    Criterio dm > sqrt(m + m') para poder superar el limite shot-noise.

    :param state: Estado de entrada.
    :return: True si dm^2 > m + m'.
    """
    return state.delta_m**2 > state.total


def visibility(state: TwinFockState, loss: LossPair) -> VisibilityReport:
    """
    Visibilidad relativa V = S(L_a, L_b) / S(0, 0).

    :param state: Estado de entrada.
    :param loss: Perdidas por brazo.
    :return: Senal y visibilidad.
    :rtype: VisibilityReport
    """
    signal = fringe_coefficients(state, loss).signal
    signal_at_zero_loss = fringe_coefficients(state, LossPair(0.0, 0.0)).signal
    return VisibilityReport(
        signal=signal,
        visibility=signal / signal_at_zero_loss,
        loss=loss,
        state=state,
    )


def _delta_phi(coefficients: FringeCoefficients, delta_m: int, phi: float) -> float:
    """
    Sensibilidad sqrt(1 - <Q>^2) / (K2 dm |sin(dm (phi - pi/2))|).

    1 - <Q> y 1 + <Q> se evaluan por separado para evitar la cancelacion
    cerca de los extremos de la franja.
    """
    k1, k2 = coefficients.k1, coefficients.k2
    cos_term, sin_term = fringe_phase_terms(delta_m, phi)

    denominator = k2 * delta_m * abs(sin_term)
    if denominator < DIVERGENCE_THRESHOLD:
        return DIVERGENT

    sin_square = sin_term * sin_term
    if cos_term >= 0:
        one_plus_cos = 1.0 + cos_term
        one_minus_cos = sin_square / one_plus_cos
    else:
        one_minus_cos = 1.0 - cos_term
        one_plus_cos = sin_square / one_minus_cos

    one_minus_q = max(0.0, 1.0 - k1 - k2) + k2 * one_minus_cos
    one_plus_q = max(0.0, 1.0 + k1 - k2) + k2 * one_plus_cos
    return math.sqrt(one_minus_q * one_plus_q) / denominator


def sensitivity(state: TwinFockState, loss: LossPair, phi: float) -> SensitivityPoint:
    """
    Sensibilidad de fase por propagacion lineal de errores.

    :param state: Estado de entrada.
    :param loss: Perdidas por brazo.
    :param phi: Fase de trabajo.
    :return: Punto de sensibilidad; DIVERGENT en los extremos de la franja o con K2 = 0.
    :rtype: SensitivityPoint
    """
    phi = validate_phase(phi)
    coefficients = fringe_coefficients(state, loss)
    noise = limits_or_divergent(state, loss)
    return SensitivityPoint(
        phi=phi,
        delta_phi=_delta_phi(coefficients, state.delta_m, phi),
        shot_noise_limit=noise.snl,
        heisenberg_limit=noise.hl,
        effective_photons=effective_photons(state, loss),
    )


def analytic_optimal_phases(delta_m: int, count: int = 2) -> List[float]:
    """
    Fases optimas sin perdidas.

    (2n - 1) pi / (2 dm) si dm es par y n pi / dm si dm es impar, n = 1..count.

    :param delta_m: Diferencia de fotones.
    :param count: Numero de fases a devolver.
    :return: Lista de fases.
    """
    if delta_m % 2 == 0:
        return [(2 * n - 1) * math.pi / (2 * delta_m) for n in range(1, count + 1)]
    return [n * math.pi / delta_m for n in range(1, count + 1)]


def seed_phase(delta_m: int) -> float:
    """
    Optimo analitico sin perdidas trasladado al semiperiodo (pi/2, pi/2 + pi/dm).

    Los optimos se repiten cada pi/dm, asi que se desplaza el primero por
    multiplos enteros de pi/dm.

    :param delta_m: Diferencia de fotones.
    :return: Fase semilla de la busqueda.
    """
    half_period = math.pi / delta_m
    first = analytic_optimal_phases(delta_m, count=1)[0]
    shifts = math.floor((math.pi / 2 - first) / half_period) + 1
    return first + shifts * half_period


def optimal_fringe_cosine(coefficients: FringeCoefficients) -> float:
    """
    Coseno de la franja que minimiza la sensibilidad.

    Raiz en [0, 1] de K1 K2 c^2 - (1 - K1^2 - K2^2) c + K1 K2 = 0; vale 0 si
    K1 K2 = 0.

    :param coefficients: Coeficientes de la franja.
    :return: Coseno optimo.
    """
    k1, k2 = coefficients.k1, coefficients.k2
    product = k1 * k2
    if product <= 0:
        return 0.0
    b = 1.0 - k1 * k1 - k2 * k2
    discriminant = max(0.0, b * b - 4.0 * product * product)
    return min(1.0, 2.0 * product / (b + math.sqrt(discriminant)))


def optimal_sensitivity(
    state: TwinFockState,
    loss: LossPair,
    tolerance: float = PHASE_SEARCH_TOLERANCE,
) -> SensitivityPoint:
    """
    Sensibilidad minima sobre un periodo de la franja.

    La busqueda de seccion aurea recorre el semiperiodo abierto entre dos
    extremos de la franja, donde la sensibilidad es unimodal; el otro
    semiperiodo es su imagen especular. Se comparan el resultado y las
    semillas (optimo analitico sin perdidas y sus vecinos de rejilla), y se
    conserva la semilla salvo mejora apreciable. La fase se devuelve reducida
    al periodo [0, 2 pi/dm).

    :param state: Estado de entrada.
    :param loss: Perdidas por brazo.
    :param tolerance: Anchura final del intervalo de fase.
    :return: Punto de sensibilidad optima.
    :rtype: SensitivityPoint
    """
    delta_m = state.delta_m
    coefficients = fringe_coefficients(state, loss)
    noise = limits_or_divergent(state, loss)
    period = 2 * math.pi / delta_m

    # Semiperiodo entre los extremos de la franja en phi = pi/2 y pi/2 + pi/dm
    lower = math.pi / 2
    upper = math.pi / 2 + math.pi / delta_m
    seed = seed_phase(delta_m)
    neighbor = math.pi / (4 * delta_m)

    def objective(phi: float) -> float:
        return _delta_phi(coefficients, delta_m, phi)

    best_phi, best_value = seed, objective(seed)
    candidates = [(phi, objective(phi)) for phi in (seed - neighbor, seed + neighbor)]

    if coefficients.k2 > 0:
        result = golden_section_search(objective, lower, upper, tolerance=tolerance)
        if not result.converged:
            logger.warning(
                f"La busqueda de fase optima para {state} no alcanzo la tolerancia {tolerance}."
            )
        candidates.append((result.argmin, result.minimum))

    for phi, value in candidates:
        if value < best_value * (1.0 - SEED_PREFERENCE_TOLERANCE):
            best_phi, best_value = phi, value

    logger.debug(
        f"Sensibilidad optima de {state} con perdidas ({loss.loss_a}, {loss.loss_b}): "
        f"{best_value} en phi={best_phi}."
    )
    return SensitivityPoint(
        phi=math.fmod(best_phi, period),
        delta_phi=best_value,
        shot_noise_limit=noise.snl,
        heisenberg_limit=noise.hl,
        effective_photons=effective_photons(state, loss),
    )


def _equal_arm_loss(loss_scalar: float) -> float:
    return LossPair.equal(loss_scalar).loss_a


def visibility_complement_expansion(
    state: TwinFockState,
    loss_scalar: float,
    regime: Union[ExpansionRegime, str],
) -> float:
    """
    Desarrollos de 1 - V con perdidas iguales en ambos brazos.

    near_zero: C(m, dm) L^dm
    near_half: 1/2 + (dm^2/(m+m')) (L - 1/2)
    near_one:  1 - C(m, dm) (1 - L)^dm

    :param state: Estado de entrada.
    :param loss_scalar: Perdida L de ambos brazos.
    :param regime: Regimen del desarrollo.
    :return: Prediccion de primer orden del complemento de la visibilidad.
    :raises UsageError: Si el regimen no existe.
    """
    loss_value = _equal_arm_loss(loss_scalar)
    try:
        regime = ExpansionRegime(regime)
    except ValueError as e:
        raise UsageError(f"Regimen de desarrollo desconocido: '{regime}'.") from e

    coefficient = binomial(state.m, state.delta_m)
    if regime is ExpansionRegime.NEAR_ZERO:
        return coefficient * loss_value**state.delta_m
    if regime is ExpansionRegime.NEAR_HALF:
        return 0.5 + state.delta_m**2 / state.total * (loss_value - 0.5)
    return 1.0 - coefficient * (1.0 - loss_value) ** state.delta_m


def sensitivity_smallloss_expansion(
    state: TwinFockState, loss_scalar: float, phi: float
) -> float:
    """
    Desarrollo de primer orden de la sensibilidad para perdidas pequenas.

    1/dm + ((m+m')/dm) csc(dm phi) L si dm es par y con sec(dm phi) si es
    impar; la fase se mide en el convenio cos(dm phi) de la franja.

    :param state: Estado de entrada.
    :param loss_scalar: Perdida L de ambos brazos.
    :param phi: Fase.
    :return: Prediccion de primer orden.
    :raises NumericalInvariantError: Si la funcion trigonometrica diverge en phi.
    """
    loss_value = _equal_arm_loss(loss_scalar)
    phi = validate_phase(phi)
    delta_m = state.delta_m
    if delta_m % 2 == 0:
        base = math.sin(delta_m * phi)
    else:
        base = math.cos(delta_m * phi)
    if abs(base) < DIVERGENCE_THRESHOLD:
        raise NumericalInvariantError(
            f"El desarrollo diverge en phi={phi} para {state}."
        )
    return 1.0 / delta_m + state.total / delta_m / base * loss_value
