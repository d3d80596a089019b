"""
Barridos de parametros y recomendacion de estados |m::m'>.

Este módulo proporciona:
  - SweepGrid y sweep: evaluacion de una magnitud sobre una rejilla de estados,
    perdidas y fases, con orden de filas determinista.
  - FixedDeltaM / MaxTotal: conjuntos de candidatos para la recomendacion.
  - recommend: clasificacion de los candidatos por visibilidad o sensibilidad optima.
  - snl_crossover_loss / sensitivity_crossover_loss: perdidas de cruce por biseccion.
  - table1: sensibilidades optimas con dm fijo junto al limite shot-noise.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from src.common.logger import logger
from src.twinfock.classes.exceptions import (
    CriterionError,
    NumericalInvariantError,
    UsageError,
)
from src.twinfock.classes.metrology import (
    beats_snl_criterion,
    is_divergent,
    limits_or_divergent,
    optimal_sensitivity,
    sensitivity,
    visibility,
)
from src.twinfock.classes.parity import parity_expectation
from src.twinfock.classes.state_channel import LossPair, TwinFockState, validate_phase
from src.twinfock.config.config import (
    CROSSOVER_MAX_LOSS,
    CROSSOVER_START_LOSS,
    CROSSOVER_TOLERANCE,
    DEFAULT_MAX_TOTAL,
    PHASE_SEARCH_TOLERANCE,
    TABLE1_DELTA_M,
    TABLE1_LOSS,
    TABLE1_MAX_TOTAL,
)

SWEEP_COLUMNS = ["m", "mprime", "loss_a", "loss_b", "phi", "value"]
TABLE1_COLUMNS = ["m", "mprime", "delta_phi", "snl"]


class SweepQuantity(str, Enum):
    """Magnitudes disponibles en un barrido."""

    VISIBILITY = "visibility"
    EXPECTATION = "expectation"
    SENSITIVITY = "sensitivity"
    OPTIMAL_SENSITIVITY = "optimal_sensitivity"

    @classmethod
    def parse(cls, name: Union["SweepQuantity", str]) -> "SweepQuantity":
        try:
            return cls(name)
        except ValueError as e:
            valid = ", ".join(item.value for item in cls)
            raise UsageError(
                f"Magnitud de barrido desconocida '{name}'. Opciones: {valid}."
            ) from e

    @property
    def needs_phase(self) -> bool:
        return self in (SweepQuantity.EXPECTATION, SweepQuantity.SENSITIVITY)


class Objective(str, Enum):
    """Criterios de clasificacion de la recomendacion."""

    VISIBILITY = "visibility"
    OPTIMAL_SENSITIVITY = "optimal_sensitivity"

    @classmethod
    def parse(cls, name: Union["Objective", str]) -> "Objective":
        try:
            return cls(name)
        except ValueError as e:
            valid = ", ".join(item.value for item in cls)
            raise UsageError(f"Objetivo desconocido '{name}'. Opciones: {valid}.") from e


@dataclass(frozen=True)
class SweepGrid:
    """
    Rejilla de un barrido.

    Sin ``loss_b_values`` la rejilla es de brazos iguales (L_b = L_a). Sin
    ``phi_values`` solo admite magnitudes que no dependen de la fase.

    :param states: Estados a evaluar.
    :param loss_a_values: Perdidas del brazo a.
    :param loss_b_values: Perdidas del brazo b, opcional.
    :param phi_values: Fases, opcional.
    """

    states: Sequence[TwinFockState]
    loss_a_values: Sequence[float]
    loss_b_values: Optional[Sequence[float]] = None
    phi_values: Optional[Sequence[float]] = None

    def __post_init__(self) -> None:
        if not self.states:
            raise UsageError("La rejilla no contiene estados.")
        if not len(self.loss_a_values):
            raise UsageError("La rejilla de perdidas esta vacia.")
        if self.loss_b_values is not None and not len(self.loss_b_values):
            raise UsageError("La rejilla de perdidas del brazo b esta vacia.")
        if self.phi_values is not None and not len(self.phi_values):
            raise UsageError("La rejilla de fases esta vacia.")
        for loss_a, loss_b in self.loss_pairs():
            LossPair(loss_a, loss_b)
        for phi in self.phi_values or []:
            validate_phase(phi)

    def loss_pairs(self) -> List[Tuple[float, float]]:
        """Pares (L_a, L_b) en orden de filas: L_a externo, L_b interno."""
        if self.loss_b_values is None:
            return [(float(loss), float(loss)) for loss in self.loss_a_values]
        return [
            (float(loss_a), float(loss_b))
            for loss_a in self.loss_a_values
            for loss_b in self.loss_b_values
        ]

    @property
    def size(self) -> int:
        phases = len(self.phi_values) if self.phi_values is not None else 1
        return len(self.states) * len(self.loss_pairs()) * phases


def sweep(grid: SweepGrid, quantity: Union[SweepQuantity, str]) -> pd.DataFrame:
    """
    Evalua una magnitud sobre todos los puntos de la rejilla.

    El orden de filas es estados, L_a, L_b y fase. La columna phi queda vacia
    para la visibilidad y contiene la fase optima para optimal_sensitivity.

    :param grid: Rejilla del barrido.
    :type grid: SweepGrid
    :param quantity: Magnitud a evaluar.
    :return: DataFrame con columnas m, mprime, loss_a, loss_b, phi, value.
    :rtype: pd.DataFrame
    :raises UsageError: Si la magnitud no existe o necesita fases y la rejilla no las tiene.
    """
    quantity = SweepQuantity.parse(quantity)
    if quantity.needs_phase and grid.phi_values is None:
        raise UsageError(f"La magnitud '{quantity.value}' necesita una rejilla de fases.")

    logger.info(f"Barrido de '{quantity.value}' sobre {grid.size} puntos.")
    rows: List[Dict[str, Any]] = []
    for state in grid.states:
        for loss_a, loss_b in grid.loss_pairs():
            loss = LossPair(loss_a, loss_b)
            base = {"m": state.m, "mprime": state.m_prime, "loss_a": loss_a, "loss_b": loss_b}

            if quantity is SweepQuantity.VISIBILITY:
                rows.append({**base, "phi": math.nan, "value": visibility(state, loss).visibility})
            elif quantity is SweepQuantity.OPTIMAL_SENSITIVITY:
                point = optimal_sensitivity(state, loss)
                rows.append({**base, "phi": point.phi, "value": point.delta_phi})
            else:
                for phi in grid.phi_values or []:
                    if quantity is SweepQuantity.EXPECTATION:
                        value = parity_expectation(state, loss, phi)
                    else:
                        value = sensitivity(state, loss, phi).delta_phi
                    rows.append({**base, "phi": float(phi), "value": value})

    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


@dataclass(frozen=True)
class FixedDeltaM:
    """Candidatos con dm fijo y m + m' <= max_total, con m' en pasos de mprime_step."""

    delta_m: int
    max_total: int = DEFAULT_MAX_TOTAL
    mprime_step: int = 1

    def candidates(self) -> List[TwinFockState]:
        if self.delta_m < 1:
            raise UsageError(f"dm debe ser positivo, se recibio {self.delta_m}.")
        if self.mprime_step < 1:
            raise UsageError(f"El paso de m' debe ser positivo, se recibio {self.mprime_step}.")
        return [
            TwinFockState(self.delta_m + m_prime, m_prime)
            for m_prime in range(0, (self.max_total - self.delta_m) // 2 + 1, self.mprime_step)
        ]


def default_mprime_step(delta_m: int) -> int:
    """Paso de m' de la tabla: de dos en dos si dm es par, de uno en uno si es impar."""
    return 2 if delta_m % 2 == 0 else 1


@dataclass(frozen=True)
class MaxTotal:
    """Candidatos m > m' >= 0 con m + m' <= n."""

    n: int = DEFAULT_MAX_TOTAL

    def candidates(self) -> List[TwinFockState]:
        return [
            TwinFockState(m, m_prime)
            for m in range(1, self.n + 1)
            for m_prime in range(0, min(m - 1, self.n - m) + 1)
        ]


Constraint = Union[FixedDeltaM, MaxTotal]


@dataclass(frozen=True)
class RecommendationEntry:
    """
    Estado candidato con su valor objetivo y su posicion.

    :param state: Estado candidato.
    :param objective_value: Visibilidad o sensibilidad optima.
    :param objective: Criterio de clasificacion.
    :param rank: Posicion, desde 1.
    :param beats_snl: Si la sensibilidad optima queda por debajo del limite shot-noise.
    """

    state: TwinFockState
    objective_value: float
    objective: Objective
    rank: int
    beats_snl: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "m": self.state.m,
            "mprime": self.state.m_prime,
            "objective": self.objective.value,
            "objective_value": self.objective_value,
            "beats_snl": self.beats_snl,
        }


def recommend(
    loss: LossPair,
    constraint: Constraint,
    objective: Union[Objective, str],
    tolerance: float = PHASE_SEARCH_TOLERANCE,
) -> List[RecommendationEntry]:
    """
    Clasifica los candidatos de una restriccion segun el objetivo.

    La visibilidad se ordena de mayor a menor y la sensibilidad de menor a
    mayor; los empates se resuelven por menor m + m' y despues menor m.

    :param loss: Perdidas por brazo.
    :param constraint: Conjunto de candidatos.
    :param objective: Criterio de clasificacion.
    :param tolerance: Tolerancia de la busqueda de fase optima.
    :return: Lista completa clasificada; el primer elemento es la recomendacion.
    :rtype: List[RecommendationEntry]
    :raises UsageError: Si el conjunto de candidatos esta vacio.
    """
    objective = Objective.parse(objective)
    candidates = constraint.candidates()
    if not candidates:
        raise UsageError(f"La restriccion {constraint} no produce candidatos.")

    scored = []
    for state in candidates:
        point = optimal_sensitivity(state, loss, tolerance=tolerance)
        if objective is Objective.VISIBILITY:
            value = visibility(state, loss).visibility
            sort_value = -value
        else:
            value = point.delta_phi
            sort_value = value
        scored.append(((sort_value, state.total, state.m), state, value, point))

    scored.sort(key=lambda item: item[0])
    entries = [
        RecommendationEntry(
            state=state,
            objective_value=value,
            objective=objective,
            rank=rank,
            beats_snl=point.beats_shot_noise,
        )
        for rank, (_, state, value, point) in enumerate(scored, start=1)
    ]
    logger.info(
        f"Recomendacion ({objective.value}) con perdidas ({loss.loss_a}, {loss.loss_b}): "
        f"{entries[0].state} entre {len(entries)} candidatos."
    )
    return entries


def _bracket_sign_change(
    func: Callable[[float], float], start: float, label: str
) -> Tuple[float, float]:
    """
    Duplica las perdidas desde ``start`` hasta que ``func`` cambia de signo.

    :return: Intervalo (lo, hi) con signo distinto en los extremos.
    :raises NumericalInvariantError: Si no hay cambio de signo antes de la perdida total.
    """
    lo = start
    sign = math.copysign(1.0, func(lo))
    hi = min(2 * lo, CROSSOVER_MAX_LOSS)
    while math.copysign(1.0, func(hi)) == sign:
        if hi >= CROSSOVER_MAX_LOSS:
            raise NumericalInvariantError(
                f"No se encontro cambio de signo para {label} antes de la perdida total."
            )
        lo, hi = hi, min(2 * hi, CROSSOVER_MAX_LOSS)
    logger.debug(f"Intervalo de cruce para {label}: [{lo}, {hi}].")
    return lo, hi


def _bisect(func: Callable[[float], float], lo: float, hi: float, tolerance: float) -> float:
    """Biseccion sobre un intervalo con cambio de signo."""
    f_lo = func(lo)
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def snl_crossover_loss(
    state: TwinFockState, tolerance: float = CROSSOVER_TOLERANCE
) -> float:
    """
    Perdida L* (brazos iguales) en la que la sensibilidad optima alcanza el limite shot-noise.

    :param state: Estado de entrada.
    :param tolerance: Anchura final del intervalo de biseccion.
    :return: Perdida de cruce.
    :rtype: float
    :raises CriterionError: Si dm^2 <= m + m'.
    :raises NumericalInvariantError: Si el intervalo no encierra un unico cambio de signo.
    """
    if not beats_snl_criterion(state):
        raise CriterionError(
            f"{state} no cumple dm^2 > m + m' ({state.delta_m**2} <= {state.total}); "
            "nunca supera el limite shot-noise."
        )

    def gap(loss_value: float) -> float:
        loss = LossPair.equal(loss_value)
        return (
            optimal_sensitivity(state, loss).delta_phi
            - 1.0 / math.sqrt(state.total * (1.0 - loss_value))
        )

    lo, hi = _bracket_sign_change(gap, CROSSOVER_START_LOSS, str(state))
    if not gap(lo) < 0 < gap(hi):
        raise NumericalInvariantError(
            f"La diferencia con el limite shot-noise de {state} no es creciente en [{lo}, {hi}]."
        )
    crossover = _bisect(gap, lo, hi, tolerance)
    logger.info(f"Cruce con el limite shot-noise de {state}: L* = {crossover:.6f}.")
    return crossover


def sensitivity_crossover_loss(
    first: TwinFockState,
    second: TwinFockState,
    tolerance: float = CROSSOVER_TOLERANCE,
) -> float:
    """
    Perdida (brazos iguales) en la que dos estados tienen la misma sensibilidad optima.

    :param first: Primer estado.
    :param second: Segundo estado.
    :param tolerance: Anchura final del intervalo de biseccion.
    :return: Perdida de cruce.
    :rtype: float
    :raises UsageError: Si ambos estados son el mismo.
    :raises NumericalInvariantError: Si las curvas no se cruzan.
    """
    if first == second:
        raise UsageError(f"Los estados a comparar deben ser distintos ({first}).")

    def gap(loss_value: float) -> float:
        loss = LossPair.equal(loss_value)
        first_value = optimal_sensitivity(first, loss).delta_phi
        second_value = optimal_sensitivity(second, loss).delta_phi
        if is_divergent(first_value) or is_divergent(second_value):
            raise NumericalInvariantError(
                f"Sensibilidad divergente al comparar {first} y {second} con L={loss_value}."
            )
        return first_value - second_value

    label = f"{first} frente a {second}"
    lo, hi = _bracket_sign_change(gap, CROSSOVER_START_LOSS, label)
    crossover = _bisect(gap, lo, hi, tolerance)
    logger.info(f"Cruce de sensibilidades de {label}: L = {crossover:.6f}.")
    return crossover


def table1(
    loss: float = TABLE1_LOSS,
    delta_m: int = TABLE1_DELTA_M,
    max_total: int = TABLE1_MAX_TOTAL,
    mprime_step: Optional[int] = None,
) -> pd.DataFrame:
    """
    Sensibilidades optimas de los estados con dm fijo y su limite shot-noise.

    :param loss: Perdida de ambos brazos.
    :param delta_m: Diferencia de fotones.
    :param max_total: Cota de m + m'.
    :param mprime_step: Paso de m'; por defecto ``default_mprime_step(delta_m)``.
    :return: DataFrame con columnas m, mprime, delta_phi, snl.
    :rtype: pd.DataFrame
    """
    loss_pair = LossPair.equal(loss)
    if mprime_step is None:
        mprime_step = default_mprime_step(delta_m)
    candidates = FixedDeltaM(delta_m, max_total, mprime_step).candidates()
    if not candidates:
        raise UsageError(f"No hay estados con dm={delta_m} y m + m' <= {max_total}.")
    rows = []
    for state in candidates:
        point = optimal_sensitivity(state, loss_pair)
        rows.append(
            {
                "m": state.m,
                "mprime": state.m_prime,
                "delta_phi": point.delta_phi,
                "snl": limits_or_divergent(state, loss_pair).snl,
            }
        )
    return pd.DataFrame(rows, columns=TABLE1_COLUMNS)
