"""
Operador de paridad transformado y su valor esperado.

El operador Q = sum_n i^n sum_k (-1)^k |k, n-k><n-k, k| se construye como
matriz dispersa. Su valor esperado sobre las matrices densidad del canal se
reduce a K1 + K2 cos(dm (phi - pi/2)); el desplazamiento dm pi/2 procede de los
factores i^n del operador y se mantiene explicito.
"""

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, List, Mapping, Tuple

from scipy import sparse

from src.common.config import BINOMIAL_CAP, FRINGE_TOLERANCE, IMAGINARY_TOLERANCE
from src.twinfock.classes.exceptions import (
    NumericalInvariantError,
    PhotonRangeError,
)
from src.twinfock.classes.numerics import (
    binomial,
    compensated_sum,
    hyp2f1_terminating,
    safe_pow,
)
from src.twinfock.classes.state_channel import (
    LossPair,
    MatrixKey,
    Occupation,
    TwinFockState,
    TwoModeDensityMatrix,
    entries_from_sparse,
    occupation_basis,
    sparse_from_entries,
    validate_phase,
)

# Potencias exactas de la unidad imaginaria
_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


class ParityOperator:
    """
    Operador de paridad en el interior del interferometro, en base de numero.

    :param n_max: Numero total de fotones sin perdidas (corte).
    :type n_max: int
    """

    def __init__(self, n_max: int) -> None:
        if isinstance(n_max, bool) or not isinstance(n_max, int) or n_max < 0:
            raise PhotonRangeError(f"El corte debe ser un entero no negativo, se recibio '{n_max}'.")
        if n_max > BINOMIAL_CAP:
            raise PhotonRangeError(f"El corte {n_max} supera el tope de {BINOMIAL_CAP} fotones.")
        self.n_max = n_max
        entries = {
            ((k, n - k), (n - k, k)): _I_POWERS[n % 4] * (-1) ** k
            for n in range(n_max + 1)
            for k in range(n + 1)
        }
        self._entries: Mapping[MatrixKey, complex] = MappingProxyType(entries)

    @property
    def entries(self) -> Mapping[MatrixKey, complex]:
        return self._entries

    def entry(self, row: Occupation, col: Occupation) -> complex:
        return self._entries.get((row, col), 0j)

    def basis(self) -> List[Occupation]:
        """Pares de ocupacion con n <= n_max."""
        return occupation_basis(self.n_max)

    def to_sparse(self) -> sparse.csr_matrix:
        """Matriz CSR sobre la base de :meth:`basis`."""
        return sparse_from_entries(self._entries, self.basis())

    def square(self) -> Dict[MatrixKey, complex]:
        """Producto disperso Q Q."""
        q = self.to_sparse()
        return entries_from_sparse(q @ q, self.basis())

    def identity_error(self) -> float:
        """Maximo de |Q^2 - I| entrada a entrada sobre el espacio de corte."""
        q = self.to_sparse()
        identity = sparse.identity(q.shape[0], dtype=complex, format="csr")
        difference = abs(q @ q - identity)
        return float(difference.max()) if difference.nnz else 0.0


def parity_operator(n_max: int) -> ParityOperator:
    """
    Construye el operador de paridad con corte n_max.

    :param n_max: Corte de fotones.
    :return: Operador disperso.
    :rtype: ParityOperator
    """
    return ParityOperator(n_max)


@dataclass(frozen=True)
class FringeCoefficients:
    """
    Coeficientes de la franja de paridad: <Q> = k1 + k2 cos(dm (phi - pi/2)).

    :param k1: Desplazamiento de la franja.
    :param k2: Amplitud de la franja.
    """

    k1: float
    k2: float

    def __post_init__(self) -> None:
        if self.k1 < -FRINGE_TOLERANCE or self.k2 < -FRINGE_TOLERANCE:
            raise NumericalInvariantError(
                f"Coeficientes de franja negativos: k1={self.k1}, k2={self.k2}."
            )
        if self.k1 + self.k2 > 1.0 + FRINGE_TOLERANCE:
            raise NumericalInvariantError(
                f"k1 + k2 = {self.k1 + self.k2} supera la unidad."
            )

    @property
    def signal(self) -> float:
        """Senal S = k2 / (k1 + k2); nula si no hay franja (k2 = 0)."""
        if self.k2 <= 0:
            return 0.0
        total = self.k1 + self.k2
        if total <= 0:
            raise NumericalInvariantError("k1 + k2 se anula; la senal no esta definida.")
        return self.k2 / total


def fringe_phase_terms(delta_m: int, phi: float) -> Tuple[float, float]:
    """
    Coseno y seno de dm (phi - pi/2).

    El desplazamiento dm pi/2 se reduce con las identidades de cuarto de
    vuelta, de forma que solo se evalua cos y sin de dm phi.

    :param delta_m: Diferencia de fotones.
    :param phi: Fase.
    :return: (cos, sin) del argumento de la franja.
    """
    x = delta_m * phi
    cos_x, sin_x = math.cos(x), math.sin(x)
    quarter = delta_m % 4
    if quarter == 0:
        return cos_x, sin_x
    if quarter == 1:
        return sin_x, -cos_x
    if quarter == 2:
        return -cos_x, -sin_x
    return -sin_x, cos_x


def fringe_coefficients(state: TwinFockState, loss: LossPair) -> FringeCoefficients:
    """
    Coeficientes K1 y K2 en forma de suma binomial, sin la singularidad de z en perdida nula.

    K1 = 1/2 sum_k C(m,k) C(m',k) (T_a T_b)^k [R_a^(m-k) R_b^(m'-k) + R_a^(m'-k) R_b^(m-k)]
    K2 = sum_k C(m,dm+k) C(m',k) (T_a T_b)^(k+dm/2) (R_a R_b)^(m'-k)

    :param state: Estado de entrada.
    :param loss: Perdidas por brazo.
    :return: Coeficientes de la franja.
    :rtype: FringeCoefficients
    """
    m, mp, dm = state.m, state.m_prime, state.delta_m
    ta, tb = loss.transmission_a, loss.transmission_b
    ra, rb = loss.reflectance_a, loss.reflectance_b
    tt, rr = ta * tb, ra * rb

    k1 = 0.5 * compensated_sum(
        binomial(m, k)
        * binomial(mp, k)
        * safe_pow(tt, k)
        * compensated_sum(
            (
                safe_pow(ra, m - k) * safe_pow(rb, mp - k),
                safe_pow(ra, mp - k) * safe_pow(rb, m - k),
            )
        )
        for k in range(mp + 1)
    )
    k2 = compensated_sum(
        binomial(m, dm + k)
        * binomial(mp, k)
        * safe_pow(tt, k + 0.5 * dm)
        * safe_pow(rr, mp - k)
        for k in range(mp + 1)
    )
    return FringeCoefficients(k1, k2)


def fringe_coefficients_hypergeometric(
    state: TwinFockState, loss: LossPair
) -> FringeCoefficients:
    """
    Coeficientes K1 y K2 mediante 2F1 con z = T_a T_b / (R_a R_b).

    Camino de verificacion, valido solo con reflectancias positivas. K1 lleva
    el factor 1/2 que lo hace coherente con las sumas diagonales de d_1 y d_2.

    :param state: Estado de entrada.
    :param loss: Perdidas por brazo.
    :return: Coeficientes de la franja.
    :raises PhotonRangeError: Si alguna reflectancia es nula.
    """
    m, mp, dm = state.m, state.m_prime, state.delta_m
    ta, tb = loss.transmission_a, loss.transmission_b
    ra, rb = loss.reflectance_a, loss.reflectance_b
    if ra <= 0 or rb <= 0:
        raise PhotonRangeError(
            "La forma hipergeometrica requiere perdidas positivas en ambos brazos."
        )
    z = ta * tb / (ra * rb)

    k1 = (
        0.5
        * (ra**mp * rb**m + ra**m * rb**mp)
        * hyp2f1_terminating(m, mp, 1.0, z)
    )
    k2 = (
        (ra * rb) ** mp
        * (ta * tb) ** (0.5 * dm)
        * binomial(m, dm)
        * hyp2f1_terminating(mp, mp, 1.0 + dm, z)
    )
    return FringeCoefficients(k1, k2)


def parity_expectation(state: TwinFockState, loss: LossPair, phi: float) -> float:
    """
    Valor esperado <Q> = K1 + K2 cos(dm (phi - pi/2)).

    :param state: Estado de entrada.
    :param loss: Perdidas por brazo.
    :param phi: Fase.
    :return: Valor en [-1, 1].
    :rtype: float
    """
    phi = validate_phase(phi)
    coefficients = fringe_coefficients(state, loss)
    cos_term, _ = fringe_phase_terms(state.delta_m, phi)
    return coefficients.k1 + coefficients.k2 * cos_term


def parity_expectation_trace(rho: TwoModeDensityMatrix, op: ParityOperator) -> float:
    """
    Valor esperado Tr(Q rho) como traza del producto disperso Q rho.

    :param rho: Matriz densidad.
    :param op: Operador de paridad.
    :return: Parte real de la traza.
    :rtype: float
    :raises PhotonRangeError: Si el corte del operador es menor que el numero de fotones de rho.
    :raises NumericalInvariantError: Si la traza tiene parte imaginaria apreciable.
    """
    if op.n_max < rho.dim_hint:
        raise PhotonRangeError(
            f"El corte del operador ({op.n_max}) es menor que el numero de fotones ({rho.dim_hint})."
        )
    value = complex((op.to_sparse() @ rho.to_sparse(op.basis())).diagonal().sum())
    if abs(value.imag) > IMAGINARY_TOLERANCE:
        raise NumericalInvariantError(
            f"Tr(Q rho) tiene parte imaginaria {value.imag:.3e}."
        )
    return value.real
