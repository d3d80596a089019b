"""
Módulo para representar los estados |m::m'> y el canal interferometrico con perdidas.

Este módulo proporciona:
  - TwinFockState: el par (m, m') que define (|m, m'> + |m', m>)/sqrt(2).
  - LossPair: tasas de perdida por brazo (L_a, L_b) con sus transmisiones y reflectancias.
  - TwoModeDensityMatrix: matriz densidad dispersa indexada por pares de ocupacion.
  - coefficient_d: coeficientes d_1..d_4 de la matriz densidad de salida.
  - lossy_density_matrix: matriz densidad en forma cerrada.
  - oracle_density_matrix: matriz densidad por fuerza bruta (divisores de haz
    ficticios sobre cada rama y traza parcial de los modos de entorno).

Convenio de normalizacion: el factor 1/2 vive en los coeficientes d_i; los
prefactores alpha y beta solo aportan las fases exp(-/+ i dm phi), de modo que
la traza vale 1.
"""

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np
from scipy import sparse

from src.common.config import (
    BINOMIAL_CAP,
    DIAGONAL_TOLERANCE,
    HERMITICITY_TOLERANCE,
    ORACLE_PHOTON_CAP,
    TRACE_TOLERANCE,
)
from src.twinfock.classes.exceptions import (
    InvalidLossError,
    InvalidStateError,
    NumericalInvariantError,
    PhotonRangeError,
)
from src.twinfock.classes.numerics import binomial, safe_pow

Occupation = Tuple[int, int]
MatrixKey = Tuple[Occupation, Occupation]


def occupation_basis(n_max: int) -> List[Occupation]:
    """Pares de ocupacion (k_a, k_b) con k_a + k_b <= n_max, ordenados por n y k_a."""
    return [(k, n - k) for n in range(n_max + 1) for k in range(n + 1)]


def sparse_from_entries(
    entries: Mapping[MatrixKey, complex], basis: Sequence[Occupation]
) -> sparse.csr_matrix:
    """
    Matriz dispersa CSR a partir de entradas indexadas por pares de ocupacion.

    :param entries: Entradas no nulas.
    :param basis: Base que fija el orden de filas y columnas.
    :return: Matriz compleja de dimension len(basis).
    :raises PhotonRangeError: Si alguna ocupacion no pertenece a la base.
    """
    index = {occupation: i for i, occupation in enumerate(basis)}
    try:
        rows = [index[row] for row, _ in entries]
        cols = [index[col] for _, col in entries]
    except KeyError as e:
        raise PhotonRangeError(f"La ocupacion {e.args[0]} no pertenece a la base.") from e
    size = len(basis)
    return sparse.coo_matrix(
        (np.fromiter(entries.values(), dtype=np.complex128, count=len(entries)), (rows, cols)),
        shape=(size, size),
    ).tocsr()


def entries_from_sparse(
    matrix: sparse.spmatrix, basis: Sequence[Occupation]
) -> Dict[MatrixKey, complex]:
    """Entradas no nulas de una matriz dispersa, indexadas por pares de ocupacion."""
    coo = sparse.coo_matrix(matrix)
    coo.sum_duplicates()
    coo.eliminate_zeros()
    return {
        (basis[row], basis[col]): complex(value)
        for row, col, value in zip(coo.row, coo.col, coo.data)
    }


@dataclass(frozen=True)
class TwinFockState:
    """
    Estado gemelo entrelazado |m::m'> = (|m, m'> + |m', m>)/sqrt(2).

    :param m: Numero de fotones del brazo mayor.
    :param m_prime: Numero de fotones del brazo menor.
    """

    m: int
    m_prime: int

    def __post_init__(self) -> None:
        for name, value in (("m", self.m), ("mprime", self.m_prime)):
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidStateError(f"{name} debe ser un entero, se recibio '{value}'.")
            if value < 0:
                raise InvalidStateError(f"{name} no puede ser negativo ({value}).")
        if self.m <= self.m_prime:
            raise InvalidStateError(
                f"m must exceed mprime (m={self.m}, mprime={self.m_prime})."
            )
        if self.m > BINOMIAL_CAP:
            raise InvalidStateError(
                f"m={self.m} supera el tope de {BINOMIAL_CAP} fotones."
            )

    @property
    def delta_m(self) -> int:
        """Diferencia de fotones entre brazos."""
        return self.m - self.m_prime

    @property
    def total(self) -> int:
        """Numero total de fotones sin perdidas."""
        return self.m + self.m_prime

    @property
    def is_noon(self) -> bool:
        """Indica si el estado es un N00N (m' = 0)."""
        return self.m_prime == 0

    @classmethod
    def parse(cls, text: str) -> "TwinFockState":
        """
        Construye un estado a partir de un texto 'm:mprime'.

        :param text: Texto con el formato 'm:mprime' (por ejemplo '8:2').
        :return: Estado correspondiente.
        :raises InvalidStateError: Si el texto no tiene el formato esperado.
        """
        parts = str(text).split(":")
        if len(parts) != 2:
            raise InvalidStateError(
                f"El estado '{text}' no tiene el formato esperado 'm:mprime'."
            )
        try:
            m, m_prime = int(parts[0]), int(parts[1])
        except ValueError as e:
            raise InvalidStateError(
                f"El estado '{text}' contiene valores no enteros."
            ) from e
        return cls(m, m_prime)

    def __str__(self) -> str:
        return f"|{self.m}::{self.m_prime}>"


@dataclass(frozen=True)
class LossPair:
    """
    Tasas de perdida por brazo del interferometro.

    :param loss_a: Perdida en el brazo a, en [0, 1].
    :param loss_b: Perdida en el brazo b, en [0, 1].
    """

    loss_a: float
    loss_b: float

    def __post_init__(self) -> None:
        for name, value in (("loss_a", self.loss_a), ("loss_b", self.loss_b)):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise InvalidLossError(f"{name} debe ser un numero real.")
            if not math.isfinite(value) or not 0.0 <= value <= 1.0:
                raise InvalidLossError(
                    f"{name} debe estar en [0, 1], se recibio '{value}'."
                )

    @classmethod
    def equal(cls, loss: float) -> "LossPair":
        """Perdida identica en ambos brazos."""
        return cls(loss, loss)

    @property
    def transmission_a(self) -> float:
        return 1.0 - self.loss_a

    @property
    def transmission_b(self) -> float:
        return 1.0 - self.loss_b

    @property
    def reflectance_a(self) -> float:
        return self.loss_a

    @property
    def reflectance_b(self) -> float:
        return self.loss_b

    def swapped(self) -> "LossPair":
        """Intercambia las perdidas de los brazos."""
        return LossPair(self.loss_b, self.loss_a)

    def complement(self) -> "LossPair":
        """Perdidas complementarias (1 - L_a, 1 - L_b)."""
        return LossPair(1.0 - self.loss_a, 1.0 - self.loss_b)


def validate_phase(phi: float) -> float:
    """
    Comprueba que la fase sea un real finito.

    :param phi: Fase en radianes.
    :return: La fase como float.
    :raises InvalidLossError: Si la fase no es finita.
    """
    if isinstance(phi, bool) or not isinstance(phi, (int, float)) or not math.isfinite(phi):
        raise InvalidLossError(f"La fase debe ser un real finito, se recibio '{phi}'.")
    return float(phi)


class TwoModeDensityMatrix:
    """
    Matriz densidad dispersa de dos modos.

    Las entradas se indexan por ((k_a, k_b), (k_a', k_b')) y son inmutables
    tras la construccion. Se comprueba hermiticidad, traza unidad y
    diagonal no negativa.

    :param entries: Diccionario de entradas no nulas.
    :type entries: Mapping[MatrixKey, complex]
    :param dim_hint: Numero maximo de fotones totales.
    :type dim_hint: int
    """

    def __init__(self, entries: Mapping[MatrixKey, complex], dim_hint: int) -> None:
        self._entries: Mapping[MatrixKey, complex] = MappingProxyType(
            {key: complex(value) for key, value in entries.items()}
        )
        self.dim_hint = dim_hint
        self._validate()

    @property
    def entries(self) -> Mapping[MatrixKey, complex]:
        return self._entries

    def entry(self, row: Occupation, col: Occupation) -> complex:
        """Devuelve la entrada (row, col); cero si no esta almacenada."""
        return self._entries.get((row, col), 0j)

    def trace(self) -> complex:
        """Traza de la matriz."""
        return complex(
            math.fsum(v.real for (r, c), v in self._entries.items() if r == c),
            math.fsum(v.imag for (r, c), v in self._entries.items() if r == c),
        )

    def hermiticity_error(self) -> float:
        """Maximo de |rho(r, c) - conj(rho(c, r))|."""
        return max(
            (
                abs(value - self.entry(col, row).conjugate())
                for (row, col), value in self._entries.items()
            ),
            default=0.0,
        )

    def basis(self) -> List[Occupation]:
        """Pares de ocupacion presentes, ordenados."""
        return sorted({key[0] for key in self._entries} | {key[1] for key in self._entries})

    def to_dense(self) -> np.ndarray:
        """Representacion densa sobre la base devuelta por ``basis``."""
        basis = self.basis()
        index = {occupation: i for i, occupation in enumerate(basis)}
        dense = np.zeros((len(basis), len(basis)), dtype=np.complex128)
        for (row, col), value in self._entries.items():
            dense[index[row], index[col]] = value
        return dense

    def to_sparse(self, basis: Sequence[Occupation]) -> sparse.csr_matrix:
        """Representacion CSR sobre una base dada (por ejemplo la del operador de paridad)."""
        return sparse_from_entries(self._entries, basis)

    def min_eigenvalue(self) -> float:
        """Autovalor minimo (la matriz es hermitica)."""
        if not self._entries:
            return 0.0
        return float(np.linalg.eigvalsh(self.to_dense()).min())

    def max_abs_difference(self, other: "TwoModeDensityMatrix") -> float:
        """Maxima diferencia entrada a entrada con otra matriz."""
        keys = set(self._entries) | set(other.entries)
        return max(
            (abs(self.entry(*key) - other.entry(*key)) for key in keys),
            default=0.0,
        )

    def apply_phase(self, phi: float) -> "TwoModeDensityMatrix":
        """
        Aplica el desfasador U = exp(i phi b^dagger b) tras el canal: U rho U^dagger.

        :param phi: Fase en radianes.
        :return: Nueva matriz densidad.
        """
        phi = validate_phase(phi)
        return TwoModeDensityMatrix(
            {
                (row, col): value * cmath.exp(1j * phi * (row[1] - col[1]))
                for (row, col), value in self._entries.items()
            },
            self.dim_hint,
        )

    def _validate(self) -> None:
        """Comprueba los invariantes de una matriz densidad."""
        hermiticity = self.hermiticity_error()
        if hermiticity > HERMITICITY_TOLERANCE:
            raise NumericalInvariantError(
                f"La matriz densidad no es hermitica (error {hermiticity:.3e})."
            )
        trace = self.trace()
        if abs(trace - 1.0) > TRACE_TOLERANCE:
            raise NumericalInvariantError(
                f"La traza de la matriz densidad es {trace}, se esperaba 1."
            )
        for (row, col), value in self._entries.items():
            if row == col and value.real < -DIAGONAL_TOLERANCE:
                raise NumericalInvariantError(
                    f"Entrada diagonal negativa en {row}: {value.real:.3e}."
                )


def coefficient_d(
    which: int, state: TwinFockState, loss: LossPair, k: int, k_prime: int
) -> float:
    """
    Coeficientes d_1..d_4 de la matriz densidad de salida, con el factor 1/2 incluido.

    d_1 y d_2 admiten k <= m, k' <= m'; d_3 y d_4 admiten k, k' <= m'. Fuera de
    rango devuelven cero. d_3 y d_4 son magnitudes reales (coeficientes del
    divisor de haz tomados reales).

    :param which: Indice del coeficiente (1, 2, 3 o 4).
    :param state: Estado de entrada.
    :param loss: Perdidas por brazo.
    :param k: Primer indice de suma.
    :param k_prime: Segundo indice de suma.
    :return: Valor del coeficiente.
    :rtype: float
    """
    m, mp, dm = state.m, state.m_prime, state.delta_m
    ta, ra = loss.transmission_a, loss.reflectance_a
    tb, rb = loss.transmission_b, loss.reflectance_b

    if which in (1, 2):
        if not (0 <= k <= m and 0 <= k_prime <= mp):
            return 0.0
        weight = 0.5 * binomial(m, k) * binomial(mp, k_prime)
        if which == 1:
            return (
                weight
                * safe_pow(ta, k)
                * safe_pow(ra, m - k)
                * safe_pow(tb, k_prime)
                * safe_pow(rb, mp - k_prime)
            )
        return (
            weight
            * safe_pow(ta, k_prime)
            * safe_pow(ra, mp - k_prime)
            * safe_pow(tb, k)
            * safe_pow(rb, m - k)
        )

    if which in (3, 4):
        if not (0 <= k <= mp and 0 <= k_prime <= mp):
            return 0.0
        weight = 0.5 * math.sqrt(
            binomial(m, dm + k)
            * binomial(m, dm + k_prime)
            * binomial(mp, k)
            * binomial(mp, k_prime)
        )
        # d_4 es d_3 con los indices intercambiados
        first, second = (k, k_prime) if which == 3 else (k_prime, k)
        return (
            weight
            * safe_pow(ta, 0.5 * (dm + 2 * first))
            * safe_pow(ra, mp - first)
            * safe_pow(tb, 0.5 * (dm + 2 * second))
            * safe_pow(rb, mp - second)
        )

    raise ValueError(f"El indice del coeficiente debe ser 1, 2, 3 o 4, se recibio '{which}'.")


def lossy_density_matrix(
    state: TwinFockState, loss: LossPair, phi: float
) -> TwoModeDensityMatrix:
    """
    Matriz densidad de salida en forma cerrada.

    Bloques diagonales con pesos d_1, d_2 y bloques fuera de la diagonal con
    pesos exp(-i dm phi) d_3 y exp(i dm phi) d_4.

    :param state: Estado de entrada.
    :param loss: Perdidas por brazo.
    :param phi: Fase acumulada en el brazo b.
    :return: Matriz densidad con traza 1.
    :rtype: TwoModeDensityMatrix
    """
    phi = validate_phase(phi)
    m, mp, dm = state.m, state.m_prime, state.delta_m
    entries: Dict[MatrixKey, complex] = defaultdict(complex)

    for k in range(m + 1):
        for kp in range(mp + 1):
            d1 = coefficient_d(1, state, loss, k, kp)
            if d1:
                entries[((k, kp), (k, kp))] += d1
            d2 = coefficient_d(2, state, loss, k, kp)
            if d2:
                entries[((kp, k), (kp, k))] += d2

    forward = cmath.exp(-1j * dm * phi)
    for k in range(mp + 1):
        for kp in range(mp + 1):
            d3 = coefficient_d(3, state, loss, k, kp)
            if d3:
                entries[((dm + k, kp), (k, dm + kp))] += forward * d3
            d4 = coefficient_d(4, state, loss, k, kp)
            if d4:
                entries[((kp, dm + k), (dm + kp, k))] += forward.conjugate() * d4

    return TwoModeDensityMatrix(entries, state.total)


def _beam_splitter_amplitudes(n: int, transmission: float) -> List[Tuple[int, int, float]]:
    """
    Descompone |n> a traves de un divisor de haz ficticio.

    :return: Lista (k transmitidos, n - k al entorno, amplitud real).
    """
    reflectance = 1.0 - transmission
    return [
        (
            k,
            n - k,
            math.sqrt(
                binomial(n, k) * safe_pow(transmission, k) * safe_pow(reflectance, n - k)
            ),
        )
        for k in range(n + 1)
    ]


def oracle_density_matrix(
    state: TwinFockState, loss: LossPair, phi: float
) -> TwoModeDensityMatrix:
    """
    Matriz densidad de salida por fuerza bruta, sin usar los coeficientes d_i.

    Cada rama de la superposicion (con sus fases exp(i m' phi) y exp(i m phi))
    se propaga por los divisores de haz ficticios de ambos brazos, se forma el
    estado puro sobre salida y entorno y se traza el entorno.

    :param state: Estado de entrada.
    :param loss: Perdidas por brazo.
    :param phi: Fase acumulada en el brazo b.
    :return: Matriz densidad de salida.
    :rtype: TwoModeDensityMatrix
    :raises PhotonRangeError: Si m + m' supera el tope del oraculo.
    """
    if state.total > ORACLE_PHOTON_CAP:
        raise PhotonRangeError(
            f"El oraculo admite hasta {ORACLE_PHOTON_CAP} fotones, "
            f"el estado {state} tiene {state.total}."
        )
    phi = validate_phase(phi)

    branches = (
        (state.m, state.m_prime, cmath.exp(1j * state.m_prime * phi) / math.sqrt(2)),
        (state.m_prime, state.m, cmath.exp(1j * state.m * phi) / math.sqrt(2)),
    )

    # Estado puro como matriz (ocupacion del entorno) x (ocupacion de salida)
    basis = occupation_basis(state.total)
    amplitudes: Dict[MatrixKey, complex] = defaultdict(complex)
    for n_a, n_b, branch_amplitude in branches:
        for k_a, env_a, amp_a in _beam_splitter_amplitudes(n_a, loss.transmission_a):
            for k_b, env_b, amp_b in _beam_splitter_amplitudes(n_b, loss.transmission_b):
                amplitude = branch_amplitude * amp_a * amp_b
                if amplitude:
                    amplitudes[((env_a, env_b), (k_a, k_b))] += amplitude
    pure_state = sparse_from_entries(amplitudes, basis)

    # Traza parcial sobre el entorno: rho = psi^T conj(psi)
    rho = pure_state.T @ pure_state.conj()
    return TwoModeDensityMatrix(entries_from_sparse(rho, basis), state.total)
