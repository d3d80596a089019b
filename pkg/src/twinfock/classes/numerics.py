"""
Nucleos combinatorios exactos y suma hipergeometrica terminante.

Este módulo proporciona:
  - Coeficientes binomiales exactos (aritmetica entera convertida a float) con tope configurable.
  - Simbolo de Pochhammer (x)_n.
  - La funcion hipergeometrica 2F1(-a, -b; c; z) evaluada como suma finita.
  - La suma binomial equivalente sum_k C(m,k) C(m',k) z^k, libre de singularidades.
  - Potencias con el convenio 0^0 = 1.
  - Busqueda de seccion aurea para minimizar funciones unimodales en una dimension.

Todas las sumas finitas se acumulan con suma compensada (math.fsum).
"""

import math
from typing import Callable, Iterable, NamedTuple

from src.common.config import BINOMIAL_CAP
from src.twinfock.classes.exceptions import PhotonRangeError

# Razones de la seccion aurea
INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2


class GoldenSectionResult(NamedTuple):
    """Resultado de la busqueda de seccion aurea."""

    argmin: float
    minimum: float
    iterations: int
    converged: bool


def _check_count(value: int, name: str) -> None:
    """Comprueba que un contador sea un entero no negativo."""
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise PhotonRangeError(
            f"'{name}' debe ser un entero no negativo, se recibio '{value}'."
        )


def compensated_sum(values: Iterable[float]) -> float:
    """
    Suma compensada de una secuencia de reales.

    :param values: Valores a sumar.
    :type values: Iterable[float]
    :return: Suma con correccion de error de redondeo.
    :rtype: float
    """
    return math.fsum(values)


def binomial(n: int, k: int, cap: int = BINOMIAL_CAP) -> float:
    """
    Coeficiente binomial C(n, k) exacto.

    El valor se calcula en aritmetica entera y se convierte a float; con el
    tope por defecto (64) la conversion no introduce error de redondeo en el
    rango de uso.

    :param n: Numero de elementos.
    :type n: int
    :param k: Numero de elementos escogidos.
    :type k: int
    :param cap: Valor maximo admitido para n.
    :type cap: int
    :return: C(n, k), o 0 si k > n.
    :rtype: float
    :raises PhotonRangeError: Si n supera el tope o algun argumento es negativo.
    """
    _check_count(n, "n")
    _check_count(k, "k")
    if n > cap:
        raise PhotonRangeError(
            f"El coeficiente binomial C({n}, {k}) supera el tope de {cap} fotones."
        )
    if k > n:
        return 0.0
    return float(math.comb(n, k))


def pochhammer(x: float, n: int) -> float:
    """
    Simbolo de Pochhammer (factorial ascendente).

    (x)_0 = 1 y (x)_n = x (x + 1) ... (x + n - 1).

    :param x: Base.
    :type x: float
    :param n: Numero de factores.
    :type n: int
    :return: Valor de (x)_n.
    :rtype: float
    """
    _check_count(n, "n")
    result = 1.0
    for i in range(n):
        result *= x + i
    return result


def hyp2f1_terminating(a_neg: int, b_neg: int, c: float, z: float) -> float:
    """
    Funcion hipergeometrica 2F1(-a_neg, -b_neg; c; z) como suma finita.

    La serie se trunca en n = min(a_neg, b_neg) porque el simbolo de
    Pochhammer de un entero negativo se anula a partir de ese termino.

    :param a_neg: Valor absoluto del primer parametro (entero no negativo).
    :type a_neg: int
    :param b_neg: Valor absoluto del segundo parametro (entero no negativo).
    :type b_neg: int
    :param c: Tercer parametro, positivo.
    :type c: float
    :param z: Argumento finito.
    :type z: float
    :return: Valor exacto de la suma finita.
    :rtype: float
    :raises PhotonRangeError: Si c no es positivo o z no es finito.
    """
    _check_count(a_neg, "a_neg")
    _check_count(b_neg, "b_neg")
    if not c > 0:
        raise PhotonRangeError(f"El parametro c debe ser positivo, se recibio '{c}'.")
    if not math.isfinite(z):
        raise PhotonRangeError(f"El argumento z debe ser finito, se recibio '{z}'.")

    terms = [
        pochhammer(-a_neg, n)
        * pochhammer(-b_neg, n)
        / pochhammer(c, n)
        * z**n
        / math.factorial(n)
        for n in range(min(a_neg, b_neg) + 1)
    ]
    return compensated_sum(terms)


def binomial_product_sum(m: int, m_prime: int, z: float) -> float:
    """
    Suma explicita sum_k C(m, k) C(m', k) z^k.

    Es la forma binomial de 2F1(-m, -m'; 1; z).

    :param m: Primer contador.
    :type m: int
    :param m_prime: Segundo contador.
    :type m_prime: int
    :param z: Argumento.
    :type z: float
    :return: Valor de la suma.
    :rtype: float
    """
    return compensated_sum(
        binomial(m, k) * binomial(m_prime, k) * z**k
        for k in range(min(m, m_prime) + 1)
    )


def safe_pow(base: float, exponent: float) -> float:
    """
    Potencia con el convenio 0^0 = 1.

    :param base: Base en [0, 1].
    :type base: float
    :param exponent: Exponente no negativo.
    :type exponent: float
    :return: base ** exponent.
    :rtype: float
    """
    if exponent == 0:
        return 1.0
    return base**exponent


def golden_section_search(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    tolerance: float = 1e-10,
    max_iterations: int = 200,
) -> GoldenSectionResult:
    """
    Busqueda de seccion aurea del minimo de una funcion unimodal en [lower, upper].

    Solo se evalua la funcion en puntos interiores del intervalo, nunca en
    los extremos.

    :param func: Funcion a minimizar.
    :type func: Callable[[float], float]
    :param lower: Extremo inferior.
    :type lower: float
    :param upper: Extremo superior.
    :type upper: float
    :param tolerance: Anchura final del intervalo.
    :type tolerance: float
    :param max_iterations: Numero maximo de reducciones del intervalo.
    :type max_iterations: int
    :return: Punto del minimo, valor, iteraciones y si se alcanzo la tolerancia.
    :rtype: GoldenSectionResult
    """
    lower, upper = min(lower, upper), max(lower, upper)
    h = upper - lower

    c = lower + INV_PHI_SQUARE * h
    d = lower + INV_PHI * h
    yc = func(c)
    yd = func(d)

    iterations = 0
    while h > tolerance and iterations < max_iterations:
        iterations += 1
        if yc < yd:
            d = c
            yd = yc
            h = INV_PHI * h
            c = lower + INV_PHI_SQUARE * h
            yc = func(c)
        else:
            lower = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = lower + INV_PHI * h
            yd = func(d)

    if yc < yd:
        return GoldenSectionResult(c, yc, iterations, h <= tolerance)
    return GoldenSectionResult(d, yd, iterations, h <= tolerance)
