"""
Script principal de la linea de comandos de TwinFock.

Subcomandos: expect, visibility, sensitivity, optimal, table1, sweep,
recommend y crossover. Los resultados puntuales se emiten en JSON y las
rejillas en CSV, en la salida estandar o en el fichero indicado con --output.

Uso:
    python -m src.twinfock.main_twinfock expect --m 6 --mprime 0 --loss-a 0.05 --loss-b 0.05 --phi 0
"""

import argparse
import math
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.common.functions import load_config_file, to_csv, to_json, write_output
from src.common.logger import logger
from src.twinfock.classes.exceptions import (
    InvalidLossError,
    TwinFockError,
    UsageError,
)
from src.twinfock.classes.metrology import (
    SensitivityPoint,
    optimal_sensitivity,
    sensitivity,
    visibility,
)
from src.twinfock.classes.parity import fringe_coefficients, parity_expectation
from src.twinfock.classes.state_channel import LossPair, TwinFockState
from src.twinfock.classes.strategy import (
    FixedDeltaM,
    MaxTotal,
    Objective,
    SweepGrid,
    SweepQuantity,
    recommend,
    sensitivity_crossover_loss,
    snl_crossover_loss,
    sweep,
    table1,
)
from src.twinfock.config.config import (
    DEFAULT_MAX_TOTAL,
    TABLE1_DELTA_M,
    TABLE1_LOSS,
    TABLE1_MAX_TOTAL,
)

Result = Union[Dict[str, Any], List[Dict[str, Any]], pd.DataFrame]

FORMATS = ("csv", "json")


# ------------------------------------------------------------------
# Validacion de argumentos
# ------------------------------------------------------------------


def _require(args: argparse.Namespace, dest: str) -> Any:
    """Devuelve el valor de un argumento obligatorio."""
    value = getattr(args, dest, None)
    if value is None:
        raise UsageError(f"Falta el argumento obligatorio --{dest.replace('_', '-')}.")
    return value


def _loss_value(value: float, flag: str) -> float:
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise InvalidLossError(f"{flag} debe estar en [0, 1], se recibio '{value}'.")
    return value


def _phase_value(value: float, flag: str) -> float:
    if not math.isfinite(value):
        raise InvalidLossError(f"{flag} debe ser un real finito, se recibio '{value}'.")
    return value


def _state(args: argparse.Namespace) -> TwinFockState:
    return TwinFockState(_require(args, "m"), _require(args, "mprime"))


def _loss_pair(args: argparse.Namespace) -> LossPair:
    return LossPair(
        _loss_value(_require(args, "loss_a"), "--loss-a"),
        _loss_value(_require(args, "loss_b"), "--loss-b"),
    )


def _phase(args: argparse.Namespace) -> float:
    return _phase_value(_require(args, "phi"), "--phi")


def _grid(
    args: argparse.Namespace, prefix: str, validate: Callable[[float, str], float]
) -> Optional[List[float]]:
    """
    Rejilla equiespaciada a partir de --<prefix>-start/-stop/-steps.

    :return: Lista de valores o None si no se indico ninguno de los tres argumentos.
    :raises UsageError: Si la rejilla esta incompleta o tiene menos de un paso.
    """
    dests = [f"{prefix}_start", f"{prefix}_stop", f"{prefix}_steps"]
    values = [getattr(args, dest, None) for dest in dests]
    if all(value is None for value in values):
        return None
    flag = f"--{prefix.replace('_', '-')}"
    for dest in dests:
        _require(args, dest)
    start, stop, steps = values
    if steps < 1:
        raise UsageError(f"{flag}-steps debe ser al menos 1, se recibio {steps}.")
    validate(start, f"{flag}-start")
    validate(stop, f"{flag}-stop")
    return [float(value) for value in np.linspace(start, stop, steps)]


def _grid_states(args: argparse.Namespace) -> List[TwinFockState]:
    if args.state:
        if args.m is not None or args.mprime is not None:
            raise UsageError("Use --state o bien --m/--mprime, no ambos.")
        return [TwinFockState.parse(text) for text in args.state]
    return [_state(args)]


# ------------------------------------------------------------------
# Subcomandos
# ------------------------------------------------------------------


def _point_payload(
    state: TwinFockState, loss: LossPair, point: SensitivityPoint
) -> Dict[str, Any]:
    return {
        "m": state.m,
        "mprime": state.m_prime,
        "loss_a": loss.loss_a,
        "loss_b": loss.loss_b,
        "phi": point.phi,
        "delta_phi": point.delta_phi,
        "shot_noise_limit": point.shot_noise_limit,
        "heisenberg_limit": point.heisenberg_limit,
        "effective_photons": point.effective_photons,
    }


def cmd_expect(args: argparse.Namespace) -> Result:
    """Valor esperado de la paridad en un punto."""
    state, loss, phi = _state(args), _loss_pair(args), _phase(args)
    coefficients = fringe_coefficients(state, loss)
    return {
        "m": state.m,
        "mprime": state.m_prime,
        "loss_a": loss.loss_a,
        "loss_b": loss.loss_b,
        "phi": phi,
        "k1": coefficients.k1,
        "k2": coefficients.k2,
        "expectation": parity_expectation(state, loss, phi),
    }


def cmd_visibility(args: argparse.Namespace) -> Result:
    """Visibilidad en un punto o sobre una rejilla de perdidas."""
    loss_a_values = _grid(args, "loss", _loss_value)
    loss_b_values = _grid(args, "loss_b", _loss_value)
    if loss_a_values is None:
        if loss_b_values is not None:
            raise UsageError("--loss-b-* requiere tambien --loss-start/--loss-stop/--loss-steps.")
        state, loss = _state(args), _loss_pair(args)
        report = visibility(state, loss)
        return {
            "m": state.m,
            "mprime": state.m_prime,
            "loss_a": loss.loss_a,
            "loss_b": loss.loss_b,
            "signal": report.signal,
            "visibility": report.visibility,
        }

    if args.loss_a is not None or args.loss_b is not None:
        raise UsageError("Use --loss-a/--loss-b o bien una rejilla de perdidas, no ambos.")
    grid = SweepGrid(
        states=[_state(args)],
        loss_a_values=loss_a_values,
        loss_b_values=loss_b_values,
    )
    return sweep(grid, SweepQuantity.VISIBILITY)


def cmd_sensitivity(args: argparse.Namespace) -> Result:
    """Sensibilidad de fase en un punto."""
    state, loss = _state(args), _loss_pair(args)
    return _point_payload(state, loss, sensitivity(state, loss, _phase(args)))


def cmd_optimal(args: argparse.Namespace) -> Result:
    """Sensibilidad en la fase optima."""
    state, loss = _state(args), _loss_pair(args)
    return _point_payload(state, loss, optimal_sensitivity(state, loss))


def cmd_table1(args: argparse.Namespace) -> Result:
    """Tabla de sensibilidades optimas con dm fijo."""
    loss = _loss_value(args.loss, "--loss")
    if args.delta_m < 1:
        raise UsageError(f"--delta-m debe ser positivo, se recibio {args.delta_m}.")
    return table1(
        loss=loss,
        delta_m=args.delta_m,
        max_total=args.max_total,
        mprime_step=args.mprime_step,
    )


def cmd_sweep(args: argparse.Namespace) -> Result:
    """Barrido de una magnitud sobre estados, perdidas y fases."""
    quantity = SweepQuantity.parse(_require(args, "quantity"))
    loss_a_values = _grid(args, "loss", _loss_value)
    if loss_a_values is None:
        raise UsageError("Falta la rejilla de perdidas --loss-start/--loss-stop/--loss-steps.")

    phi_values = _grid(args, "phi", _phase_value)
    if args.phi is not None:
        if phi_values is not None:
            raise UsageError("Use --phi o bien --phi-start/--phi-stop/--phi-steps, no ambos.")
        phi_values = [_phase(args)]

    grid = SweepGrid(
        states=_grid_states(args),
        loss_a_values=loss_a_values,
        loss_b_values=_grid(args, "loss_b", _loss_value),
        phi_values=phi_values,
    )
    return sweep(grid, quantity)


def cmd_recommend(args: argparse.Namespace) -> Result:
    """Clasificacion de estados candidatos."""
    loss = _loss_pair(args)
    objective = Objective.parse(_require(args, "objective"))
    constraint: Union[FixedDeltaM, MaxTotal]
    if args.delta_m is not None:
        max_total = args.max_total if args.max_total is not None else DEFAULT_MAX_TOTAL
        step = args.mprime_step if args.mprime_step is not None else 1
        constraint = FixedDeltaM(args.delta_m, max_total, step)
    else:
        constraint = MaxTotal(_require(args, "max_total"))
    return [entry.to_dict() for entry in recommend(loss, constraint, objective)]


def cmd_crossover(args: argparse.Namespace) -> Result:
    """Perdida de cruce con el limite shot-noise o entre dos estados."""
    state = _state(args)
    if args.versus is None:
        return {
            "m": state.m,
            "mprime": state.m_prime,
            "snl_crossover_loss": snl_crossover_loss(state),
        }
    other = TwinFockState.parse(args.versus)
    return {
        "m": state.m,
        "mprime": state.m_prime,
        "versus_m": other.m,
        "versus_mprime": other.m_prime,
        "equal_sensitivity_loss": sensitivity_crossover_loss(state, other),
    }


# ------------------------------------------------------------------
# Parser
# ------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, help="Fichero YAML con valores de los argumentos.")
    parser.add_argument("--output", type=str, help="Fichero de salida (por defecto, salida estandar).")
    parser.add_argument("--format", choices=FORMATS, help="Formato de salida.")


def _add_state(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=int, help="Fotones del brazo mayor.")
    parser.add_argument("--mprime", type=int, help="Fotones del brazo menor.")


def _add_loss_pair(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--loss-a", type=float, help="Perdida del brazo a, en [0, 1].")
    parser.add_argument("--loss-b", type=float, help="Perdida del brazo b, en [0, 1].")


def _add_grid(parser: argparse.ArgumentParser, prefix: str, label: str) -> None:
    parser.add_argument(f"--{prefix}-start", type=float, help=f"Inicio de la rejilla de {label}.")
    parser.add_argument(f"--{prefix}-stop", type=float, help=f"Fin de la rejilla de {label}.")
    parser.add_argument(f"--{prefix}-steps", type=int, help=f"Numero de puntos de la rejilla de {label}.")


COMMANDS = {
    "expect": (cmd_expect, "Valor esperado de la paridad."),
    "visibility": (cmd_visibility, "Visibilidad relativa."),
    "sensitivity": (cmd_sensitivity, "Sensibilidad de fase."),
    "optimal": (cmd_optimal, "Sensibilidad en la fase optima."),
    "table1": (cmd_table1, "Sensibilidades optimas con dm fijo."),
    "sweep": (cmd_sweep, "Barrido sobre una rejilla."),
    "recommend": (cmd_recommend, "Recomendacion de estados."),
    "crossover": (cmd_crossover, "Perdidas de cruce."),
}


def build_parser() -> argparse.ArgumentParser:
    """
    Construye el parser con todos los subcomandos.

    :return: Parser de argumentos.
    :rtype: argparse.ArgumentParser
    """
    parser = argparse.ArgumentParser(
        prog="twinfock",
        description="Metrologia de estados |m::m'> en interferometros con perdidas.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, (_, help_text) in COMMANDS.items():
        subparser = subparsers.add_parser(
            name, help=help_text, description=help_text, allow_abbrev=False
        )
        _add_common(subparser)

        if name in ("expect", "sensitivity", "optimal", "visibility", "crossover"):
            _add_state(subparser)
        if name in ("expect", "sensitivity", "optimal", "visibility", "recommend"):
            _add_loss_pair(subparser)
        if name in ("expect", "sensitivity"):
            subparser.add_argument("--phi", type=float, help="Fase en radianes.")

        if name == "visibility":
            _add_grid(subparser, "loss", "perdidas")
            _add_grid(subparser, "loss-b", "perdidas del brazo b")
        elif name == "table1":
            subparser.add_argument("--loss", type=float, default=TABLE1_LOSS, help="Perdida de ambos brazos.")
            subparser.add_argument("--delta-m", type=int, default=TABLE1_DELTA_M, help="Diferencia de fotones.")
            subparser.add_argument("--max-total", type=int, default=TABLE1_MAX_TOTAL, help="Cota de m + m'.")
            subparser.add_argument("--mprime-step", type=int, help="Paso de m' (por defecto 2 si dm es par, 1 si es impar).")
        elif name == "sweep":
            subparser.add_argument("--quantity", choices=[q.value for q in SweepQuantity], help="Magnitud.")
            _add_state(subparser)
            subparser.add_argument("--state", nargs="+", help="Estados 'm:mprime'.")
            _add_grid(subparser, "loss", "perdidas")
            _add_grid(subparser, "loss-b", "perdidas del brazo b")
            _add_grid(subparser, "phi", "fases")
            subparser.add_argument("--phi", type=float, help="Fase fija en radianes.")
        elif name == "recommend":
            subparser.add_argument("--objective", choices=[o.value for o in Objective], help="Objetivo.")
            subparser.add_argument("--delta-m", type=int, help="Diferencia de fotones fija.")
            subparser.add_argument("--max-total", type=int, help="Cota de m + m'.")
            subparser.add_argument("--mprime-step", type=int, help="Paso de m' con --delta-m (por defecto 1).")
        elif name == "crossover":
            subparser.add_argument("--versus", type=str, help="Segundo estado 'm:mprime'.")

    return parser


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise UsageError(f"Subcomando desconocido '{command}'.")


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """
    Analiza los argumentos aplicando, si se indica, el fichero --config.

    Los valores del fichero actuan como valores por defecto, de modo que los
    argumentos explicitos prevalecen.

    :param argv: Argumentos de la linea de comandos.
    :return: Espacio de nombres con los argumentos.
    :raises UsageError: Si el fichero no es valido o contiene claves desconocidas.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is None:
        return args

    try:
        settings = load_config_file(args.config)
    except ValueError as e:
        raise UsageError(str(e)) from e

    allowed = set(vars(args)) - {"command", "config"}
    unknown = sorted(set(settings) - allowed)
    if unknown:
        raise UsageError(
            f"Claves desconocidas en {args.config} para '{args.command}': {', '.join(unknown)}."
        )

    # Los valores en texto pasan por la conversion de tipos de argparse
    defaults = {
        key: [str(item) for item in value] if isinstance(value, list)
        else (None if value is None else str(value))
        for key, value in settings.items()
    }
    _subparser(parser, args.command).set_defaults(**defaults)
    return parser.parse_args(argv)


def emit(result: Result, output_format: Optional[str] = None, output_file: Optional[str] = None) -> None:
    """
    Serializa el resultado en CSV o JSON y lo escribe.

    :param result: Diccionario, lista de diccionarios o DataFrame.
    :param output_format: 'csv' o 'json'; por defecto CSV para las rejillas (DataFrame) y JSON
        para el resto.
    :param output_file: Fichero de salida; None para la salida estandar.
    """
    if output_format is None:
        output_format = "csv" if isinstance(result, pd.DataFrame) else "json"
    if output_format == "json":
        payload = result.to_dict(orient="records") if isinstance(result, pd.DataFrame) else result
        text = to_json(payload)
    else:
        if isinstance(result, pd.DataFrame):
            df = result
        elif isinstance(result, dict):
            df = pd.DataFrame([result])
        else:
            df = pd.DataFrame(result)
        text = to_csv(df)
    write_output(text, output_file)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Punto de entrada de la linea de comandos.

    :param argv: Argumentos; por defecto sys.argv[1:].
    :return: Codigo de salida (0 si todo fue correcto, 2 ante entradas no validas).
    :rtype: int
    """
    try:
        args = parse_arguments(argv)
        handler, _ = COMMANDS[args.command]
        logger.info(f"Ejecutando el subcomando '{args.command}'.")
        result = handler(args)
        emit(result, args.format, args.output)
    except TwinFockError as e:
        logger.error(f"Error en la linea de comandos: {e}")
        return 2

    logger.info(f"Subcomando '{args.command}' finalizado.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
