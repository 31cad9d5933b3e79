"""
Repositorio de cadenas de catálogo (fixtures) parametrizadas
"""
import itertools
import logging
import re
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
import yaml

from app.exceptions.custom_exceptions import FixtureNotFoundError
from app.repositories.base_repository import BaseRepository
from app.utils.rng import RngStream

logger = logging.getLogger(__name__)

FIXTURE_PATTERN = re.compile(r'^\s*([a-z_][a-z0-9_]*)\s*(?:\((.*)\))?\s*$', re.DOTALL)

Fixture = Tuple[List[str], np.ndarray]


def two_state(p: float) -> Fixture:
    """[[1-p, p], [p, 1-p]]"""
    _require(0.0 <= p <= 1.0, "two_state: p debe estar en [0, 1]")
    return ['0', '1'], np.array([[1.0 - p, p], [p, 1.0 - p]])


def example2() -> Fixture:
    """Cadena reducible de dos estados con el estado 1 absorbente"""
    return ['0', '1'], np.array([[0.5, 0.5], [0.0, 1.0]])


def circulant(k: int, weights: Sequence[float] = None) -> Fixture:
    """P[i, (i + j) mod k] = w_j"""
    _require(isinstance(k, int) and k >= 2, "circulant: k debe ser un entero >= 2")
    weights = list(weights) if weights is not None else [0.5, 0.5]
    _require(len(weights) <= k, "circulant: hay más pesos que estados")
    weights = np.array(weights + [0.0] * (k - len(weights)), dtype=float)
    _require(np.all(weights >= 0) and abs(weights.sum() - 1.0) <= 1e-12,
             "circulant: los pesos deben ser no negativos y sumar 1")
    matrix = np.array([np.roll(weights, i) for i in range(k)])
    return [str(i) for i in range(k)], matrix


def lazy_cycle(k: int, laziness: float = 0.5) -> Fixture:
    """Paseo perezoso en el ciclo Z_k (circulante con pesos (laziness, 1 - laziness))"""
    _require(0.0 <= laziness <= 1.0, "lazy_cycle: laziness debe estar en [0, 1]")
    return circulant(k, [laziness, 1.0 - laziness])


def hypercube(d: int, laziness: float = 0.5) -> Fixture:
    """Paseo perezoso en {0,1}^d: se queda con prob. laziness o invierte un bit al azar"""
    _require(isinstance(d, int) and d >= 1, "hypercube: d debe ser un entero >= 1")
    _require(0.0 <= laziness <= 1.0, "hypercube: laziness debe estar en [0, 1]")
    size = 2 ** d
    matrix = np.zeros((size, size))
    for state in range(size):
        matrix[state, state] = laziness
        for bit in range(d):
            matrix[state, state ^ (1 << bit)] += (1.0 - laziness) / d
    labels = [''.join(bits) for bits in itertools.product('01', repeat=d)]
    return labels, matrix


def rank_one(mu: Sequence[float] = (0.2, 0.3, 0.5)) -> Fixture:
    """Todas las filas iguales a mu"""
    mu = np.array(mu, dtype=float)
    _require(mu.ndim == 1 and mu.size >= 1, "rank_one: mu debe ser una lista no vacía")
    _require(np.all(mu >= 0) and abs(mu.sum() - 1.0) <= 1e-12, "rank_one: mu debe ser una distribución")
    return [str(i) for i in range(mu.size)], np.tile(mu, (mu.size, 1))


def random_ergodic(n: int, seed: int) -> Fixture:
    """Filas Dirichlet(1, ..., 1) con entradas positivas, determinista en la semilla"""
    _require(isinstance(n, int) and n >= 1, "random_ergodic: n debe ser un entero >= 1")
    _require(isinstance(seed, int) and seed >= 0, "random_ergodic: la semilla debe ser un entero no negativo")
    generator = RngStream(seed).generator
    matrix = generator.dirichlet(np.ones(n), size=n)
    matrix = np.maximum(matrix, 1e-6)
    return [str(i) for i in range(n)], matrix / matrix.sum(axis=1, keepdims=True)


def three_state_negative_control() -> Fixture:
    """
    Cadena doblemente estocástica (pi uniforme) cuya tabla de separación
    depende del estado inicial: a_1 = (0, 0.75, 0.75)
    """
    return ['0', '1', '2'], np.array([
        [0.5, 0.5, 0.0],
        [0.25, 0.25, 0.5],
        [0.25, 0.25, 0.5],
    ])


class FixtureRepository(BaseRepository):
    """Catálogo de cadenas por nombre con argumentos, p. ej. 'two_state(0.25)'"""

    GENERATORS: Dict[str, Callable[..., Fixture]] = {
        'two_state': two_state,
        'example2': example2,
        'circulant': circulant,
        'lazy_cycle': lazy_cycle,
        'hypercube': hypercube,
        'rank_one': rank_one,
        'random_ergodic': random_ergodic,
        'three_state_negative_control': three_state_negative_control,
    }

    def get(self, identifier: str) -> Fixture:
        """
        Construye una cadena del catálogo

        Args:
            identifier: Especificación 'nombre' o 'nombre(arg1, arg2, ...)'

        Returns:
            Tuple[List[str], np.ndarray]: (etiquetas, matriz)

        Raises:
            FixtureNotFoundError: Si el nombre es desconocido o los argumentos no son válidos
        """
        name, args = self.parse(identifier)
        generator = self.GENERATORS[name]
        try:
            labels, matrix = generator(*args)
        except TypeError as e:
            raise FixtureNotFoundError(f"Argumentos inválidos para '{name}': {str(e)}")
        logger.debug(f"Cadena de catálogo '{identifier}' con {len(labels)} estados")
        return labels, matrix

    def parse(self, identifier: str):
        """Separa nombre y argumentos de una especificación"""
        match = FIXTURE_PATTERN.match(identifier or '')
        if not match:
            raise FixtureNotFoundError(f"Especificación de cadena inválida: '{identifier}'")
        name, raw_args = match.group(1), match.group(2)
        if name not in self.GENERATORS:
            raise FixtureNotFoundError(
                f"Cadena desconocida: '{name}' (disponibles: {', '.join(self.list_available())})"
            )
        if not raw_args or not raw_args.strip():
            return name, []
        try:
            args = yaml.safe_load(f"[{raw_args}]")
        except yaml.YAMLError:
            raise FixtureNotFoundError(f"No se pudieron interpretar los argumentos de '{name}': {raw_args}")
        return name, args

    def list_available(self) -> List[str]:
        return sorted(self.GENERATORS)

    def exists(self, identifier: str) -> bool:
        try:
            self.parse(identifier)
            return True
        except FixtureNotFoundError:
            return False


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise FixtureNotFoundError(message)
