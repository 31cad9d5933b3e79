"""
Servicio de cadenas de Markov finitas: validación, primitivas de álgebra lineal
y muestreo de trayectorias
"""
import logging
import math
from collections import deque
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from app.config.settings import Config
from app.exceptions.custom_exceptions import (
    ValidationError, DomainError, NumericError, EnumerationGuardError
)
from app.models.chain import (
    StateSpace, TransitionMatrix, ProbabilityVector, StationaryDistribution,
    ChainDiagnostics, Trajectory
)
from app.utils.rng import RngStream

logger = logging.getLogger(__name__)

StartLaw = Union[int, ProbabilityVector, np.ndarray]


class ChainService:
    """
    Servicio con las operaciones básicas sobre matrices de transición
    """

    def __init__(self, config=None):
        self.config = config or Config()

    def build_transition_matrix(self, entries, labels: Optional[Sequence[str]] = None) -> TransitionMatrix:
        """
        Construye una matriz de transición validada

        Las filas cuya suma se desvía de 1 dentro de ROW_SUM_TOLERANCE se
        renormalizan una sola vez; desviaciones mayores son errores.

        Args:
            entries: Filas de la matriz
            labels: Etiquetas de estado (opcional)

        Returns:
            TransitionMatrix: Matriz validada

        Raises:
            ValidationError: Si la matriz no es estocástica por filas
        """
        matrix = self._check_structure(entries, labels)
        row_sums = matrix.sum(axis=1)
        deviation = np.abs(row_sums - 1.0)
        if np.any(deviation > self.config.ROW_SUM_REPAIR_TOLERANCE):
            repaired = np.flatnonzero(deviation > self.config.ROW_SUM_REPAIR_TOLERANCE).tolist()
            logger.warning(f"Filas renormalizadas al cargar: {repaired}")
            matrix = matrix / row_sums[:, None]

        try:
            state_space = StateSpace(labels) if labels is not None else StateSpace.of_size(matrix.shape[0])
            return TransitionMatrix(matrix, state_space)
        except ValueError as e:
            raise ValidationError(str(e))

    def validate_chain(self, chain: TransitionMatrix) -> ChainDiagnostics:
        """
        Diagnostica irreducibilidad, período y estacionariedad

        Args:
            chain: Matriz de transición

        Returns:
            ChainDiagnostics: Banderas estructurales de la cadena

        Raises:
            ValidationError: Si la matriz no es estocástica por filas
        """
        matrix = self._check_structure(chain.entries, chain.labels)
        n = matrix.shape[0]

        n_components, component = connected_components(
            csr_matrix(matrix > 0), directed=True, connection='strong'
        )
        irreducible = n_components == 1
        period = self._period_of_state_zero(matrix, component)
        doubly_stochastic = bool(np.all(np.abs(matrix.sum(axis=0) - 1.0) <= self.config.ROW_SUM_TOLERANCE))

        stationary = self.stationary_distribution(chain)
        diagnostics = ChainDiagnostics(
            row_stochastic=True,
            irreducible=irreducible,
            period=period,
            doubly_stochastic=doubly_stochastic,
            stationary_support_full=stationary.is_strictly_positive(),
            stationary_unique=stationary.unique,
            reversible=self._is_reversible(matrix, stationary.weights)
        )
        for message in diagnostics.warnings:
            logger.warning(f"Cadena de {n} estados: {message}")
        return diagnostics

    def matrix_power(self, chain: TransitionMatrix, t: int) -> np.ndarray:
        """P^t, memorizada en la matriz"""
        if t < 0:
            raise ValidationError("El exponente t debe ser no negativo")
        return chain.power(t)

    def stationary_distribution(self, chain: TransitionMatrix) -> StationaryDistribution:
        """
        Resuelve pi P = pi, sum(pi) = 1 por solución lineal directa

        Con una sola clase cerrada la solución del sistema es única; con varias
        retorna la de norma mínima. Si la cadena no es irreducible la
        distribución se marca como no única.

        Raises:
            NumericError: Si el sistema es singular más allá de la tolerancia
        """
        matrix = chain.entries
        n = chain.size
        n_components, closed = self._communication_classes(matrix)
        unique = n_components == 1
        system = matrix.T - np.eye(n)

        weights = None
        if closed == 1:
            square = system.copy()
            square[-1, :] = 1.0
            rhs = np.zeros(n)
            rhs[-1] = 1.0
            try:
                weights = np.linalg.solve(square, rhs)
            except np.linalg.LinAlgError:
                logger.warning("Sistema estacionario singular; se recurre a mínimos cuadrados")
        if weights is None:
            stacked = np.vstack([system, np.ones((1, n))])
            rhs = np.zeros(n + 1)
            rhs[-1] = 1.0
            weights = np.linalg.lstsq(stacked, rhs, rcond=None)[0]

        residual = np.abs(weights @ matrix - weights).max()
        if residual > self.config.NUMERIC_TOLERANCE or abs(weights.sum() - 1.0) > self.config.NUMERIC_TOLERANCE:
            raise NumericError(f"No se pudo resolver la distribución estacionaria (residuo {residual:.3e})")
        if np.any(weights < -self.config.NUMERIC_TOLERANCE):
            raise NumericError("La distribución estacionaria calculada tiene entradas negativas")

        weights = np.clip(weights, 0.0, None)
        weights = weights / weights.sum()
        if not unique:
            logger.warning(f"Cadena no irreducible ({closed} clases cerradas): la distribución estacionaria no es única")
        return StationaryDistribution(weights, chain.state_space, unique=unique)

    def time_reversal(self, chain: TransitionMatrix, stationary: ProbabilityVector) -> np.ndarray:
        """
        P_hat(x, y) = pi(y) P(y, x) / pi(x)

        Raises:
            DomainError: Si algún estado tiene masa estacionaria cero
        """
        pi = stationary.weights
        self._require_positive(pi, chain.state_space)
        reversal = chain.entries.T * pi[None, :] / pi[:, None]
        deviation = np.abs(reversal.sum(axis=1) - 1.0).max()
        if deviation > self.config.NUMERIC_TOLERANCE:
            raise NumericError(f"La inversión temporal no es estocástica (desviación {deviation:.3e})")
        return reversal

    def second_eigenvalue_of_reversiblization(self, chain: TransitionMatrix) -> float:
        """
        Segundo mayor autovalor de M = P P_hat

        M es reversible respecto de pi, por lo que D^{1/2} M D^{-1/2} es simétrica
        y se diagonaliza con un solver denso simétrico.

        Raises:
            DomainError: Si pi no es estrictamente positiva
            NumericError: Si el solver de autovalores no converge
        """
        stationary = self.stationary_distribution(chain)
        pi = stationary.weights
        self._require_positive(pi, chain.state_space)
        if chain.size == 1:
            return 0.0

        reversiblization = chain.entries @ self.time_reversal(chain, stationary)
        root = np.sqrt(pi)
        symmetric = root[:, None] * reversiblization / root[None, :]
        symmetric = (symmetric + symmetric.T) / 2.0
        try:
            eigenvalues = np.linalg.eigvalsh(symmetric)
        except np.linalg.LinAlgError as e:
            raise NumericError(f"El cálculo de autovalores no convergió: {str(e)}")

        second = float(np.sort(eigenvalues)[::-1][1])
        if second < -self.config.NUMERIC_TOLERANCE or second > 1.0 + self.config.NUMERIC_TOLERANCE:
            raise NumericError(f"Autovalor fuera de [0, 1]: {second}")
        return min(max(second, 0.0), 1.0)

    def total_variation(self, mu, nu) -> float:
        """Distancia de variación total 1/2 sum |mu - nu|"""
        mu = _weights(mu)
        nu = _weights(nu)
        if mu.shape != nu.shape:
            raise ValidationError(f"Longitudes distintas: {mu.shape[0]} y {nu.shape[0]}")
        return float(0.5 * np.abs(mu - nu).sum())

    def sample_trajectory(self, chain: TransitionMatrix, start: StartLaw, horizon: int, rng: RngStream) -> Trajectory:
        """
        Muestrea X_0, ..., X_N consumiendo una uniforme por transición

        Si start es una distribución, X_0 consume una uniforme adicional.
        """
        if horizon < 0:
            raise ValidationError("El horizonte debe ser no negativo")
        cumulative = self._cumulative_rows(chain.entries)
        if isinstance(start, (int, np.integer)):
            state = int(start)
        else:
            state = self._inverse_cdf(np.cumsum(_weights(start)), rng.uniform())

        states = [state]
        for _ in range(horizon):
            state = self._inverse_cdf(cumulative[state], rng.uniform())
            states.append(state)
        return Trajectory(states)

    def sample_trajectories(self, chain: TransitionMatrix, start: StartLaw, horizon: int,
                            trials: int, rng: RngStream) -> np.ndarray:
        """
        Muestreo vectorizado de trayectorias independientes

        Returns:
            np.ndarray: Arreglo (trials, N+1) de índices de estado
        """
        n = chain.size
        cumulative = self._cumulative_rows(chain.entries)
        paths = np.empty((trials, horizon + 1), dtype=np.int64)
        if isinstance(start, (int, np.integer)):
            paths[:, 0] = int(start)
        else:
            initial_cdf = np.cumsum(_weights(start))
            paths[:, 0] = np.minimum(np.searchsorted(initial_cdf, rng.uniforms(trials), side='right'), n - 1)

        for t in range(1, horizon + 1):
            u = rng.uniforms(trials)
            rows = cumulative[paths[:, t - 1]]
            paths[:, t] = np.minimum((u[:, None] >= rows).sum(axis=1), n - 1)
        return paths

    def path_probabilities(self, chain: TransitionMatrix, paths: np.ndarray) -> np.ndarray:
        """Probabilidad de cada trayectoria dado su estado inicial"""
        probabilities = np.ones(paths.shape[0])
        for t in range(1, paths.shape[1]):
            probabilities *= chain.entries[paths[:, t - 1], paths[:, t]]
        return probabilities

    def enumerate_paths(self, chain: TransitionMatrix, initial: int, horizon: int):
        """
        Todas las trayectorias de probabilidad positiva que parten de x0

        Se expanden paso a paso descartando prefijos de probabilidad cero.

        Returns:
            Tuple[np.ndarray, np.ndarray]: (trayectorias (K, N+1), probabilidades (K,))
        """
        paths = np.full((1, 1), int(initial), dtype=np.int64)
        probabilities = np.ones(1)
        for _ in range(horizon):
            last = paths[:, -1]
            step = chain.entries[last]
            keep_path, next_state = np.nonzero(step > 0)
            paths = np.column_stack([paths[keep_path], next_state])
            probabilities = probabilities[keep_path] * step[keep_path, next_state]
        return paths, probabilities

    def require_enumerable(self, chain: TransitionMatrix, horizon: int) -> int:
        """
        Verifica que n^(N+1) no supere ENUMERATION_GUARD

        Raises:
            EnumerationGuardError: Con el conteo calculado
        """
        count = chain.size ** (horizon + 1)
        if count > self.config.ENUMERATION_GUARD:
            raise EnumerationGuardError(count, self.config.ENUMERATION_GUARD)
        return count

    def _check_structure(self, entries, labels=None) -> np.ndarray:
        """Valida dimensiones, signos y sumas de fila"""
        try:
            matrix = np.array(entries, dtype=float)
        except (TypeError, ValueError):
            raise ValidationError("La matriz debe ser una lista de filas numéricas de igual longitud")
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise ValidationError(f"Dimensión inconsistente: la matriz debe ser cuadrada, forma {matrix.shape}")
        if labels is not None and len(labels) != matrix.shape[0]:
            raise ValidationError(
                f"Dimensión inconsistente: {len(labels)} estados y {matrix.shape[0]} filas"
            )
        if not np.all(np.isfinite(matrix)):
            row = int(np.argwhere(~np.isfinite(matrix))[0][0])
            raise ValidationError(f"La fila {row} contiene valores no finitos")
        if np.any(matrix < 0):
            row, column = (int(i) for i in np.argwhere(matrix < 0)[0])
            raise ValidationError(f"La fila {row} tiene una entrada negativa en la columna {column}")

        deviation = np.abs(matrix.sum(axis=1) - 1.0)
        if np.any(deviation > self.config.ROW_SUM_TOLERANCE):
            row = int(np.argmax(deviation > self.config.ROW_SUM_TOLERANCE))
            raise ValidationError(
                f"La fila {row} suma {matrix[row].sum():.12g}; la desviación supera {self.config.ROW_SUM_TOLERANCE:g}"
            )
        return matrix

    def _period_of_state_zero(self, matrix: np.ndarray, component: np.ndarray) -> int:
        """Período de la componente fuertemente conexa del estado 0 (mcd de ciclos)"""
        members = component == component[0]
        level = {0: 0}
        queue = deque([0])
        period = 0
        while queue:
            u = queue.popleft()
            for v in np.flatnonzero((matrix[u] > 0) & members):
                v = int(v)
                if v not in level:
                    level[v] = level[u] + 1
                    queue.append(v)
                else:
                    period = math.gcd(period, level[u] + 1 - level[v])
        if period == 0:
            logger.warning("La componente del estado 0 no contiene ciclos; se reporta período 1")
            return 1
        return abs(period)

    def _is_reversible(self, matrix: np.ndarray, pi: np.ndarray) -> bool:
        """Balance detallado pi(x) P(x, y) = pi(y) P(y, x)"""
        flux = pi[:, None] * matrix
        return bool(np.all(np.abs(flux - flux.T) <= self.config.NUMERIC_TOLERANCE))

    def _communication_classes(self, matrix: np.ndarray) -> Tuple[int, int]:
        """Número de clases de comunicación y de clases cerradas"""
        n_components, component = connected_components(
            csr_matrix(matrix > 0), directed=True, connection='strong'
        )
        closed = 0
        for c in range(n_components):
            members = component == c
            if not np.any(matrix[np.ix_(members, ~members)] > 0):
                closed += 1
        return n_components, closed

    def _require_positive(self, pi: np.ndarray, state_space: StateSpace) -> None:
        if np.any(pi <= 0):
            state = state_space.label_of(int(np.argmin(pi)))
            raise DomainError(f"El estado '{state}' tiene masa estacionaria cero")

    @staticmethod
    def _cumulative_rows(matrix: np.ndarray) -> np.ndarray:
        return np.cumsum(matrix, axis=1)

    @staticmethod
    def _inverse_cdf(cdf: np.ndarray, u: float) -> int:
        index = int(np.searchsorted(cdf, u, side='right'))
        return min(index, cdf.shape[0] - 1)


def _weights(vector) -> np.ndarray:
    if isinstance(vector, ProbabilityVector):
        return vector.weights
    return np.asarray(vector, dtype=float)
