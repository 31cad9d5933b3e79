"""
Servicio base - Estructura común de los mecanismos de redacción por prefijo
"""
import logging

import numpy as np

from app.config.settings import Config
from app.exceptions.custom_exceptions import (
    DomainError, ImpossiblePathError, NumericError, ValidationError
)
from app.models.chain import TransitionMatrix, Trajectory
from app.models.redaction import RedactedTrajectory, WindowLaw
from app.services.chain_service import ChainService
from app.utils.rng import RngStream

logger = logging.getLogger(__name__)


class BaseMechanismService:
    """
    Mecanismo que borra un prefijo aleatorio [0, T) de la trayectoria.

    Cada mecanismo se describe por su tabla de riesgo H[t, x0, x]: la
    probabilidad de liberar en el tiempo t dado que las posiciones < t están
    borradas, X_0 = x0 y X_t = x. Las leyes exactas de ventana, el muestreo
    secuencial y el muestreo vectorizado se derivan de esa tabla.
    """

    mechanism_id = None

    def __init__(self, chain_service=None, config=None):
        self.config = config or Config()
        self.chain_service = chain_service or ChainService(self.config)

    def hazard_table(self, chain: TransitionMatrix, horizon: int) -> np.ndarray:
        """Tabla (N+1, n, n) de probabilidades de liberación"""
        raise NotImplementedError("Método hazard_table debe ser implementado en subclases")

    def describe(self) -> dict:
        """Parámetros del mecanismo para reportes"""
        return {'mechanism': self.mechanism_id}

    def window_laws(self, hazards: np.ndarray, paths: np.ndarray) -> np.ndarray:
        """
        Leyes exactas de ventana para un lote de trayectorias

        P(T = t | trayectoria) = prod_{s<t} (1 - H[s, x0, x_s]) * H[t, x0, x_t]

        Args:
            hazards: Tabla de riesgo con horizonte >= el de las trayectorias
            paths: Arreglo (K, M+1) de trayectorias con probabilidad positiva

        Returns:
            np.ndarray: Arreglo (K, M+2) indexado por T en {0, ..., M+1}
        """
        count, length = paths.shape
        if length > hazards.shape[0]:
            raise ValidationError(
                f"El horizonte de la trayectoria ({length - 1}) excede el del mecanismo ({hazards.shape[0] - 1})"
            )
        survival = np.ones(count)
        laws = np.zeros((count, length + 1))
        initial = paths[:, 0]
        for t in range(length):
            hazard = hazards[t, initial, paths[:, t]]
            alive = survival > 0
            if np.any(alive & np.isnan(hazard)):
                raise ImpossiblePathError(
                    f"Probabilidad de liberación indefinida en t={t} sobre una trayectoria alcanzable"
                )
            hazard = np.where(alive, hazard, 0.0)
            laws[:, t] = survival * hazard
            survival = survival * (1.0 - hazard)
        laws[:, length] = survival
        return laws

    def window_law(self, chain: TransitionMatrix, trajectory: Trajectory, hazards: np.ndarray) -> WindowLaw:
        """Ley exacta de T condicionada a una trayectoria"""
        self._check_trajectory(chain, trajectory)
        return WindowLaw(self.window_laws(hazards, np.array([trajectory.states]))[0])

    def sample_window(self, trajectory: Trajectory, hazards: np.ndarray, rng: RngStream) -> int:
        """
        Muestreo secuencial de T

        En t = 0 la decisión es determinista; para t >= 1 se consume una
        uniforme por paso hasta la primera liberación.
        """
        horizon = trajectory.horizon
        if horizon + 1 > hazards.shape[0]:
            raise ValidationError("El horizonte de la trayectoria excede el del mecanismo")
        x0 = trajectory.initial
        initial_hazard = hazards[0, x0, x0]
        if initial_hazard not in (0.0, 1.0):
            raise NumericError("El riesgo en t=0 debe ser 0 o 1")
        if initial_hazard == 1.0:
            return 0

        for t in range(1, horizon + 1):
            hazard = hazards[t, x0, trajectory.states[t]]
            if np.isnan(hazard):
                raise ImpossiblePathError(f"Probabilidad de liberación indefinida en t={t}")
            if rng.uniform() < hazard:
                return t
        return horizon + 1

    def redact(self, chain: TransitionMatrix, trajectory: Trajectory, rng: RngStream,
               hazards: np.ndarray = None) -> RedactedTrajectory:
        """Aplica el mecanismo a una trayectoria"""
        if hazards is None:
            hazards = self.hazard_table(chain, trajectory.horizon)
        window = self.sample_window(trajectory, hazards, rng)
        return RedactedTrajectory.from_window(trajectory, window)

    def simulate_windows(self, chain: TransitionMatrix, horizon: int, trials: int, start, rng: RngStream,
                         hazards: np.ndarray = None):
        """
        Simulación vectorizada de trayectorias y ventanas

        Returns:
            Tuple[np.ndarray, np.ndarray]: (trayectorias (trials, N+1), ventanas (trials,))
        """
        if hazards is None:
            hazards = self.hazard_table(chain, horizon)
        paths = self.chain_service.sample_trajectories(chain, start, horizon, trials, rng)
        initial = paths[:, 0]
        windows = np.full(trials, horizon + 1, dtype=np.int64)
        alive = np.ones(trials, dtype=bool)

        released = alive & (hazards[0, initial, initial] >= 1.0)
        windows[released] = 0
        alive &= ~released
        for t in range(1, horizon + 1):
            u = rng.uniforms(trials)
            hazard = hazards[t, initial, paths[:, t]]
            if np.any(alive & np.isnan(hazard)):
                raise ImpossiblePathError(f"Probabilidad de liberación indefinida en t={t}")
            released = alive & (u < np.nan_to_num(hazard))
            windows[released] = t
            alive &= ~released
        return paths, windows

    def _check_trajectory(self, chain: TransitionMatrix, trajectory: Trajectory) -> None:
        try:
            trajectory.validate(chain.size)
        except ValueError as e:
            raise ValidationError(str(e))
        if self.chain_service.path_probabilities(chain, np.array([trajectory.states]))[0] <= 0:
            raise DomainError("La trayectoria tiene probabilidad cero bajo la cadena")

    def _require_two_states(self, chain: TransitionMatrix) -> None:
        if chain.size < 2:
            raise DomainError("Los mecanismos de redacción requieren al menos dos estados")
