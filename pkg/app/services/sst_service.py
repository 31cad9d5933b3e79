"""
Servicio SST - Tiempo de parada fuertemente estacionario óptimo y mecanismo de
redacción asociado
"""
import logging
from typing import Optional, Tuple

import numpy as np

from app.exceptions.custom_exceptions import DomainError, NumericError, ValidationError
from app.models.chain import ProbabilityVector, TransitionMatrix, Trajectory
from app.models.redaction import RedactedTrajectory, SstRedaction, WindowLaw
from app.models.reports import SstApplicability
from app.models.tables import SeparationTable
from app.services.base_service import BaseMechanismService
from app.utils.numeric import compensated_sum
from app.utils.rng import RngStream

logger = logging.getLogger(__name__)


class SstMechanismService(BaseMechanismService):
    """
    Mecanismo SST: borra el prefijo [0, tau) donde tau es el tiempo de parada
    fuertemente estacionario óptimo construido desde la tabla de separación.
    """

    mechanism_id = 'sst'

    def separation_table(self, chain: TransitionMatrix, stationary: ProbabilityVector, horizon: int) -> SeparationTable:
        """
        Calcula a[x0][t] = min_x P^t(x0, x) / pi(x) para t <= N

        Args:
            chain: Matriz de transición
            stationary: Distribución estacionaria (estrictamente positiva)
            horizon: Horizonte N

        Returns:
            SeparationTable: Tabla (n, N+1)

        Raises:
            DomainError: Si algún estado tiene masa estacionaria cero
            NumericError: Si la tabla decrece más allá de la tolerancia
        """
        if horizon < 0:
            raise ValidationError("El horizonte debe ser no negativo")
        pi = stationary.weights
        if np.any(pi <= 0):
            state = chain.state_space.label_of(int(np.argmin(pi)))
            raise DomainError(f"El estado '{state}' tiene masa estacionaria cero; SST no está definido")

        a = np.empty((chain.size, horizon + 1))
        for t in range(horizon + 1):
            a[:, t] = (self.chain_service.matrix_power(chain, t) / pi[None, :]).min(axis=1)

        tolerance = self.config.SEPARATION_TOLERANCE
        increments = SeparationTable(a, pi).increments()[:, 1:]
        if np.any(increments < -tolerance):
            x0, t = (int(i) for i in np.argwhere(increments < -tolerance)[0])
            raise NumericError(
                f"La tabla de separación decrece en t={t + 1} para x0={chain.state_space.label_of(x0)} "
                f"({increments[x0, t]:.3e})"
            )
        if np.any(increments < 0):
            logger.warning("Incrementos negativos de la tabla de separación recortados a 0")
            a = np.maximum.accumulate(a, axis=1)
        if np.any(a > 1.0 + tolerance):
            raise NumericError("La tabla de separación excede 1")
        return SeparationTable(np.minimum(a, 1.0), pi)

    def table_for(self, chain: TransitionMatrix, horizon: int) -> SeparationTable:
        """Tabla de separación con la distribución estacionaria de la cadena"""
        stationary = self.chain_service.stationary_distribution(chain)
        return self.separation_table(chain, stationary, horizon)

    def check_sst_applicability(self, chain: TransitionMatrix, horizon: int,
                                tolerance: Optional[float] = None) -> SstApplicability:
        """
        Veredicto de aplicabilidad

        El chequeo estructural exige matriz doblemente estocástica y pi
        uniforme; el operativo exige que a[.][t] no dependa de x0 para t <= N.
        """
        tolerance = self.config.SST_APPLICABILITY_TOLERANCE if tolerance is None else tolerance
        stationary = self.chain_service.stationary_distribution(chain)
        table = self.separation_table(chain, stationary, horizon)

        doubly = bool(np.all(np.abs(chain.entries.sum(axis=0) - 1.0) <= self.config.ROW_SUM_TOLERANCE))
        uniform = bool(np.all(np.abs(stationary.weights - 1.0 / chain.size) <= tolerance))
        verdict = SstApplicability(doubly, uniform, table.spread(), tolerance)
        logger.info(
            f"Aplicabilidad SST (N={horizon}): estructural={verdict.structural_pass}, "
            f"dispersión máxima={verdict.max_spread:.3e}"
        )
        return verdict

    def hazard_table(self, chain: TransitionMatrix, horizon: int,
                     table: Optional[SeparationTable] = None) -> np.ndarray:
        """
        H[t, x0, x] = (a_t - a_{t-1}) / (P^t(x0, x)/pi(x) - a_{t-1})

        El denominador se escribe como (a_t - a_{t-1}) + (P^t(x0,x)/pi(x) - a_t);
        0/0 vale 0 y H[0] = 0 porque X_0 siempre se borra.
        """
        self._require_two_states(chain)
        if table is None:
            table = self.table_for(chain, horizon)
        if table.horizon < horizon:
            raise ValidationError("El horizonte de la tabla de separación es menor que el solicitado")

        n = chain.size
        pi = table.stationary
        hazards = np.zeros((horizon + 1, n, n))
        tolerance = self.config.HAZARD_TOLERANCE
        for t in range(1, horizon + 1):
            ratio = self.chain_service.matrix_power(chain, t) / pi[None, :]
            increment = (table.a[:, t] - table.a[:, t - 1])[:, None]
            excess = ratio - table.a[:, t][:, None]
            if np.any(excess < -tolerance):
                raise NumericError(f"Riesgo SST fuera de [0, 1] en t={t}")
            denominator = increment + np.maximum(excess, 0.0)
            hazard = np.zeros_like(denominator)
            np.divide(np.broadcast_to(increment, denominator.shape), denominator,
                      out=hazard, where=denominator > 0)
            if np.any(hazard < -tolerance) or np.any(hazard > 1.0 + tolerance):
                raise NumericError(f"Riesgo SST fuera de [0, 1] en t={t}")
            hazards[t] = np.clip(hazard, 0.0, 1.0)
        return hazards

    def sample_sst_redaction(self, chain: TransitionMatrix, trajectory: Trajectory,
                             table: SeparationTable, rng: RngStream) -> SstRedaction:
        """
        Aplica el mecanismo SST a una trayectoria

        Consume una uniforme por paso t = 1..N hasta la parada; sin parada
        dentro del horizonte tau = N+1 y toda la salida queda borrada.
        """
        if table.horizon < trajectory.horizon:
            raise ValidationError("El horizonte de la tabla es menor que el de la trayectoria")
        hazards = self.hazard_table(chain, trajectory.horizon, table)
        tau = self.sample_window(trajectory, hazards, rng)
        return SstRedaction(RedactedTrajectory.from_window(trajectory, tau), tau)

    def sst_stop_law(self, chain: TransitionMatrix, trajectory: Trajectory, table: SeparationTable) -> WindowLaw:
        """Ley exacta de tau dada la trayectoria, con el átomo N+1 como remanente"""
        hazards = self.hazard_table(chain, trajectory.horizon, table)
        return self.window_law(chain, trajectory, hazards)

    def stop_pair_joint(self, chain: TransitionMatrix, horizon: int, initial: int,
                        table: Optional[SeparationTable] = None) -> Tuple[np.ndarray, float]:
        """
        Ley conjunta exacta P(tau = t, X_tau = y | X_0 = x0)

        Returns:
            Tuple[np.ndarray, float]: (matriz (N+1, n) indexada por t e y,
            masa P(tau = N+1 | X_0 = x0))
        """
        self.chain_service.require_enumerable(chain, horizon)
        if table is None:
            table = self.table_for(chain, horizon)
        hazards = self.hazard_table(chain, horizon, table)
        paths, probabilities = self.chain_service.enumerate_paths(chain, initial, horizon)
        laws = self.window_laws(hazards, paths)

        joint = np.zeros((horizon + 1, chain.size))
        for t in range(horizon + 1):
            joint[t] = np.bincount(paths[:, t], weights=probabilities * laws[:, t], minlength=chain.size)
        remainder = compensated_sum(probabilities * laws[:, horizon + 1])
        return joint, remainder

    def sst_distortion(self, chain: TransitionMatrix, initial: int, horizon: int) -> float:
        """
        Distorsión esperada sum_{t<=N} (1 - a_t^{x0}) = sum_{t<=N} P(tau > t)

        Con pi uniforme coincide con sum_{t<=N} (1 - n min_x P^t(x0, x)).
        """
        table = self.table_for(chain, horizon)
        if not 0 <= initial < chain.size:
            raise ValidationError(f"Estado inicial fuera de rango: {initial}")
        return compensated_sum(1.0 - table.a[initial])
