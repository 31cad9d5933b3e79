"""
Servicio SMR - Redacción secuencial de Markov, tabla alfa, núcleos
condicionales e interpretación por ventana
"""
import logging
import math

import numpy as np

from app.exceptions.custom_exceptions import (
    ImpossiblePathError, NumericError, UndefinedConditioningError, ValidationError
)
from app.models.chain import TransitionMatrix, Trajectory
from app.models.redaction import RedactedTrajectory, WindowLaw
from app.models.reports import MonteCarloEstimate
from app.models.tables import AlphaTable, ConditionalKernelSequence
from app.services.base_service import BaseMechanismService
from app.utils.numeric import compensated_sum, safe_ratio
from app.utils.rng import RngStream

logger = logging.getLogger(__name__)


class SmrMechanismService(BaseMechanismService):
    """
    Mecanismo SMR: con todo el pasado borrado libera X_t con probabilidad
    q_t = min_u C_t(u, X_t) / C_t(X_0, X_t); tras la primera liberación
    todo se libera.
    """

    mechanism_id = 'smr'

    def alpha_table(self, chain: TransitionMatrix, horizon: int) -> AlphaTable:
        """
        alpha[t] = sum_v min_u P^t(u, v) para t <= N

        Raises:
            NumericError: Si alfa decrece más allá de MONOTONE_TOLERANCE
        """
        if horizon < 0:
            raise ValidationError("El horizonte debe ser no negativo")
        alpha = np.array([
            self.chain_service.matrix_power(chain, t).min(axis=0).sum()
            for t in range(horizon + 1)
        ])
        decrements = np.diff(alpha)
        if np.any(decrements < -self.config.MONOTONE_TOLERANCE):
            t = int(np.argmax(decrements < -self.config.MONOTONE_TOLERANCE)) + 1
            raise NumericError(f"La tabla alfa decrece en t={t} ({decrements[t - 1]:.3e})")
        alpha = np.minimum(np.maximum.accumulate(alpha), 1.0)
        return AlphaTable(alpha)

    def window_distribution(self, chain: TransitionMatrix, horizon: int) -> WindowLaw:
        """
        Ley marginal de la ventana: P(T=t) = alpha_t - alpha_{t-1} para t <= N
        y P(T=N+1) = 1 - alpha_N
        """
        self._require_two_states(chain)
        alpha = self.alpha_table(chain, horizon).alpha
        probabilities = np.zeros(horizon + 2)
        probabilities[1:horizon + 1] = np.diff(alpha)
        probabilities[horizon + 1] = 1.0 - alpha[horizon]
        return WindowLaw(probabilities)

    def conditional_kernels(self, chain: TransitionMatrix, horizon: int) -> ConditionalKernelSequence:
        """
        Recursión de núcleos condicionales

        C_0 = I y C_{t+1} = ((C_t - 1 m_t) P) / (1 - s_t), con
        m_t(v) = min_u C_t(u, v) y s_t = sum_v m_t(v). La recursión termina en
        el primer t con s_t = 1. Cada núcleo se contrasta con la forma cerrada
        C_t = (P^t - 1 (m~_{t-1} P)) / (1 - alpha_{t-1}).

        Returns:
            ConditionalKernelSequence: Núcleos hasta N o hasta la terminación
        """
        self._require_two_states(chain)
        alpha = self.alpha_table(chain, horizon).alpha
        kernels = [np.eye(chain.size)]
        s = []
        for t in range(horizon + 1):
            kernel = kernels[t]
            minima = kernel.min(axis=0)
            s_t = float(minima.sum())
            s.append(s_t)
            self._check_s(t, s_t, alpha)
            if 1.0 - s_t <= self.config.TERMINATION_TOLERANCE:
                logger.debug(f"Recursión de núcleos terminada en t={t}: liberación determinista")
                break
            if t == horizon:
                break
            following = ((kernel - minima[None, :]) @ chain.entries) / (1.0 - s_t)
            self._check_closed_form(chain, t + 1, following, alpha)
            kernels.append(following)
        return ConditionalKernelSequence(kernels, s, horizon)

    def release_probability(self, chain: TransitionMatrix, kernels: ConditionalKernelSequence, t: int,
                            initial: int, state: int, released_before: bool = False) -> float:
        """
        q_t = min_u C_t(u, x_t) / C_t(x0, x_t)

        Args:
            released_before: Si alguna salida previa ya fue liberada

        Raises:
            ImpossiblePathError: Si C_t(x0, x_t) = 0
        """
        if released_before:
            return 1.0
        if t == 0:
            return 0.0
        if t > kernels.terminated_at:
            return 1.0
        kernel = kernels.kernel(t)
        current = kernel[initial, state]
        if current <= 0:
            raise ImpossiblePathError(
                f"C_{t}({chain.state_space.label_of(initial)}, {chain.state_space.label_of(state)}) = 0"
            )
        return float(min(kernel[:, state].min() / current, 1.0))

    def hazard_table(self, chain: TransitionMatrix, horizon: int,
                     kernels: ConditionalKernelSequence = None) -> np.ndarray:
        """H[t, x0, x] = q_t(x0, x); NaN donde C_t(x0, x) = 0, 1 tras la terminación"""
        if kernels is None:
            kernels = self.conditional_kernels(chain, horizon)
        if kernels.horizon < horizon:
            raise ValidationError("El horizonte de los núcleos es menor que el solicitado")
        n = chain.size
        hazards = np.ones((horizon + 1, n, n))
        hazards[0] = 0.0
        for t in range(1, min(horizon, kernels.terminated_at) + 1):
            kernel = kernels.kernel(t)
            minima = np.broadcast_to(kernels.column_minima(t)[None, :], kernel.shape)
            hazards[t] = np.minimum(safe_ratio(minima, kernel, zero_over_zero=math.nan), 1.0)
        return hazards

    def run_smr(self, chain: TransitionMatrix, trajectory: Trajectory,
                kernels: ConditionalKernelSequence, rng: RngStream) -> RedactedTrajectory:
        """Muestreo secuencial del mecanismo; la primera liberación fija T"""
        if trajectory.horizon > kernels.horizon:
            raise ValidationError("El horizonte de la trayectoria excede el de los núcleos")
        hazards = self.hazard_table(chain, trajectory.horizon, kernels)
        return self.redact(chain, trajectory, rng, hazards)

    def smr_window_law_conditional(self, chain: TransitionMatrix, kernels: ConditionalKernelSequence,
                                   trajectory: Trajectory) -> WindowLaw:
        """Ley exacta de T dada la trayectoria completa"""
        if trajectory.horizon > kernels.horizon:
            raise ValidationError("El horizonte de la trayectoria excede el de los núcleos")
        hazards = self.hazard_table(chain, trajectory.horizon, kernels)
        return self.window_law(chain, trajectory, hazards)

    def hazard_ratio(self, chain: TransitionMatrix, t: int, horizon: int) -> float:
        """
        P(Y_t = * | Y_{t-1} = *) = (1 - alpha_t) / (1 - alpha_{t-1})

        Raises:
            UndefinedConditioningError: Si alpha_{t-1} = 1
        """
        if not 1 <= t <= horizon:
            raise ValidationError(f"t debe estar en [1, {horizon}]")
        alpha = self.alpha_table(chain, horizon)
        survival = 1.0 - alpha[t - 1]
        if survival <= self.config.TERMINATION_TOLERANCE:
            raise UndefinedConditioningError(f"alpha_{t - 1} = 1: Y_{t - 1} = * tiene probabilidad cero")
        return float(min(max((1.0 - alpha[t]) / survival, 0.0), 1.0))

    def smr_distortion(self, chain: TransitionMatrix, horizon: int) -> float:
        """sum_{t<=N} (1 - alpha_t)"""
        alpha = self.alpha_table(chain, horizon).alpha
        return compensated_sum(1.0 - alpha)

    def empirical_hazard(self, windows: np.ndarray, t: int) -> MonteCarloEstimate:
        """
        Estimación de P(Y_t = * | Y_{t-1} = *) desde ventanas simuladas

        Y_t = * equivale a T > t, por lo que el estimador es
        #{T > t} / #{T >= t} con error estándar binomial.
        """
        windows = np.asarray(windows)
        at_risk = int(np.count_nonzero(windows >= t))
        if at_risk == 0:
            raise UndefinedConditioningError(f"Ninguna ventana sobrevive hasta t={t - 1}")
        survived = int(np.count_nonzero(windows > t))
        estimate = survived / at_risk
        standard_error = math.sqrt(estimate * (1.0 - estimate) / at_risk)
        return MonteCarloEstimate(estimate, standard_error, at_risk)

    def _check_s(self, t: int, s_t: float, alpha: np.ndarray) -> None:
        previous = alpha[t - 1] if t >= 1 else 0.0
        survival = 1.0 - previous
        if survival < 1e-6:
            return
        expected = (alpha[t] - previous) / survival
        if abs(s_t - expected) > self.config.NUMERIC_TOLERANCE / survival:
            raise NumericError(f"s_{t} = {s_t:.12g} difiere de la forma cerrada {expected:.12g}")

    def _check_closed_form(self, chain: TransitionMatrix, t: int, kernel: np.ndarray, alpha: np.ndarray) -> None:
        survival = 1.0 - alpha[t - 1]
        if survival < 1e-6:
            return
        common = self.chain_service.matrix_power(chain, t - 1).min(axis=0) @ chain.entries
        closed = (self.chain_service.matrix_power(chain, t) - common[None, :]) / survival
        deviation = np.abs(kernel - closed).max()
        if deviation > self.config.NUMERIC_TOLERANCE / survival:
            raise NumericError(f"El núcleo C_{t} difiere de la forma cerrada ({deviation:.3e})")
