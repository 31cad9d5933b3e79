"""
Servicio de auditoría de privacidad - Canal exacto X_0 -> Y por enumeración,
información mutua y estimadores Monte-Carlo
"""
import itertools
import logging
import math
from typing import Optional, Tuple

import numpy as np

from app.config.settings import Config
from app.exceptions.custom_exceptions import NumericError, ValidationError
from app.models.chain import ProbabilityVector, TransitionMatrix
from app.models.reports import AuditReport, MonteCarloEstimate, OutputChannel
from app.models.tables import SeparationTable
from app.services.base_service import BaseMechanismService
from app.services.chain_service import ChainService
from app.services.sst_service import SstMechanismService
from app.utils.numeric import xlog2x
from app.utils.rng import RngStream

logger = logging.getLogger(__name__)


class AuditService:
    """Verificación exacta de I(X_0; Y_0, ..., Y_N) = 0"""

    def __init__(self, chain_service=None, config=None):
        self.config = config or Config()
        self.chain_service = chain_service or ChainService(self.config)

    def exact_output_channel(self, mechanism: BaseMechanismService, chain: TransitionMatrix,
                             horizon: int) -> OutputChannel:
        """
        Enumera todas las trayectorias desde cada x0 y mezcla la ley exacta de
        ventana del mecanismo, agregando por cadena de salida

        Raises:
            EnumerationGuardError: Si n^(N+1) supera el límite configurado
        """
        count = self.chain_service.require_enumerable(chain, horizon)
        logger.info(f"Enumerando canal exacto de '{mechanism.mechanism_id}' (N={horizon}, {count} átomos)")
        n = chain.size
        base = count
        powers = n ** np.arange(horizon, -1, -1, dtype=np.int64)
        hazards = mechanism.hazard_table(chain, horizon)

        rows, keys, weights = [], [], []
        for initial in range(n):
            paths, probabilities = self.chain_service.enumerate_paths(chain, initial, horizon)
            laws = mechanism.window_laws(hazards, paths)
            for window in range(horizon + 2):
                mass = probabilities * laws[:, window]
                positive = mass > 0
                if not np.any(positive):
                    continue
                suffix = (paths[positive, window:] * powers[window:]).sum(axis=1)
                keys.append(window * base + suffix)
                weights.append(mass[positive])
                rows.append(np.full(int(positive.sum()), initial, dtype=np.int64))

        keys = np.concatenate(keys)
        weights = np.concatenate(weights)
        rows = np.concatenate(rows)
        unique_keys, column = np.unique(keys, return_inverse=True)
        matrix = np.zeros((n, unique_keys.shape[0]))
        for initial in range(n):
            selected = rows == initial
            matrix[initial] = np.bincount(column[selected], weights=weights[selected],
                                          minlength=unique_keys.shape[0])

        deviation = np.abs(matrix.sum(axis=1) - 1.0).max()
        if deviation > self.config.NUMERIC_TOLERANCE:
            raise NumericError(f"Las condicionales del canal no suman 1 (desviación {deviation:.3e})")
        return OutputChannel(unique_keys, matrix, chain.state_space, horizon, mechanism.mechanism_id)

    def mutual_information(self, channel: OutputChannel, prior: ProbabilityVector) -> float:
        """I(X_0; Y) en bits a partir de la conjunta exacta, con 0 log 0 = 0"""
        return _channel_information(channel.matrix, self._prior_weights(prior, channel.matrix.shape[0]))

    def max_pairwise_tv(self, channel: OutputChannel) -> Tuple[float, Optional[Tuple[int, int]]]:
        """Máxima distancia de variación total entre condicionales de salida"""
        worst, pair = 0.0, None
        for i, j in itertools.combinations(range(channel.matrix.shape[0]), 2):
            distance = self.chain_service.total_variation(channel.matrix[i], channel.matrix[j])
            if distance > worst:
                worst, pair = distance, (i, j)
        return worst, pair

    def audit_privacy(self, mechanism: BaseMechanismService, chain: TransitionMatrix, horizon: int,
                      prior: Optional[ProbabilityVector] = None, tol_mi: Optional[float] = None,
                      tol_tv: Optional[float] = None) -> AuditReport:
        """
        Auditoría exacta con doble criterio (información mutua y TV por pares)

        Returns:
            AuditReport: 'pass' si MI <= tol_mi y TV máxima <= tol_tv
        """
        prior = prior or uniform_prior(chain)
        channel = self.exact_output_channel(mechanism, chain, horizon)
        information = self.mutual_information(channel, prior)
        distance, pair = self.max_pairwise_tv(channel)
        report = AuditReport(
            mechanism_id=mechanism.mechanism_id,
            horizon=horizon,
            mutual_information_bits=information,
            max_pairwise_tv=distance,
            prior_used=prior,
            tol_mi=self.config.TOL_MI if tol_mi is None else tol_mi,
            tol_tv=self.config.TOL_TV if tol_tv is None else tol_tv,
            worst_pair=tuple(chain.state_space.label_of(i) for i in pair) if pair else None
        )
        logger.info(
            f"Auditoría '{mechanism.mechanism_id}' N={horizon}: MI={information:.3e} bits, "
            f"TV={distance:.3e}, veredicto={report.verdict}"
        )
        return report

    def audit_stop_pair(self, chain: TransitionMatrix, horizon: int,
                        table: Optional[SeparationTable] = None,
                        prior: Optional[ProbabilityVector] = None,
                        mechanism: Optional[SstMechanismService] = None) -> float:
        """
        I(X_0; (tau, X_tau)) exacta, contrastada con I(X_0; Y) del canal SST completo

        Raises:
            NumericError: Si ambas informaciones difieren más que NUMERIC_TOLERANCE
        """
        mechanism = mechanism or SstMechanismService(self.chain_service, self.config)
        if table is None:
            table = mechanism.table_for(chain, horizon)
        prior = prior or uniform_prior(chain)
        weights = self._prior_weights(prior, chain.size)

        rows = []
        for initial in range(chain.size):
            joint, remainder = mechanism.stop_pair_joint(chain, horizon, initial, table)
            rows.append(np.append(joint.ravel(), remainder))
        stop_pair = _channel_information(np.array(rows), weights)

        channel = self.exact_output_channel(mechanism, chain, horizon)
        full = self.mutual_information(channel, prior)
        if abs(full - stop_pair) > self.config.NUMERIC_TOLERANCE:
            raise NumericError(
                f"I(X_0; Y) = {full:.6e} difiere de I(X_0; tau, X_tau) = {stop_pair:.6e}"
            )
        return stop_pair

    def mc_mi_estimate(self, mechanism: BaseMechanismService, chain: TransitionMatrix, horizon: int,
                       prior: Optional[ProbabilityVector], trials: int, rng: RngStream) -> MonteCarloEstimate:
        """
        Estimador plug-in de I(X_0; Y) con error estándar jackknife

        Sesgado hacia arriba con muestras finitas; no sirve como prueba de
        privacidad.
        """
        if trials < self.config.MIN_MC_TRIALS:
            raise ValidationError(f"Se requieren al menos {self.config.MIN_MC_TRIALS} ensayos")
        prior = prior or uniform_prior(chain)
        paths, windows = mechanism.simulate_windows(chain, horizon, trials, prior, rng)

        released = np.arange(horizon + 1)[None, :] >= windows[:, None]
        outputs = np.where(released, paths, -1)
        _, column = np.unique(outputs, axis=0, return_inverse=True)
        column = column.ravel()
        cells = np.zeros((chain.size, column.max() + 1), dtype=np.int64)
        np.add.at(cells, (paths[:, 0], column), 1)

        estimate, standard_error = _jackknife_information(cells)
        logger.info(f"MI Monte-Carlo ({trials} ensayos): {estimate:.4e} ± {standard_error:.2e} bits")
        return MonteCarloEstimate(
            estimate, standard_error, trials,
            note='estimador plug-in sesgado hacia arriba; no es una prueba de privacidad',
            master_seed=rng.master_seed
        )

    def _prior_weights(self, prior, n: int) -> np.ndarray:
        weights = prior.weights if isinstance(prior, ProbabilityVector) else np.asarray(prior, dtype=float)
        if weights.shape != (n,):
            raise ValidationError(f"La distribución a priori debe tener {n} entradas")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > self.config.ROW_SUM_TOLERANCE:
            raise ValidationError("La distribución a priori debe ser no negativa y sumar 1")
        return weights


def uniform_prior(chain: TransitionMatrix) -> ProbabilityVector:
    """A priori uniforme sobre X_0"""
    return ProbabilityVector(np.full(chain.size, 1.0 / chain.size), chain.state_space)


def _channel_information(matrix: np.ndarray, prior: np.ndarray) -> float:
    joint = prior[:, None] * matrix
    output = joint.sum(axis=0)
    positive = joint > 0
    ratio = np.ones_like(joint)
    ratio[positive] = matrix[positive] / np.broadcast_to(output, joint.shape)[positive]
    information = float((joint[positive] * np.log2(ratio[positive])).sum())
    return max(information, 0.0)


def _jackknife_information(cells: np.ndarray) -> Tuple[float, float]:
    """
    MI plug-in y error estándar jackknife

    Con MI = log2 n + (S_c - S_a - S_b) / n y S = sum k log2 k, quitar una
    muestra de la celda (a, b) solo cambia tres términos.
    """
    total = int(cells.sum())
    rows = cells.sum(axis=1)
    columns = cells.sum(axis=0)
    s_cells = float(xlog2x(cells).sum())
    s_rows = float(xlog2x(rows).sum())
    s_columns = float(xlog2x(columns).sum())
    estimate = max(math.log2(total) + (s_cells - s_rows - s_columns) / total, 0.0)

    def drop(k):
        return xlog2x(k - 1.0) - xlog2x(k)

    a, b = np.nonzero(cells)
    counts = cells[a, b].astype(float)
    leave_one_out = math.log2(total - 1) + (
        s_cells + drop(counts) - s_rows - drop(rows[a].astype(float)) - s_columns - drop(columns[b].astype(float))
    ) / (total - 1)
    mean = float((counts * leave_one_out).sum() / total)
    variance = (total - 1) / total * float((counts * (leave_one_out - mean) ** 2).sum())
    return estimate, math.sqrt(variance)
