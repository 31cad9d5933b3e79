"""
Servicio de análisis de distorsión - Curvas exactas, confirmación Monte-Carlo
y cota espectral
"""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.stats import norm

from app.config.settings import Config
from app.exceptions.custom_exceptions import BoundUndefinedError, DomainError, NumericError, ValidationError
from app.models.chain import TransitionMatrix
from app.models.reports import DistortionReport, EmpiricalEstimate, SpectralBound
from app.services.base_service import BaseMechanismService
from app.services.chain_service import ChainService
from app.services.smr_service import SmrMechanismService
from app.services.sst_service import SstMechanismService
from app.utils.rng import RngStream

logger = logging.getLogger(__name__)


class DistortionService:
    """Distorsión de Hamming esperada de los mecanismos y su cota espectral"""

    def __init__(self, chain_service=None, config=None):
        self.config = config or Config()
        self.chain_service = chain_service or ChainService(self.config)
        self.smr = SmrMechanismService(self.chain_service, self.config)
        self.sst = SstMechanismService(self.chain_service, self.config)

    def spectral_bound(self, chain: TransitionMatrix) -> SpectralBound:
        """
        |X| / (2 sqrt(pi_min) (1 - sqrt(lambda)))

        Raises:
            BoundUndefinedError: Si la cadena no es ergódica
        """
        diagnostics = self.chain_service.validate_chain(chain)
        if not diagnostics.ergodic:
            raise BoundUndefinedError(
                f"La cota espectral requiere una cadena ergódica "
                f"(irreducible={diagnostics.irreducible}, período={diagnostics.period})"
            )
        pi_min = self.chain_service.stationary_distribution(chain).minimum
        eigenvalue = self.chain_service.second_eigenvalue_of_reversiblization(chain)
        root = math.sqrt(eigenvalue)
        bound = math.inf if root >= 1.0 else chain.size / (2.0 * math.sqrt(pi_min) * (1.0 - root))
        return SpectralBound(bound, eigenvalue, pi_min, chain.size)

    def spectral_terms(self, chain: TransitionMatrix, horizon: int) -> pd.DataFrame:
        """
        Cadena de desigualdades por tiempo:
        1 - alpha_t <= |X| max_z TV(pi, P^t(z, .)) <= |X| / (2 sqrt(pi_min)) sqrt(lambda)^t
        """
        bound = self.spectral_bound(chain)
        pi = self.chain_service.stationary_distribution(chain).weights
        alpha = self.smr.alpha_table(chain, horizon).alpha
        rows = []
        for t in range(horizon + 1):
            power = self.chain_service.matrix_power(chain, t)
            distance = max(self.chain_service.total_variation(pi, row) for row in power)
            rows.append({
                't': t,
                'one_minus_alpha': 1.0 - alpha[t],
                'tv_term': chain.size * distance,
                'spectral_term': chain.size / (2.0 * math.sqrt(bound.pi_min)) * math.sqrt(bound.lambda_) ** t,
            })
        return pd.DataFrame(rows, columns=['t', 'one_minus_alpha', 'tv_term', 'spectral_term'])

    def distortion_sweep(self, chain: TransitionMatrix, mechanism: BaseMechanismService,
                         grid: Sequence[int], trials: Optional[int] = None,
                         rng: Optional[RngStream] = None, start=None) -> DistortionReport:
        """
        Curvas exactas sobre la grilla y brecha de saturación
        exact(N_max) - exact(N_max // 2)

        Args:
            mechanism: Mecanismo para la parte empírica
            trials: Ensayos Monte-Carlo por punto (None omite la parte empírica)
            rng: Flujo base; cada horizonte N usa rng.derive(N), así el punto no depende
                del resto de la grilla
        """
        grid = sorted(set(int(h) for h in grid))
        if not grid or grid[0] < 0:
            raise ValidationError("La grilla de horizontes debe contener enteros no negativos")
        largest = grid[-1]

        alpha = self.smr.alpha_table(chain, largest).alpha
        cumulative = np.cumsum(1.0 - alpha)
        exact_smr = [float(cumulative[h]) for h in grid]
        exact_sst = self._exact_sst_curve(chain, grid)

        empirical_mean: List[Optional[float]] = [None] * len(grid)
        half_widths: List[Optional[float]] = [None] * len(grid)
        if trials:
            for i, horizon in enumerate(grid):
                point_rng = rng.derive(horizon) if rng is not None else None
                estimate = self.empirical_distortion(chain, mechanism, horizon, trials, point_rng, start)
                empirical_mean[i] = estimate.mean
                half_widths[i] = estimate.half_width

        try:
            bound = self.spectral_bound(chain)
        except (BoundUndefinedError, DomainError) as e:
            logger.warning(f"Cota espectral omitida: {str(e)}")
            bound = None

        gap = float(cumulative[largest] - cumulative[largest // 2])
        report = DistortionReport(
            mechanism.mechanism_id, grid, exact_smr, exact_sst, empirical_mean, half_widths, bound, gap
        )
        self.check_report(report)
        logger.info(f"Barrido de distorsión sobre {grid}: brecha de saturación {gap:.3e}")
        return report

    def check_report(self, report: DistortionReport) -> None:
        """
        Verifica monotonía de la curva exacta y dominación por la cota

        Raises:
            NumericError: Si alguna condición falla
        """
        curve = np.array(report.exact_smr)
        if np.any(np.diff(curve) < -self.config.NUMERIC_TOLERANCE):
            raise NumericError("La distorsión exacta no es monótona en N")
        if report.spectral_bound is not None and np.any(curve > report.spectral_bound.bound + self.config.NUMERIC_TOLERANCE):
            raise NumericError("La distorsión exacta supera la cota espectral")

    def empirical_distortion(self, chain: TransitionMatrix, mechanism: BaseMechanismService, horizon: int,
                             trials: int, rng: RngStream, start=None) -> EmpiricalEstimate:
        """
        Media de borrados min(T, N+1) con semiancho normal al nivel CONFIDENCE_LEVEL

        Args:
            start: Ley de X_0 (estado fijo o distribución); uniforme por defecto
        """
        if trials < self.config.MIN_MC_TRIALS:
            raise ValidationError(f"Se requieren al menos {self.config.MIN_MC_TRIALS} ensayos")
        if start is None:
            start = np.full(chain.size, 1.0 / chain.size)
        _, windows = mechanism.simulate_windows(chain, horizon, trials, start, rng)
        erasures = np.minimum(windows, horizon + 1).astype(float)

        quantile = norm.ppf(0.5 + self.config.CONFIDENCE_LEVEL / 2.0)
        half_width = quantile * erasures.std(ddof=1) / math.sqrt(trials)
        return EmpiricalEstimate(erasures.mean(), half_width, trials, self.config.CONFIDENCE_LEVEL)

    def _exact_sst_curve(self, chain: TransitionMatrix, grid: List[int]) -> List[Optional[float]]:
        """sum (1 - a_t) por punto de la grilla cuando la tabla no depende de x0"""
        try:
            verdict = self.sst.check_sst_applicability(chain, grid[-1])
        except DomainError as e:
            logger.info(f"Curva SST omitida: {str(e)}")
            return [None] * len(grid)
        if not verdict.operative_pass or chain.size < 2:
            return [None] * len(grid)
        table = self.sst.table_for(chain, grid[-1])
        cumulative = np.cumsum(1.0 - table.a[0])
        return [float(cumulative[h]) for h in grid]
