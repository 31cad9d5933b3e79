"""
Modelos de resultados: veredictos, canales exactos, auditorías y distorsión
"""
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .base_model import BaseModel, frozen_array
from .chain import ProbabilityVector, StateSpace
from .redaction import ERASURE_SYMBOL


class SstApplicability(BaseModel):
    """Veredicto de aplicabilidad del mecanismo SST"""

    def __init__(
        self,
        doubly_stochastic: bool,
        uniform_stationary: bool,
        spreads: Sequence[float],
        tolerance: float
    ):
        self.doubly_stochastic = bool(doubly_stochastic)
        self.uniform_stationary = bool(uniform_stationary)
        self.structural_pass = self.doubly_stochastic and self.uniform_stationary
        self.spreads = [float(s) for s in spreads]
        self.max_spread = max(self.spreads) if self.spreads else 0.0
        self.tolerance = float(tolerance)
        self.operative_pass = self.max_spread <= self.tolerance

    @property
    def verdict(self) -> str:
        return 'applicable' if self.operative_pass else 'not applicable'

    def to_dict(self):
        data = super().to_dict()
        data['verdict'] = self.verdict
        return data


class OutputChannel(BaseModel):
    """
    Canal exacto X_0 -> Y_{[0:N]}.

    Cada columna es una cadena de salida codificada como
    T * n^(N+1) + sum_{t>=T} x_t n^(N-t); la fila x0 es la ley condicional
    de la salida dado X_0 = x0.
    """

    def __init__(self, keys, matrix, state_space: StateSpace, horizon: int, mechanism_id: str):
        self.keys = frozen_array(keys, dtype=np.int64)
        self.matrix = frozen_array(matrix)
        self.state_space = state_space
        self.horizon = int(horizon)
        self.mechanism_id = mechanism_id

    @property
    def base(self) -> int:
        return self.state_space.size ** (self.horizon + 1)

    def window_lengths(self) -> np.ndarray:
        """Longitud de ventana T de cada columna"""
        return self.keys // self.base

    def decode(self, key: int) -> Tuple[str, ...]:
        """Cadena de salida (etiquetas y '*') de una columna"""
        n = self.state_space.size
        window, suffix = divmod(int(key), self.base)
        symbols = []
        for t in range(self.horizon + 1):
            if t < window:
                symbols.append(ERASURE_SYMBOL)
            else:
                digit = (suffix // n ** (self.horizon - t)) % n
                symbols.append(self.state_space.label_of(digit))
        return tuple(symbols)

    def conditional(self, initial: int) -> Dict[Tuple[str, ...], float]:
        """Ley de la salida dado X_0 = x0, solo átomos con masa positiva"""
        row = self.matrix[initial]
        return {
            self.decode(key): float(p)
            for key, p in zip(self.keys, row) if p > 0
        }

    def row_sums(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    def coarsen(self, groups: np.ndarray) -> np.ndarray:
        """Matriz del canal agregando columnas por grupo"""
        labels, inverse = np.unique(groups, return_inverse=True)
        coarse = np.zeros((self.matrix.shape[0], labels.shape[0]))
        for row in range(self.matrix.shape[0]):
            coarse[row] = np.bincount(inverse, weights=self.matrix[row], minlength=labels.shape[0])
        return coarse

    def to_dict(self):
        return {
            'mechanism_id': self.mechanism_id,
            'horizon': self.horizon,
            'conditionals': {
                label: {''.join(output) if all(len(s) == 1 for s in output) else ' '.join(output): p
                        for output, p in self.conditional(i).items()}
                for i, label in enumerate(self.state_space.labels)
            }
        }


class AuditReport(BaseModel):
    """Resultado de la auditoría de privacidad perfecta"""

    def __init__(
        self,
        mechanism_id: str,
        horizon: int,
        mutual_information_bits: float,
        max_pairwise_tv: float,
        prior_used: ProbabilityVector,
        tol_mi: float,
        tol_tv: float,
        worst_pair: Optional[Tuple[str, str]] = None,
        stop_pair_bits: Optional[float] = None
    ):
        self.mechanism_id = mechanism_id
        self.horizon = int(horizon)
        self.mutual_information_bits = float(mutual_information_bits)
        self.max_pairwise_tv = float(max_pairwise_tv)
        self.prior_used = prior_used
        self.tol_mi = float(tol_mi)
        self.tol_tv = float(tol_tv)
        self.worst_pair = list(worst_pair) if worst_pair else None
        self.stop_pair_bits = stop_pair_bits

    @property
    def passed(self) -> bool:
        return self.mutual_information_bits <= self.tol_mi and self.max_pairwise_tv <= self.tol_tv

    @property
    def verdict(self) -> str:
        return 'pass' if self.passed else 'fail'

    def to_dict(self):
        data = super().to_dict()
        data['verdict'] = self.verdict
        return data


class MonteCarloEstimate(BaseModel):
    """Estimación Monte-Carlo con error estándar"""

    def __init__(self, value: float, standard_error: float, trials: int, note: str = '', **extra):
        self.value = float(value)
        self.standard_error = float(standard_error)
        self.trials = int(trials)
        self.note = note
        for key, item in extra.items():
            setattr(self, key, item)


class EmpiricalEstimate(BaseModel):
    """Media empírica con semiancho de confianza por aproximación normal"""

    def __init__(self, mean: float, half_width: float, trials: int, confidence: float):
        self.mean = float(mean)
        self.half_width = float(half_width)
        self.trials = int(trials)
        self.confidence = float(confidence)

    def contains(self, value: float) -> bool:
        return abs(value - self.mean) <= self.half_width


class SpectralBound(BaseModel):
    """Cota espectral de la distorsión"""

    def __init__(self, bound: float, lambda_: float, pi_min: float, n_states: int):
        self.bound = float(bound)
        self.lambda_ = float(lambda_)
        self.pi_min = float(pi_min)
        self.n_states = int(n_states)

    def to_dict(self):
        return {
            'spectral_bound': self.bound,
            'lambda': self.lambda_,
            'pi_min': self.pi_min,
            'n_states': self.n_states,
        }


CSV_COLUMNS = ['N', 'exact_smr', 'exact_sst', 'empirical_mean', 'ci_halfwidth', 'spectral_bound']


class DistortionReport(BaseModel):
    """Curvas de distorsión exactas, empíricas y cota espectral"""

    def __init__(
        self,
        mechanism_id: str,
        horizons: List[int],
        exact_smr: List[float],
        exact_sst: List[Optional[float]],
        empirical_mean: List[Optional[float]],
        ci_halfwidth: List[Optional[float]],
        spectral_bound: Optional[SpectralBound],
        saturation_gap: float
    ):
        self.mechanism_id = mechanism_id
        self.horizons = [int(h) for h in horizons]
        self.exact_smr = [float(v) for v in exact_smr]
        self.exact_sst = exact_sst
        self.empirical_mean = empirical_mean
        self.ci_halfwidth = ci_halfwidth
        self.spectral_bound = spectral_bound
        self.saturation_gap = float(saturation_gap)

    def to_frame(self) -> pd.DataFrame:
        """Vista plana para CSV"""
        bound = self.spectral_bound.bound if self.spectral_bound else None
        return pd.DataFrame({
            'N': self.horizons,
            'exact_smr': self.exact_smr,
            'exact_sst': self.exact_sst,
            'empirical_mean': self.empirical_mean,
            'ci_halfwidth': self.ci_halfwidth,
            'spectral_bound': [bound] * len(self.horizons),
        }, columns=CSV_COLUMNS)
