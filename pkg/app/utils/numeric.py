"""
Utilidades numéricas compartidas
"""
import math
from typing import Iterable

import numpy as np


def compensated_sum(values: Iterable[float]) -> float:
    """Suma con compensación de errores (independiente del orden)"""
    return math.fsum(float(v) for v in values)


def xlog2x(values: np.ndarray) -> np.ndarray:
    """x·log2(x) elemento a elemento con la convención 0·log 0 = 0"""
    values = np.asarray(values, dtype=float)
    result = np.zeros_like(values)
    positive = values > 0
    result[positive] = values[positive] * np.log2(values[positive])
    return result


def safe_ratio(numerator: np.ndarray, denominator: np.ndarray, zero_over_zero: float = 0.0) -> np.ndarray:
    """Cociente elemento a elemento; 0/0 toma el valor indicado, x/0 es NaN"""
    numerator = np.asarray(numerator, dtype=float)
    denominator = np.asarray(denominator, dtype=float)
    result = np.full(np.broadcast(numerator, denominator).shape, np.nan)
    nonzero = denominator != 0
    np.divide(numerator, denominator, out=result, where=nonzero)
    both_zero = (~nonzero) & (numerator == 0)
    result[both_zero] = zero_over_zero
    return result
