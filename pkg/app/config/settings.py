"""
Configuración de la aplicación - Tolerancias numéricas, límites y valores por defecto
"""
from decouple import config, Csv


class Config:
    """Configuración base de la aplicación"""

    # Configuración de la aplicación
    APP_NAME = 'Markov Redaction Privacy'
    APP_VERSION = '1.0.0'
    DEBUG = config('DEBUG', default=False, cast=bool)
    LOG_LEVEL = config('LOG_LEVEL', default='INFO')

    # Validación de matrices de transición
    ROW_SUM_TOLERANCE = config('ROW_SUM_TOLERANCE', default=1e-9, cast=float)
    ROW_SUM_REPAIR_TOLERANCE = config('ROW_SUM_REPAIR_TOLERANCE', default=1e-12, cast=float)
    NUMERIC_TOLERANCE = config('NUMERIC_TOLERANCE', default=1e-10, cast=float)
    MONOTONE_TOLERANCE = config('MONOTONE_TOLERANCE', default=1e-9, cast=float)
    HAZARD_TOLERANCE = config('HAZARD_TOLERANCE', default=1e-9, cast=float)
    SEPARATION_TOLERANCE = config('SEPARATION_TOLERANCE', default=1e-12, cast=float)
    TERMINATION_TOLERANCE = config('TERMINATION_TOLERANCE', default=1e-12, cast=float)

    # Auditoría de privacidad
    TOL_MI = config('TOL_MI', default=1e-10, cast=float)
    TOL_TV = config('TOL_TV', default=1e-10, cast=float)
    SST_APPLICABILITY_TOLERANCE = config('SST_APPLICABILITY_TOLERANCE', default=1e-10, cast=float)
    ENUMERATION_GUARD = config('ENUMERATION_GUARD', default=10_000_000, cast=int)

    # Monte-Carlo
    MIN_MC_TRIALS = config('MIN_MC_TRIALS', default=1000, cast=int)
    DEFAULT_TRIALS = config('DEFAULT_TRIALS', default=10_000, cast=int)
    CONFIDENCE_LEVEL = config('CONFIDENCE_LEVEL', default=0.99, cast=float)

    # Barrido de distorsión
    DEFAULT_GRID = config('DEFAULT_GRID', default='1,2,5,10,20,50,100', cast=Csv(int))


class DevelopmentConfig(Config):
    """Configuración para desarrollo"""
    DEBUG = True
    LOG_LEVEL = 'DEBUG'


class ProductionConfig(Config):
    """Configuración para producción"""
    DEBUG = False


def get_config():
    """Retorna la configuración según el entorno"""
    env = config('APP_ENV', default='production').lower()

    if env == 'development':
        return DevelopmentConfig()
    else:
        return ProductionConfig()
