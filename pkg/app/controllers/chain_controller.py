"""
Controlador de cadenas - Comandos validate y bound
"""
import logging
from typing import Optional

import click

from app.controllers.base_controller import BaseController, chain_source, source_options
from app.models.run_config import RunConfig
from app.services.distortion_service import DistortionService

logger = logging.getLogger(__name__)


class ChainController(BaseController):
    """Diagnóstico estructural y cota espectral de una cadena"""

    def __init__(self, distortion_service=None, **kwargs):
        super().__init__(**kwargs)
        self.chain_service = self.chains.chain_service
        self.distortion_service = distortion_service or DistortionService(self.chain_service, self.config)

    def validate(self, run_config: RunConfig) -> int:
        chain = self.load_chain(run_config)
        diagnostics = self.chain_service.validate_chain(chain)
        stationary = self.chain_service.stationary_distribution(chain)
        result = {
            'states': chain.labels,
            'diagnostics': diagnostics.to_dict(),
            'ergodic': diagnostics.ergodic,
            'stationary_distribution': stationary.to_dict(),
            'warnings': diagnostics.warnings,
        }
        return self.success_response('validate', result, run_config)

    def bound(self, run_config: RunConfig) -> int:
        chain = self.load_chain(run_config)
        bound = self.distortion_service.spectral_bound(chain)
        result = bound.to_dict()
        if run_config.horizon is not None:
            terms = self.distortion_service.spectral_terms(chain, run_config.horizon)
            result['terms'] = terms.to_dict(orient='records')
            result['exact_smr'] = self.distortion_service.smr.smr_distortion(chain, run_config.horizon)
        return self.success_response('bound', result, run_config)


@click.command('validate')
@source_options
@click.option('--out', default=None, help='Ruta del reporte (stdout por defecto)')
def validate_command(fixture: Optional[str], file_path: Optional[str], out: Optional[str]):
    """Diagnostica irreducibilidad, período y distribución estacionaria"""
    run_config = RunConfig('validate', chain_source(fixture, file_path), out=out)
    controller = ChainController()
    click.get_current_context().exit(controller.execute(controller.validate, run_config))


@click.command('bound')
@source_options
@click.option('--horizon', type=int, default=None, help='Horizonte para los términos de la cota')
@click.option('--out', default=None)
def bound_command(fixture: Optional[str], file_path: Optional[str], horizon: Optional[int], out: Optional[str]):
    """Cota espectral |X| / (2 sqrt(pi_min) (1 - sqrt(lambda)))"""
    run_config = RunConfig('bound', chain_source(fixture, file_path), horizon=horizon, out=out)
    controller = ChainController()
    click.get_current_context().exit(controller.execute(controller.bound, run_config))
