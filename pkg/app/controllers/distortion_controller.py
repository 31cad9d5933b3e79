"""
Controlador de distorsión - Comandos distortion y sweep
"""
import logging
from typing import Optional

import click

from app.controllers.base_controller import BaseController, chain_source, seed_option, source_options
from app.models.run_config import RunConfig
from app.services.distortion_service import DistortionService
from app.services.mechanism_factory import MECHANISM_IDS, build_mechanism
from app.utils.rng import RngStream

logger = logging.getLogger(__name__)


class DistortionController(BaseController):
    """Curvas de distorsión exactas, empíricas y cota espectral"""

    def __init__(self, distortion_service=None, **kwargs):
        super().__init__(**kwargs)
        self.distortion_service = distortion_service or DistortionService(self.chains.chain_service, self.config)

    def sweep(self, run_config: RunConfig) -> int:
        chain = self.load_chain(run_config)
        mechanism = build_mechanism(run_config.mechanism, run_config.k, self.chains.chain_service, self.config)
        rng = RngStream(run_config.seed) if run_config.trials else None
        start = self.resolve_start(chain, run_config.start)
        report = self.distortion_service.distortion_sweep(
            chain, mechanism, run_config.grid, run_config.trials, rng, start
        )
        if run_config.output_format == 'csv':
            self.reports.save_csv(report.to_frame(), run_config.out)
            return 0
        return self.success_response(run_config.command, report.to_dict(), run_config)


def _parse_grid(ctx, param, value):
    if value is None:
        return None
    try:
        return [int(item) for item in value.split(',') if item.strip()]
    except ValueError:
        raise click.BadParameter("la grilla debe ser una lista de enteros separados por comas")


def _mechanism_options(command):
    command = click.option('--k', type=int, default=None)(command)
    command = click.option('--mechanism', 'mechanism_id', type=click.Choice(MECHANISM_IDS), default='smr')(command)
    return command


def _output_options(command):
    command = click.option('--out', default=None)(command)
    command = click.option('--format', 'output_format', type=click.Choice(RunConfig.FORMATS), default='report')(command)
    return command


@click.command('distortion')
@source_options
@_mechanism_options
@click.option('--horizon', type=int, required=True)
@click.option('--trials', type=int, default=None, help='Ensayos Monte-Carlo (DEFAULT_TRIALS por defecto)')
@seed_option
@click.option('--start', default='uniform')
@_output_options
def distortion_command(fixture: Optional[str], file_path: Optional[str], mechanism_id: str, k: Optional[int],
                       horizon: int, trials: Optional[int], seed: Optional[int], start: str,
                       output_format: str, out: Optional[str]):
    """Distorsión exacta y empírica en un horizonte"""
    controller = DistortionController()
    run_config = RunConfig(
        'distortion', chain_source(fixture, file_path), horizon=horizon, mechanism=mechanism_id, k=k,
        trials=trials or controller.config.DEFAULT_TRIALS, seed=controller.resolve_seed(seed), start=start,
        grid=[horizon], out=out, output_format=output_format
    )
    click.get_current_context().exit(controller.execute(controller.sweep, run_config))


@click.command('sweep')
@source_options
@_mechanism_options
@click.option('--grid', callback=_parse_grid, default=None, help="Horizontes separados por comas, p. ej. '1,2,5,10'")
@click.option('--trials', type=int, default=None, help='Ensayos Monte-Carlo por punto (omitido: solo exacto)')
@seed_option
@click.option('--start', default='uniform')
@_output_options
def sweep_command(fixture: Optional[str], file_path: Optional[str], mechanism_id: str, k: Optional[int],
                  grid, trials: Optional[int], seed: Optional[int], start: str,
                  output_format: str, out: Optional[str]):
    """Curvas exactas sobre una grilla de horizontes y brecha de saturación"""
    controller = DistortionController()
    run_config = RunConfig(
        'sweep', chain_source(fixture, file_path), mechanism=mechanism_id, k=k,
        trials=trials, seed=controller.resolve_seed(seed) if trials else None, start=start,
        grid=grid if grid is not None else list(controller.config.DEFAULT_GRID),
        out=out, output_format=output_format
    )
    click.get_current_context().exit(controller.execute(controller.sweep, run_config))
