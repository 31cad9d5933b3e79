"""
Controlador de mecanismos - Comando mechanism (ejecuciones de muestra)
"""
import logging
from typing import Optional

import click

from app.controllers.base_controller import (
    BaseController, chain_source, seed_option, source_options
)
from app.models.run_config import RunConfig
from app.services.mechanism_factory import MECHANISM_IDS, build_mechanism
from app.utils.rng import RngStream

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_RUNS = 10


class MechanismController(BaseController):
    """Ejecuta un mecanismo sobre trayectorias muestreadas"""

    def run(self, run_config: RunConfig) -> int:
        chain = self.load_chain(run_config)
        chain_service = self.chains.chain_service
        mechanism = build_mechanism(run_config.mechanism, run_config.k, chain_service, self.config)
        start = self.resolve_start(chain, run_config.start)
        rng = RngStream(run_config.seed)

        result = {'mechanism': mechanism.describe()}
        if run_config.mechanism == 'sst':
            verdict = mechanism.check_sst_applicability(chain, run_config.horizon)
            result['sst_applicability'] = verdict.to_dict()
            if not verdict.operative_pass:
                logger.warning("La tabla de separación depende de x0: el mecanismo SST no es privado en esta cadena")

        hazards = mechanism.hazard_table(chain, run_config.horizon)
        runs = []
        for _ in range(run_config.trials):
            trajectory = chain_service.sample_trajectory(chain, start, run_config.horizon, rng)
            released = mechanism.redact(chain, trajectory, rng, hazards)
            runs.append({
                'trajectory': trajectory.labels(chain.state_space),
                'released': released.labels(chain.state_space),
                'window_length': released.window_length,
                'erasures': released.erasure_count,
            })
        result['runs'] = runs
        return self.success_response('mechanism', result, run_config)


@click.command('mechanism')
@source_options
@click.option('--mechanism', 'mechanism_id', type=click.Choice(MECHANISM_IDS), required=True)
@click.option('--k', type=int, default=None, help='Índice de liberación del control fixed-window')
@click.option('--horizon', type=int, required=True)
@click.option('--trials', type=int, default=DEFAULT_SAMPLE_RUNS, help='Número de ejecuciones de muestra')
@seed_option
@click.option('--start', default='uniform', help="Ley de X_0: 'uniform' o etiqueta de estado")
@click.option('--out', default=None)
def mechanism_command(fixture: Optional[str], file_path: Optional[str], mechanism_id: str, k: Optional[int],
                      horizon: int, trials: int, seed: Optional[int], start: str, out: Optional[str]):
    """Muestrea trayectorias y emite sus versiones redactadas"""
    controller = MechanismController()
    run_config = RunConfig(
        'mechanism', chain_source(fixture, file_path), horizon=horizon, mechanism=mechanism_id,
        k=k, trials=trials, seed=controller.resolve_seed(seed), start=start, out=out
    )
    click.get_current_context().exit(controller.execute(controller.run, run_config))
