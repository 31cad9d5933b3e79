"""
Controlador de auditoría - Comando audit
"""
import logging
from typing import Optional

import click

from app.controllers.base_controller import (
    EXIT_AUDIT_FAIL, EXIT_OK, BaseController, chain_source, seed_option, source_options
)
from app.exceptions.custom_exceptions import DomainError
from app.models.run_config import RunConfig
from app.services.audit_service import AuditService
from app.services.mechanism_factory import MECHANISM_IDS, build_mechanism
from app.utils.rng import RngStream

logger = logging.getLogger(__name__)

MONTE_CARLO_BANNER = 'ESTIMACIÓN MONTE-CARLO: NO ES UNA PRUEBA DE PRIVACIDAD'


class AuditController(BaseController):
    """Auditoría exacta de privacidad perfecta (o estimación Monte-Carlo)"""

    def __init__(self, audit_service=None, **kwargs):
        super().__init__(**kwargs)
        self.audit_service = audit_service or AuditService(self.chains.chain_service, self.config)

    def audit(self, run_config: RunConfig) -> int:
        chain = self.load_chain(run_config)
        mechanism = build_mechanism(run_config.mechanism, run_config.k, self.chains.chain_service, self.config)
        prior = self.resolve_prior(chain, run_config.prior)
        report = self.audit_service.audit_privacy(
            mechanism, chain, run_config.horizon, prior,
            run_config.tolerances.get('mi'), run_config.tolerances.get('tv')
        )
        if run_config.mechanism == 'sst':
            try:
                report.stop_pair_bits = self.audit_service.audit_stop_pair(
                    chain, run_config.horizon, prior=prior, mechanism=mechanism
                )
            except DomainError as e:
                logger.warning(f"I(X_0; tau, X_tau) omitida: {str(e)}")

        status = EXIT_OK if report.passed else EXIT_AUDIT_FAIL
        if not report.passed:
            click.echo(
                f"auditoría fallida: MI={report.mutual_information_bits:.6f} bits, "
                f"TV={report.max_pairwise_tv:.6f}", err=True
            )
        return self.success_response('audit', report.to_dict(), run_config, status)

    def estimate(self, run_config: RunConfig) -> int:
        chain = self.load_chain(run_config)
        mechanism = build_mechanism(run_config.mechanism, run_config.k, self.chains.chain_service, self.config)
        prior = self.resolve_prior(chain, run_config.prior)
        click.echo(MONTE_CARLO_BANNER, err=True)
        estimate = self.audit_service.mc_mi_estimate(
            mechanism, chain, run_config.horizon, prior, run_config.trials, RngStream(run_config.seed)
        )
        result = {'banner': MONTE_CARLO_BANNER, 'mutual_information_estimate': estimate.to_dict()}
        return self.success_response('audit-monte-carlo', result, run_config)


@click.command('audit')
@source_options
@click.option('--mechanism', 'mechanism_id', type=click.Choice(MECHANISM_IDS), required=True)
@click.option('--k', type=int, default=None)
@click.option('--horizon', type=int, required=True)
@click.option('--prior', default='uniform', help="'uniform' o archivo YAML con pesos por estado")
@click.option('--tol-mi', type=float, default=None)
@click.option('--tol-tv', type=float, default=None)
@click.option('--monte-carlo', is_flag=True, help='Estimación Monte-Carlo en lugar de enumeración exacta')
@click.option('--trials', type=int, default=None)
@seed_option
@click.option('--out', default=None)
def audit_command(fixture: Optional[str], file_path: Optional[str], mechanism_id: str, k: Optional[int],
                  horizon: int, prior: str, tol_mi: Optional[float], tol_tv: Optional[float],
                  monte_carlo: bool, trials: Optional[int], seed: Optional[int], out: Optional[str]):
    """Verifica I(X_0; Y_0, ..., Y_N) = 0 por enumeración exacta"""
    controller = AuditController()
    tolerances = {
        'mi': controller.config.TOL_MI if tol_mi is None else tol_mi,
        'tv': controller.config.TOL_TV if tol_tv is None else tol_tv,
        'numeric': controller.config.NUMERIC_TOLERANCE,
    }
    run_config = RunConfig(
        'audit', chain_source(fixture, file_path), horizon=horizon, mechanism=mechanism_id, k=k,
        prior=prior, tolerances=tolerances, out=out
    )
    action = controller.audit
    if monte_carlo:
        run_config.trials = trials or controller.config.DEFAULT_TRIALS
        run_config.seed = controller.resolve_seed(seed)
        action = controller.estimate
    click.get_current_context().exit(controller.execute(action, run_config))
