"""
Tests para el mecanismo SST
"""
import sys
import os

import numpy as np
import pytest

# Agregar el directorio padre al path para importar la app
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from app.exceptions.custom_exceptions import DomainError, ValidationError
from app.models.chain import Trajectory
from app.repositories.fixture_repository import FixtureRepository
from app.services.chain_service import ChainService
from app.services.sst_service import SstMechanismService
from app.utils.rng import RngStream


@pytest.fixture
def chain_service():
    return ChainService()


@pytest.fixture
def service(chain_service):
    """Servicio SST compartiendo el servicio de cadenas"""
    return SstMechanismService(chain_service)


@pytest.fixture
def build(chain_service):
    """Construye una cadena del catálogo por especificación"""
    fixtures = FixtureRepository()

    def _build(spec):
        labels, matrix = fixtures.get(spec)
        return chain_service.build_transition_matrix(matrix, labels)
    return _build


class TestSeparationTable:
    """Tests de la tabla a[x0][t]"""

    def test_two_state_closed_form(self, service, build):
        """Test a_t = 1 - (1 - 2p)^t para la cadena simétrica"""
        table = service.table_for(build('two_state(0.25)'), 6)
        expected = 1.0 - 0.5 ** np.arange(7)
        np.testing.assert_allclose(table.a[0], expected, atol=1e-12)
        np.testing.assert_allclose(table.a[1], expected, atol=1e-12)

    def test_weather_closed_form(self, service, build, chain_service):
        """Test a_t = 1 - 0.4^t con pi no uniforme"""
        chain = chain_service.build_transition_matrix([[0.9, 0.1], [0.5, 0.5]])
        table = service.table_for(chain, 5)
        expected = 1.0 - 0.4 ** np.arange(6)
        np.testing.assert_allclose(table.a, [expected, expected], atol=1e-12)

    def test_table_is_monotone(self, service, build):
        """Test que la tabla es no decreciente en t y está en [0, 1]"""
        for spec in ('hypercube(2, 0.5)', 'random_ergodic(4, 3)', 'three_state_negative_control'):
            table = service.table_for(build(spec), 12)
            assert np.all(np.diff(table.a, axis=1) >= 0)
            assert np.all((table.a >= 0) & (table.a <= 1))

    def test_zero_stationary_mass_is_domain_error(self, service, build):
        """Test que la cadena con estado transitorio no admite SST"""
        with pytest.raises(DomainError):
            service.table_for(build('example2'), 3)

    def test_negative_horizon(self, service, build, chain_service):
        chain = build('two_state(0.25)')
        with pytest.raises(ValidationError):
            service.separation_table(chain, chain_service.stationary_distribution(chain), -1)


class TestApplicability:
    """Tests del veredicto de aplicabilidad"""

    def test_circulant_is_applicable(self, service, build):
        verdict = service.check_sst_applicability(build('circulant(3)'), 10)
        assert verdict.structural_pass
        assert verdict.operative_pass
        assert verdict.verdict == 'applicable'

    def test_weather_is_operatively_applicable(self, service, chain_service):
        """Test de tabla independiente de x0 sin pi uniforme"""
        chain = chain_service.build_transition_matrix([[0.9, 0.1], [0.5, 0.5]])
        verdict = service.check_sst_applicability(chain, 10)
        assert not verdict.structural_pass
        assert verdict.operative_pass

    def test_negative_control_is_not_applicable(self, service, build):
        """Test que pi uniforme no basta: a_1 depende de x0"""
        verdict = service.check_sst_applicability(build('three_state_negative_control'), 1)
        assert verdict.structural_pass
        assert not verdict.operative_pass
        assert verdict.max_spread == pytest.approx(0.75)
        assert verdict.verdict == 'not applicable'

    def test_to_dict_includes_verdict(self, service, build):
        data = service.check_sst_applicability(build('circulant(3)'), 2).to_dict()
        assert data['verdict'] == 'applicable'
        assert len(data['spreads']) == 3


class TestHazards:
    """Tests de la tabla de riesgo SST"""

    def test_initial_position_is_always_erased(self, service, build):
        hazards = service.hazard_table(build('circulant(3)'), 4)
        assert np.all(hazards[0] == 0.0)

    def test_two_state_hazards(self, service, build):
        """Test de riesgo 1/3 al permanecer y 1 al cambiar de estado"""
        hazards = service.hazard_table(build('two_state(0.25)'), 5)
        for t in range(1, 6):
            np.testing.assert_allclose(hazards[t], [[1 / 3, 1.0], [1.0, 1 / 3]], atol=1e-10)

    def test_rank_one_stops_at_one(self, service, build):
        """Test que filas iguales paran en t = 1"""
        chain = build('rank_one')
        hazards = service.hazard_table(chain, 3)
        np.testing.assert_allclose(hazards[1], 1.0)
        law = service.sst_stop_law(chain, Trajectory([0, 2, 1, 1]), service.table_for(chain, 3))
        assert law.atom(1) == pytest.approx(1.0)

    def test_hazards_in_unit_interval(self, service, build):
        for spec in ('hypercube(3, 0.5)', 'random_ergodic(3, 5)', 'three_state_negative_control'):
            hazards = service.hazard_table(build(spec), 8)
            assert np.all((hazards >= 0) & (hazards <= 1))


class TestStopLaw:
    """Tests de la ley de tau y la conjunta (tau, X_tau)"""

    def test_stop_law_sums_to_one(self, service, build):
        chain = build('hypercube(2, 0.5)')
        table = service.table_for(chain, 4)
        law = service.sst_stop_law(chain, Trajectory([0, 1, 1, 3, 2]), table)
        assert law.total() == pytest.approx(1.0)
        assert law.atom(0) == 0.0

    def test_mixture_of_stop_laws_gives_separation_table(self, service, build, chain_service):
        """Test que P(tau <= t | x0) = a_t mezclando sobre trayectorias"""
        chain = build('two_state(0.25)')
        horizon = 4
        table = service.table_for(chain, horizon)
        hazards = service.hazard_table(chain, horizon, table)
        paths, probabilities = chain_service.enumerate_paths(chain, 0, horizon)
        mixture = probabilities @ service.window_laws(hazards, paths)
        np.testing.assert_allclose(np.cumsum(mixture)[:horizon + 1], table.a[0], atol=1e-12)

    @pytest.mark.parametrize('entries', [
        [[0.75, 0.25], [0.25, 0.75]],
        [[0.9, 0.1], [0.5, 0.5]],
    ])
    def test_joint_factorizes_as_stationary_times_increment(self, service, chain_service, entries):
        """Test P(tau = t, X_tau = y | x0) = pi(y) (a_t - a_{t-1})"""
        chain = chain_service.build_transition_matrix(entries)
        horizon = 5
        table = service.table_for(chain, horizon)
        pi = chain_service.stationary_distribution(chain).weights
        for initial in range(2):
            joint, remainder = service.stop_pair_joint(chain, horizon, initial, table)
            increments = table.increments()[initial]
            np.testing.assert_allclose(joint, increments[:, None] * pi[None, :], atol=1e-10)
            assert remainder == pytest.approx(1.0 - table.a[initial][horizon], abs=1e-12)


class TestSampling:
    """Tests de muestreo del mecanismo SST"""

    def test_sample_redaction_prefix_invariant(self, service, build):
        chain = build('circulant(3)')
        table = service.table_for(chain, 6)
        trajectory = Trajectory([0, 1, 1, 2, 0, 0, 1])
        for stream in range(30):
            redaction = service.sample_sst_redaction(chain, trajectory, table, RngStream(17, stream))
            assert 1 <= redaction.tau <= 7
            assert redaction.released.window_length == redaction.tau
            assert redaction.released.matches(trajectory)

    def test_sample_redaction_is_reproducible(self, service, build):
        chain = build('hypercube(2, 0.5)')
        table = service.table_for(chain, 5)
        trajectory = Trajectory([0, 0, 1, 1, 3, 3])
        first = service.sample_sst_redaction(chain, trajectory, table, RngStream(4))
        second = service.sample_sst_redaction(chain, trajectory, table, RngStream(4))
        assert first.tau == second.tau

    def test_short_table_is_rejected(self, service, build):
        chain = build('circulant(3)')
        with pytest.raises(ValidationError):
            service.sample_sst_redaction(chain, Trajectory([0, 1, 2]), service.table_for(chain, 1), RngStream(1))

    def test_empirical_stop_distribution_is_geometric(self, service, build):
        """Test P(tau = 1) = 1/2 y P(tau = 2) = 1/4 dentro de 3 sigma"""
        trials = 100_000
        _, windows = service.simulate_windows(build('two_state(0.25)'), 6, trials, 0, RngStream(2718))
        for t, expected in ((1, 0.5), (2, 0.25)):
            sigma = np.sqrt(expected * (1 - expected) / trials)
            assert abs(np.mean(windows == t) - expected) < 3 * sigma


class TestDistortion:
    """Tests de la distorsión exacta SST"""

    def test_two_state_distortion(self, service, build):
        assert service.sst_distortion(build('two_state(0.25)'), 0, 10) == pytest.approx(1.9990234375, abs=1e-12)

    def test_weather_distortion(self, service, chain_service):
        chain = chain_service.build_transition_matrix([[0.9, 0.1], [0.5, 0.5]])
        assert service.sst_distortion(chain, 1, 3) == pytest.approx(1.624, abs=1e-12)

    def test_horizon_zero(self, service, build):
        assert service.sst_distortion(build('circulant(3)'), 0, 0) == 1.0

    def test_matches_mixture_of_stop_laws(self, service, build, chain_service):
        """Test que la fórmula cerrada coincide con E[min(tau, N+1)] por enumeración"""
        chain = build('hypercube(2, 0.5)')
        horizon = 4
        table = service.table_for(chain, horizon)
        hazards = service.hazard_table(chain, horizon, table)
        paths, probabilities = chain_service.enumerate_paths(chain, 2, horizon)
        laws = service.window_laws(hazards, paths)
        erasures = np.minimum(np.arange(horizon + 2), horizon + 1)
        expected = float(probabilities @ laws @ erasures)
        assert service.sst_distortion(chain, 2, horizon) == pytest.approx(expected, abs=1e-12)

    def test_initial_state_out_of_range(self, service, build):
        with pytest.raises(ValidationError):
            service.sst_distortion(build('circulant(3)'), 5, 2)
