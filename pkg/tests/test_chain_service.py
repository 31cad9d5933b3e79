"""
Tests para el servicio de cadenas de Markov
"""
import sys
import os
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

# Agregar el directorio padre al path para importar la app
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from app.exceptions.custom_exceptions import DomainError, EnumerationGuardError, ValidationError
from app.models.chain import ProbabilityVector
from app.repositories.fixture_repository import FixtureRepository
from app.services.chain_service import ChainService
from app.utils.rng import RngStream


@pytest.fixture
def service():
    """Servicio de cadenas con la configuración por defecto"""
    return ChainService()


@pytest.fixture
def symmetric(service):
    return service.build_transition_matrix([[0.75, 0.25], [0.25, 0.75]])


@pytest.fixture
def example2(service):
    return service.build_transition_matrix([[0.5, 0.5], [0.0, 1.0]])


@pytest.fixture
def weather(service):
    return service.build_transition_matrix([[0.9, 0.1], [0.5, 0.5]], ['sunny', 'rainy'])


class TestBuildTransitionMatrix:
    """Tests de construcción y validación estructural"""

    def test_labels_are_preserved(self, weather):
        """Test que las etiquetas se conservan"""
        assert weather.labels == ['sunny', 'rainy']
        assert weather.state_space.index_of('rainy') == 1

    def test_default_labels(self, symmetric):
        """Test de etiquetas por defecto '0', '1', ..."""
        assert symmetric.labels == ['0', '1']

    def test_row_sum_beyond_tolerance_names_row(self, service):
        """Test que una fila que no suma 1 produce un error que la nombra"""
        with pytest.raises(ValidationError, match='fila 1'):
            service.build_transition_matrix([[0.5, 0.5], [0.4, 0.5]])

    def test_negative_entry_names_row(self, service):
        """Test que una entrada negativa se reporta con su fila"""
        with pytest.raises(ValidationError, match='fila 0'):
            service.build_transition_matrix([[1.2, -0.2], [0.5, 0.5]])

    def test_non_square_matrix(self, service):
        """Test de dimensión inconsistente"""
        with pytest.raises(ValidationError, match='Dimensión inconsistente'):
            service.build_transition_matrix([[0.5, 0.5]])

    def test_label_count_mismatch(self, service):
        """Test de etiquetas y filas en distinto número"""
        with pytest.raises(ValidationError, match='Dimensión inconsistente'):
            service.build_transition_matrix([[1.0]], ['a', 'b'])

    def test_small_deviation_is_renormalized(self, service):
        """Test que desviaciones dentro de la tolerancia se renormalizan"""
        chain = service.build_transition_matrix([[0.5, 0.5 + 5e-10], [0.3, 0.7]])
        np.testing.assert_allclose(chain.entries.sum(axis=1), 1.0, atol=1e-15)

    def test_entries_are_read_only(self, symmetric):
        """Test que la matriz es inmutable"""
        with pytest.raises(ValueError):
            symmetric.entries[0, 0] = 0.0


class TestValidateChain:
    """Tests de diagnóstico estructural"""

    def test_symmetric_chain(self, service, symmetric):
        """Test de cadena simétrica positiva"""
        diagnostics = service.validate_chain(symmetric)
        assert diagnostics.irreducible
        assert diagnostics.aperiodic
        assert diagnostics.doubly_stochastic
        assert diagnostics.ergodic

    def test_example2_is_reducible(self, service, example2):
        """Test que el estado absorbente hace la cadena reducible"""
        diagnostics = service.validate_chain(example2)
        assert not diagnostics.irreducible
        assert not diagnostics.stationary_support_full
        assert diagnostics.warnings

    def test_two_cycle_has_period_two(self, service):
        """Test del ciclo de dos estados"""
        diagnostics = service.validate_chain(service.build_transition_matrix([[0, 1], [1, 0]]))
        assert diagnostics.irreducible
        assert diagnostics.period == 2
        assert not diagnostics.aperiodic
        assert not diagnostics.ergodic

    def test_weather_is_not_doubly_stochastic(self, service, weather):
        """Test de cadena ergódica no doblemente estocástica"""
        diagnostics = service.validate_chain(weather)
        assert diagnostics.ergodic
        assert not diagnostics.doubly_stochastic

    def test_reversibility(self, service, symmetric, weather):
        """Test del balance detallado pi(x) P(x, y) = pi(y) P(y, x)"""
        assert service.validate_chain(symmetric).reversible
        assert service.validate_chain(weather).reversible
        drifting = service.build_transition_matrix([[0, 0.9, 0.1], [0.1, 0, 0.9], [0.9, 0.1, 0]])
        diagnostics = service.validate_chain(drifting)
        assert diagnostics.doubly_stochastic
        assert not diagnostics.reversible
        assert diagnostics.to_dict()["reversible"] is False


class TestLinearAlgebra:
    """Tests de potencias, distribución estacionaria e inversión temporal"""

    def test_power_zero_is_identity(self, service, weather):
        """Test P^0 = I"""
        np.testing.assert_array_equal(service.matrix_power(weather, 0), np.eye(2))

    def test_power_of_example2(self, service, example2):
        """Test P^2 de la cadena de ejemplo"""
        np.testing.assert_allclose(service.matrix_power(example2, 2), [[0.25, 0.75], [0.0, 1.0]], atol=1e-15)

    def test_power_of_symmetric_chain(self, service, symmetric):
        """Test de la forma cerrada 1/2 + 1/2 (1 - 2p)^t"""
        np.testing.assert_allclose(service.matrix_power(symmetric, 2), [[0.625, 0.375], [0.375, 0.625]])

    def test_negative_power_is_rejected(self, service, symmetric):
        """Test que t negativo es un error de validación"""
        with pytest.raises(ValidationError):
            service.matrix_power(symmetric, -1)

    def test_concurrent_powers_match_iterated_products(self, service):
        """Test que llamadas concurrentes a matrix_power no corrompen la memoización"""
        labels, matrix = FixtureRepository().get('random_ergodic(300, 4)')
        for _ in range(5):
            chain = service.build_transition_matrix(matrix, labels)
            barrier = threading.Barrier(8)

            def compute(t):
                barrier.wait()
                return service.matrix_power(chain, t)

            with ThreadPoolExecutor(max_workers=8) as pool:
                results = list(pool.map(compute, [12, 7, 12, 3, 12, 9, 12, 5]))

            expected = np.eye(300)
            products = [expected]
            for _ in range(12):
                expected = expected @ chain.entries
                products.append(expected)
            for t, result in zip([12, 7, 12, 3, 12, 9, 12, 5], results):
                np.testing.assert_allclose(result, products[t], atol=1e-12)
            for t in range(13):
                np.testing.assert_allclose(chain.power(t), products[t], atol=1e-12)
            assert chain.power(13).shape == (300, 300)

    def test_power_rows_sum_to_one(self, service, weather):
        """Test que las filas de P^t suman 1"""
        for t in range(1, 30):
            np.testing.assert_allclose(service.matrix_power(weather, t).sum(axis=1), 1.0, atol=1e-10 * t)

    @pytest.mark.parametrize('entries,expected', [
        ([[0.75, 0.25], [0.25, 0.75]], [0.5, 0.5]),
        ([[0.5, 0.5], [0.0, 1.0]], [0.0, 1.0]),
        ([[0.9, 0.1], [0.5, 0.5]], [5 / 6, 1 / 6]),
    ])
    def test_stationary_distribution(self, service, entries, expected):
        """Test de la distribución estacionaria por solución directa"""
        chain = service.build_transition_matrix(entries)
        stationary = service.stationary_distribution(chain)
        np.testing.assert_allclose(stationary.weights, expected, atol=1e-12)
        np.testing.assert_allclose(stationary.weights @ chain.entries, stationary.weights, atol=1e-10)
        assert stationary.unique == bool(np.all(np.asarray(entries) > 0))

    def test_reducible_chain_is_flagged_not_unique(self, service, example2):
        """Test que una cadena reducible con una sola clase cerrada se marca como no única"""
        stationary = service.stationary_distribution(example2)
        np.testing.assert_allclose(stationary.weights, [0.0, 1.0], atol=1e-12)
        assert not stationary.unique
        assert not service.validate_chain(example2).stationary_unique

    def test_stationary_distribution_not_unique(self, service):
        """Test que dos clases cerradas marcan la distribución como no única"""
        stationary = service.stationary_distribution(service.build_transition_matrix([[1, 0], [0, 1]]))
        assert not stationary.unique
        assert stationary.weights.sum() == pytest.approx(1.0)

    def test_time_reversal_of_reversible_chain(self, service, weather):
        """Test que una cadena reversible es su propia inversión"""
        reversal = service.time_reversal(weather, service.stationary_distribution(weather))
        np.testing.assert_allclose(reversal, weather.entries, atol=1e-10)
        np.testing.assert_allclose(reversal.sum(axis=1), 1.0, atol=1e-10)

    def test_time_reversal_rows_sum_to_one(self, service):
        """Test que la inversión de una cadena no reversible es estocástica"""
        chain = service.build_transition_matrix([[0.1, 0.6, 0.3], [0.5, 0.2, 0.3], [0.2, 0.2, 0.6]])
        reversal = service.time_reversal(chain, service.stationary_distribution(chain))
        np.testing.assert_allclose(reversal.sum(axis=1), 1.0, atol=1e-10)

    def test_time_reversal_rejects_zero_mass(self, service, example2):
        """Test que masa estacionaria cero es un error de dominio que nombra el estado"""
        with pytest.raises(DomainError, match="'0'"):
            service.time_reversal(example2, service.stationary_distribution(example2))

    def test_second_eigenvalue_two_state(self, service, symmetric):
        """Test lambda = (1 - 2p)^2 = 0.25"""
        assert service.second_eigenvalue_of_reversiblization(symmetric) == pytest.approx(0.25, abs=1e-12)

    def test_second_eigenvalue_rank_one(self, service):
        """Test lambda = 0 para filas iguales"""
        chain = service.build_transition_matrix([[0.2, 0.3, 0.5]] * 3)
        assert service.second_eigenvalue_of_reversiblization(chain) == pytest.approx(0.0, abs=1e-12)

    def test_second_eigenvalue_in_unit_interval(self, service):
        """Test lambda en [0, 1) para cadenas ergódicas"""
        chain = service.build_transition_matrix([[0.1, 0.6, 0.3], [0.5, 0.2, 0.3], [0.2, 0.2, 0.6]])
        value = service.second_eigenvalue_of_reversiblization(chain)
        assert 0.0 <= value < 1.0


class TestTotalVariation:
    """Tests de la distancia de variación total"""

    def test_identity(self, service):
        assert service.total_variation([0.3, 0.7], [0.3, 0.7]) == 0.0

    def test_disjoint_support(self, service):
        assert service.total_variation([1, 0], [0, 1]) == 1.0

    def test_half_l1(self, service):
        assert service.total_variation(ProbabilityVector([0.75, 0.25]), [0.5, 0.5]) == pytest.approx(0.25)

    def test_length_mismatch(self, service):
        with pytest.raises(ValidationError):
            service.total_variation([1.0], [0.5, 0.5])

    def test_triangle_inequality_and_symmetry(self, service):
        """Test de simetría y desigualdad triangular sobre ternas aleatorias"""
        generator = RngStream(11).generator
        for _ in range(20):
            mu, nu, rho = generator.dirichlet(np.ones(4), size=3)
            assert service.total_variation(mu, nu) == pytest.approx(service.total_variation(nu, mu))
            assert service.total_variation(mu, rho) <= (
                service.total_variation(mu, nu) + service.total_variation(nu, rho) + 1e-15
            )


class TestSampling:
    """Tests de muestreo de trayectorias"""

    def test_same_seed_same_trajectory(self, service, weather):
        """Test de determinismo dada la semilla y el flujo"""
        first = service.sample_trajectory(weather, ProbabilityVector([0.5, 0.5]), 20, RngStream(7, 3))
        second = service.sample_trajectory(weather, ProbabilityVector([0.5, 0.5]), 20, RngStream(7, 3))
        assert first.states == second.states

    def test_absorbing_state(self, service, example2):
        """Test que desde el estado absorbente la trayectoria es constante"""
        trajectory = service.sample_trajectory(example2, 1, 10, RngStream(1))
        assert trajectory.states == [1] * 11

    def test_horizon_zero(self, service, weather):
        assert service.sample_trajectory(weather, 0, 0, RngStream(1)).states == [0]

    def test_one_step_frequencies_match_rows(self, service, weather):
        """Test que las frecuencias de un paso coinciden con P dentro de 3 sigma"""
        trials = 100_000
        paths = service.sample_trajectories(weather, 0, 1, trials, RngStream(2024))
        frequency = np.mean(paths[:, 1] == 1)
        sigma = np.sqrt(0.1 * 0.9 / trials)
        assert abs(frequency - 0.1) < 3 * sigma

    def test_vectorized_sampling_shape(self, service, weather):
        paths = service.sample_trajectories(weather, np.array([0.5, 0.5]), 5, 100, RngStream(3))
        assert paths.shape == (100, 6)
        assert set(np.unique(paths)) <= {0, 1}


class TestEnumeration:
    """Tests de enumeración exacta de trayectorias"""

    def test_enumerate_example2(self, service, example2):
        """Test que solo se enumeran trayectorias de probabilidad positiva"""
        paths, probabilities = service.enumerate_paths(example2, 0, 2)
        found = {tuple(path): p for path, p in zip(paths.tolist(), probabilities)}
        assert found == pytest.approx({(0, 0, 0): 0.25, (0, 0, 1): 0.25, (0, 1, 1): 0.5})

    def test_probabilities_sum_to_one(self, service, weather):
        _, probabilities = service.enumerate_paths(weather, 1, 6)
        assert probabilities.sum() == pytest.approx(1.0, abs=1e-12)

    def test_path_probabilities(self, service, weather):
        probabilities = service.path_probabilities(weather, np.array([[0, 0, 1], [1, 0, 0]]))
        np.testing.assert_allclose(probabilities, [0.09, 0.45])

    def test_enumeration_guard(self, service, symmetric):
        """Test que el límite de enumeración reporta el conteo calculado"""
        with pytest.raises(EnumerationGuardError) as error:
            service.require_enumerable(symmetric, 30)
        assert error.value.count == 2 ** 31
