"""
Tests para el servicio de análisis de distorsión
"""
import sys
import os

import numpy as np
import pytest

# Agregar el directorio padre al path para importar la app
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from app.exceptions.custom_exceptions import BoundUndefinedError, NumericError, ValidationError
from app.models.reports import CSV_COLUMNS, DistortionReport, SpectralBound
from app.repositories.fixture_repository import FixtureRepository
from app.services.chain_service import ChainService
from app.services.distortion_service import DistortionService
from app.utils.rng import RngStream


@pytest.fixture
def chain_service():
    return ChainService()


@pytest.fixture
def service(chain_service):
    """Servicio de distorsión compartiendo el servicio de cadenas"""
    return DistortionService(chain_service)


@pytest.fixture
def build(chain_service):
    fixtures = FixtureRepository()

    def _build(spec):
        labels, matrix = fixtures.get(spec)
        return chain_service.build_transition_matrix(matrix, labels)
    return _build


@pytest.fixture
def weather(chain_service):
    return chain_service.build_transition_matrix([[0.9, 0.1], [0.5, 0.5]], ['sunny', 'rainy'])


class TestSpectralBound:
    """Tests de la cota espectral"""

    def test_two_state(self, service, build):
        """Test |X| / (2 sqrt(pi_min) (1 - sqrt(lambda))) con lambda = 1/4"""
        bound = service.spectral_bound(build('two_state(0.25)'))
        assert bound.bound == pytest.approx(2.828427, abs=1e-6)
        assert bound.lambda_ == pytest.approx(0.25)
        assert bound.pi_min == pytest.approx(0.5)
        assert bound.to_dict()['n_states'] == 2

    def test_rank_one(self, service, build):
        bound = service.spectral_bound(build('rank_one([0.5, 0.5])'))
        assert bound.bound == pytest.approx(1.41421, abs=1e-5)

    def test_reducible_chain(self, service, build):
        with pytest.raises(BoundUndefinedError):
            service.spectral_bound(build('example2'))

    def test_periodic_chain(self, service, chain_service):
        with pytest.raises(BoundUndefinedError):
            service.spectral_bound(chain_service.build_transition_matrix([[0, 1], [1, 0]]))

    @pytest.mark.parametrize('spec', [
        'two_state(0.25)', 'circulant(3)', 'hypercube(3, 0.5)', 'rank_one',
        'random_ergodic(4, 7)', 'three_state_negative_control',
    ])
    def test_bound_dominates_exact_distortion(self, service, build, spec):
        """Test sum_{t<=100} (1 - alpha_t) <= cota"""
        chain = build(spec)
        assert service.smr.smr_distortion(chain, 100) <= service.spectral_bound(chain).bound + 1e-10

    @pytest.mark.parametrize('spec', ['two_state(0.25)', 'circulant(3)', 'hypercube(2, 0.5)', 'random_ergodic(3, 1)'])
    def test_termwise_inequalities(self, service, build, spec):
        """Test 1 - alpha_t <= |X| TV <= término espectral para cada t"""
        terms = service.spectral_terms(build(spec), 30)
        assert list(terms.columns) == ['t', 'one_minus_alpha', 'tv_term', 'spectral_term']
        assert np.all(terms['one_minus_alpha'] <= terms['tv_term'] + 1e-12)
        assert np.all(terms['tv_term'] <= terms['spectral_term'] + 1e-12)

    def test_termwise_inequalities_non_reversible(self, service, weather):
        terms = service.spectral_terms(weather, 20)
        assert len(terms) == 21
        assert np.all(terms['tv_term'] <= terms['spectral_term'] + 1e-12)


class TestDistortionSweep:
    """Tests del barrido de horizontes"""

    def test_example2_exact_curve(self, service, build):
        """Test de la curva exacta sin cota ni curva SST (pi con ceros)"""
        report = service.distortion_sweep(build('example2'), service.smr, [10, 3, 50])
        assert report.horizons == [3, 10, 50]
        assert report.exact_smr[0] == pytest.approx(1.875)
        assert report.exact_smr[1] == pytest.approx(1.9990234375, abs=1e-12)
        assert report.exact_sst == [None, None, None]
        assert report.spectral_bound is None
        assert report.empirical_mean == [None, None, None]

    def test_curve_is_monotone_and_saturates(self, service, build):
        report = service.distortion_sweep(build('two_state(0.25)'), service.smr, [1, 2, 5, 10, 20, 50, 100])
        assert np.all(np.diff(report.exact_smr) >= 0)
        assert report.saturation_gap <= 1e-12
        assert report.exact_smr[-1] <= report.spectral_bound.bound

    @pytest.mark.parametrize('spec', [
        'two_state(0.25)', 'circulant(3)', 'rank_one', 'hypercube(2, 0.5)',
        'random_ergodic(3, 1)', 'random_ergodic(4, 7)', 'three_state_negative_control',
    ])
    def test_saturation_gap_on_fast_mixing_chains(self, service, build, spec):
        report = service.distortion_sweep(build(spec), service.smr, [1, 2, 5, 10, 20, 50, 100])
        assert report.spectral_bound.lambda_ <= 0.9
        assert report.saturation_gap <= 1e-9

    def test_saturation_gap_weather(self, service, weather):
        assert service.distortion_sweep(weather, service.smr, [100]).saturation_gap <= 1e-9

    def test_saturation_gap_hypercube_three_exceeds_threshold(self, service, build):
        """
        Test del cubo perezoso de dimensión 3: 1 - alpha_t = 3 (2/3)^t - 3 (1/3)^t,
        por lo que la brecha entre N = 50 y N = 100 es ~9.4e-9 aun con lambda = 4/9
        """
        report = service.distortion_sweep(build('hypercube(3, 0.5)'), service.smr, [50, 100])
        t = np.arange(51, 101)
        expected = float(np.sum(3.0 * (2.0 / 3.0) ** t - 3.0 * (1.0 / 3.0) ** t))
        assert report.spectral_bound.lambda_ == pytest.approx(4 / 9, abs=1e-10)
        assert report.saturation_gap == pytest.approx(expected, rel=1e-4)
        assert 1e-9 < report.saturation_gap < 1e-8
        assert report.saturation_gap <= service.spectral_terms(build('hypercube(3, 0.5)'), 100)[
            'spectral_term'].iloc[51:].sum()

    @pytest.mark.parametrize('spec', [
        'circulant(3)', 'two_state(0.25)', 'circulant(4, [0.5, 0.25, 0.25])',
        'hypercube(2, 0.5)', 'hypercube(3, 0.5)',
    ])
    def test_sst_matches_smr_when_applicable(self, service, build, spec):
        """Test que con tabla independiente de x0 ambas curvas coinciden"""
        report = service.distortion_sweep(build(spec), service.smr, list(range(1, 11)))
        np.testing.assert_allclose(report.exact_sst, report.exact_smr, atol=1e-10)

    def test_sst_curve_omitted_for_negative_control(self, service, build):
        report = service.distortion_sweep(build('three_state_negative_control'), service.smr, [1, 2])
        assert report.exact_sst == [None, None]

    def test_empty_grid(self, service, build):
        with pytest.raises(ValidationError):
            service.distortion_sweep(build('example2'), service.smr, [])

    def test_to_frame_columns(self, service, build):
        frame = service.distortion_sweep(build('two_state(0.25)'), service.smr, [1, 2]).to_frame()
        assert list(frame.columns) == CSV_COLUMNS
        assert frame['spectral_bound'].iloc[0] == pytest.approx(2.828427, abs=1e-6)

    def test_with_empirical_points(self, service, build):
        report = service.distortion_sweep(
            build('two_state(0.25)'), service.smr, [2, 4], trials=20_000, rng=RngStream(12)
        )
        assert all(mean is not None for mean in report.empirical_mean)
        assert all(width > 0 for width in report.ci_halfwidth)

    def test_empirical_points_use_one_stream_per_horizon(self, service, build, mocker):
        """Test que cada horizonte se muestrea con rng.derive(N)"""
        chain = build('two_state(0.25)')
        spy = mocker.spy(RngStream, 'derive')
        report = service.distortion_sweep(chain, service.smr, [4, 2], trials=2_000, rng=RngStream(12))
        assert sorted(call.args[1] for call in spy.call_args_list) == [2, 4]
        alone = service.empirical_distortion(chain, service.smr, 4, 2_000, RngStream(12, 4))
        assert report.empirical_mean[1] == alone.mean

    def test_empirical_point_independent_of_grid(self, service, build):
        chain = build('hypercube(2, 0.5)')
        wide = service.distortion_sweep(chain, service.smr, [1, 3, 6], trials=2_000, rng=RngStream(5))
        narrow = service.distortion_sweep(chain, service.smr, [6], trials=2_000, rng=RngStream(5))
        assert wide.empirical_mean[-1] == narrow.empirical_mean[0]
        assert wide.ci_halfwidth[-1] == narrow.ci_halfwidth[0]

    def test_empirical_part_skipped_without_trials(self, service, build, mocker):
        simulate = mocker.patch.object(service, 'empirical_distortion')
        report = service.distortion_sweep(build('two_state(0.25)'), service.smr, [1, 2])
        simulate.assert_not_called()
        assert report.empirical_mean == [None, None]


class TestCheckReport:
    """Tests de las verificaciones de consistencia del barrido"""

    def test_non_monotone_curve(self, service):
        report = DistortionReport('smr', [1, 2], [1.5, 1.2], [None] * 2, [None] * 2, [None] * 2, None, 0.0)
        with pytest.raises(NumericError):
            service.check_report(report)

    def test_curve_above_bound(self, service):
        bound = SpectralBound(1.0, 0.1, 0.5, 2)
        report = DistortionReport('smr', [1, 2], [1.5, 1.7], [None] * 2, [None] * 2, [None] * 2, bound, 0.2)
        with pytest.raises(NumericError):
            service.check_report(report)


class TestEmpiricalDistortion:
    """Tests de la confirmación Monte-Carlo"""

    def test_two_state_within_interval(self, service, build):
        """Test que la media empírica confirma la distorsión exacta"""
        estimate = service.empirical_distortion(build('two_state(0.25)'), service.smr, 10, 100_000, RngStream(2025))
        assert abs(estimate.mean - 1.9990234375) <= estimate.half_width
        assert estimate.confidence == 0.99

    def test_sst_from_fixed_start(self, service, build):
        estimate = service.empirical_distortion(build('circulant(3)'), service.sst, 8, 50_000, RngStream(3), start=0)
        exact = service.sst.sst_distortion(build('circulant(3)'), 0, 8)
        assert abs(estimate.mean - exact) <= estimate.half_width

    def test_rank_one_is_exact(self, service, build):
        """Test que con liberación determinista en t = 1 no hay varianza"""
        estimate = service.empirical_distortion(build('rank_one'), service.smr, 5, 1_000, RngStream(1))
        assert estimate.mean == 1.0
        assert estimate.half_width == 0.0
        assert estimate.contains(1.0)

    def test_same_seed_same_estimate(self, service, build):
        chain = build('hypercube(2, 0.5)')
        first = service.empirical_distortion(chain, service.smr, 6, 5_000, RngStream(44))
        second = service.empirical_distortion(chain, service.smr, 6, 5_000, RngStream(44))
        assert first.mean == second.mean
        assert first.half_width == second.half_width

    def test_minimum_trials(self, service, build):
        with pytest.raises(ValidationError):
            service.empirical_distortion(build('example2'), service.smr, 3, 50, RngStream(1))
