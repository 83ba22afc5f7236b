"""Unit testing the estimation of the bound constants."""

import unittest

import numpy as np
import pytest

from tests.unit.helpers import PARAMS, SMALL_GRID
from triphase.coupling.constants import ConstantsReport, derive_report, \
    estimate_constants, regularity_ratio
from triphase.errors import ConfigurationError, DomainError
from triphase.spectral.engine import SpectralTri, bulk_to_spectral
from triphase.state.params import PhysParams


class TestConstantsReport(unittest.TestCase):
  """Testing the derived thresholds and their serialization."""

  def test_must_derive_thresholds(self):
    report = derive_report(0.5, (1.0, 2.0, 3.0), PARAMS)
    factor = 1.0 * (1 + PARAMS.kappa_a) + 2.0 * (1 + PARAMS.kappa_b)

    assert report.alpha_0 == pytest.approx(8 * 0.5 * 3.0)
    assert report.beta_0 == pytest.approx(64 * 0.25 * factor ** 2)
    assert report.c_star_big > 0
    assert report.leading_factor > 0

  def test_must_compare_thresholds_strictly(self):
    report = derive_report(0.1, (0.1, 0.1, 0.1), PARAMS)

    assert report.thresholds_met(PARAMS)
    assert not report.thresholds_met(PhysParams(alpha_s=0.01))

  def test_must_parse_its_own_text(self):
    report = derive_report(0.3, (1.5, 2.5, 0.7), PARAMS, window_t=0.5,
                           trials=8, maximizer=3)

    assert ConstantsReport.from_text(report.to_text()) == report

  def test_must_throw_configuration_error_when_entry_is_unknown(self):
    with pytest.raises(ConfigurationError, match='line 1: unexpected entry'):
      ConstantsReport.from_text('gamma = 1.0\n')

  def test_must_throw_configuration_error_when_keys_are_missing(self):
    with pytest.raises(ConfigurationError, match='missing keys'):
      ConstantsReport.from_text('c_star = 1.0\n')


class TestEstimation(unittest.TestCase):
  """Testing the random probes."""

  def test_must_be_reproducible_for_a_seed(self):
    first = estimate_constants(SMALL_GRID, PARAMS, trials=2, seed=5, steps=4)
    second = estimate_constants(SMALL_GRID, PARAMS, trials=2, seed=5, steps=4)

    assert first == second
    assert first.c_star > 0
    assert min(first.k_a, first.k_b, first.k_s) > 0
    assert first.trials == 2
    assert first.window_t == pytest.approx(SMALL_GRID.t_end)

  def test_must_throw_domain_error_when_trials_are_missing(self):
    with pytest.raises(DomainError, match='trials must be at least 1'):
      estimate_constants(SMALL_GRID, PARAMS, trials=0)

  def test_must_throw_domain_error_when_window_is_too_long(self):
    with pytest.raises(DomainError, match='window_t must be in'):
      estimate_constants(SMALL_GRID, PARAMS, trials=1, window_t=2.0)

  def test_must_bound_the_regularity_ratio(self):
    grid = SMALL_GRID
    x1, x2, z = grid.mesh()
    bump = np.exp(-(x1 ** 2 + x2 ** 2 + (z - 2.0) ** 2))
    zero = np.zeros(grid.bulk_shape)
    shape = SpectralTri(bulk_to_spectral(bump, grid), zero,
                        np.zeros(grid.surface_shape), grid)
    ratio = regularity_ratio(shape, 'a', 1.0, 3.0, PARAMS, 0.5, 200)

    assert 0 < ratio <= 2.1

  def test_must_throw_domain_error_when_component_is_unknown(self):
    shape = SpectralTri(np.zeros(SMALL_GRID.bulk_shape),
                        np.zeros(SMALL_GRID.bulk_shape),
                        np.zeros(SMALL_GRID.surface_shape), SMALL_GRID)
    with pytest.raises(DomainError, match='component must be one of'):
      regularity_ratio(shape, 'c', 1.0, 0.0, PARAMS, 0.5, 10)
