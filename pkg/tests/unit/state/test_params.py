"""Unit testing the physical parameters and the grid."""

import unittest

import numpy as np
import pytest

from triphase.errors import ConfigurationError, DomainError
from triphase.state.params import GridSpec, PhysParams, check_sign


class TestPhysParams(unittest.TestCase):
  """Testing the validation of the coefficients."""

  def test_must_throw_domain_error_when_alpha_s_is_not_positive(self):
    with pytest.raises(DomainError, match='alpha_s must be a positive real'):
      PhysParams(alpha_s=0.0)

  def test_must_throw_domain_error_when_beta_is_nan(self):
    with pytest.raises(DomainError, match='beta must be a positive real'):
      PhysParams(beta=float('nan'))

  def test_must_derive_kappa_s_from_diffusivity_and_mass(self):
    params = PhysParams(kappa_s_tilde=0.5, alpha_s=10.0)

    assert params.kappa_s == 5.0

  def test_must_pick_conductivity_by_sign(self):
    params = PhysParams(kappa_a=2.0, kappa_b=3.0)

    assert params.kappa('+') == 2.0
    assert params.kappa('-') == 3.0

  def test_must_throw_domain_error_when_sign_is_unknown(self):
    with pytest.raises(DomainError, match='sign must be'):
      check_sign('0')


class TestGridSpec(unittest.TestCase):
  """Testing the truncated grid."""

  def test_must_throw_configuration_error_when_n_h_is_odd(self):
    with pytest.raises(ConfigurationError, match='n_h must be an even'):
      GridSpec(n_h=7)

  def test_must_throw_configuration_error_when_t_end_is_no_multiple(self):
    with pytest.raises(ConfigurationError, match='t_end/dt must be an integer'):
      GridSpec(dt=0.3, t_end=1.0)

  def test_must_place_nodes_as_documented(self):
    grid = GridSpec(l_h=4.0, n_h=4, l_z=3.0, n_z=2, dt=0.5, t_end=1.0)

    np.testing.assert_allclose(grid.x, [-2.0, -1.0, 0.0, 1.0])
    np.testing.assert_allclose(grid.z, [1.0, 2.0])
    np.testing.assert_allclose(grid.k, [np.pi / 3, 2 * np.pi / 3])
    assert grid.bulk_shape == (4, 4, 2)
    assert grid.surface_shape == (4, 4)
    assert grid.n_steps == 2

  def test_must_return_time_grid_including_the_end(self):
    grid = GridSpec(dt=0.25, t_end=1.0)

    np.testing.assert_allclose(grid.times(), [0, 0.25, 0.5, 0.75, 1.0])
    np.testing.assert_allclose(grid.times(0.5), [0, 0.25, 0.5])

  def test_must_throw_configuration_error_when_times_end_off_grid(self):
    with pytest.raises(ConfigurationError, match='isn\'t a multiple'):
      GridSpec(dt=0.25, t_end=1.0).times(0.3)

  def test_must_keep_equality_and_hash_after_changes(self):
    grid = GridSpec()
    same = grid.with_changes(n_h=32)

    assert grid == same
    assert hash(grid) == hash(same)
    assert grid.with_changes(n_h=16) != grid
