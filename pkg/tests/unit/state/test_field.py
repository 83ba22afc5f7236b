"""Unit testing the state triples and the H inner product."""

import math
import unittest

import numpy as np
import pytest

from tests.unit.helpers import SMALL_GRID, random_field
from triphase.errors import ConfigurationError
from triphase.state.field import TriField, h_inner, h_norm, zeros


class TestTriField(unittest.TestCase):
  """Testing the state triples."""

  def test_must_throw_configuration_error_when_shape_is_wrong(self):
    with pytest.raises(ConfigurationError, match='f_s must have shape'):
      TriField(np.zeros(SMALL_GRID.bulk_shape), np.zeros(SMALL_GRID.bulk_shape),
               np.zeros((3, 3)), SMALL_GRID)

  def test_must_throw_configuration_error_when_entries_are_not_finite(self):
    f_a = np.zeros(SMALL_GRID.bulk_shape)
    f_a[0, 0, 0] = np.inf
    with pytest.raises(ConfigurationError, match='non-finite'):
      TriField(f_a, np.zeros(SMALL_GRID.bulk_shape),
               np.zeros(SMALL_GRID.surface_shape), SMALL_GRID)

  def test_must_freeze_the_arrays(self):
    f = random_field()

    with pytest.raises(ValueError):
      f.f_a[0, 0, 0] = 1.0

  def test_must_throw_configuration_error_when_grids_differ(self):
    other = zeros(SMALL_GRID.with_changes(n_z=4))
    with pytest.raises(ConfigurationError, match='different grids'):
      random_field() + other

  def test_must_support_linear_combinations(self):
    f, g = random_field(seed=1), random_field(seed=2)
    combo = 2.0 * f - g

    np.testing.assert_allclose(combo.f_a, 2 * f.f_a - g.f_a)
    np.testing.assert_allclose((-f).f_s, -f.f_s)


class TestHInner(unittest.TestCase):
  """Testing the quadrature of the H inner product."""

  def test_must_weight_the_surface_component(self):
    grid = SMALL_GRID
    f = TriField(np.zeros(grid.bulk_shape), np.zeros(grid.bulk_shape),
                 np.ones(grid.surface_shape), grid)

    assert h_norm(f) == pytest.approx(grid.l_h)
    assert h_norm(f.with_weight(4.0)) == pytest.approx(2 * grid.l_h)

  def test_must_integrate_bulk_with_interior_nodes(self):
    grid = SMALL_GRID
    f = TriField(np.ones(grid.bulk_shape), np.zeros(grid.bulk_shape),
                 np.zeros(grid.surface_shape), grid)

    assert h_inner(f, f) == pytest.approx(grid.l_h ** 2 * grid.n_z * grid.dz)

  def test_must_be_symmetric_and_satisfy_cauchy_schwarz(self):
    f, g = random_field(seed=3), random_field(seed=4)

    assert h_inner(f, g) == pytest.approx(h_inner(g, f))
    assert abs(h_inner(f, g)) <= h_norm(f) * h_norm(g)
    assert h_norm(zeros(SMALL_GRID)) == 0.0

  def test_must_throw_configuration_error_when_surface_weights_differ(self):
    f = random_field()
    with pytest.raises(ConfigurationError, match='surface weights differ'):
      h_inner(f, f.with_weight(2.0))

  def test_must_be_homogeneous(self):
    f = random_field(seed=5)

    assert h_norm(3.0 * f) == pytest.approx(3.0 * h_norm(f))
    assert math.isfinite(h_norm(f))
