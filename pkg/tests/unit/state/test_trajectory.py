"""Unit testing the trajectories and the X_T norm."""

import unittest

import numpy as np
import pytest

from tests.unit.helpers import PARAMS, SMALL_GRID, random_field
from triphase.errors import ConfigurationError, StateError
from triphase.state.field import h_norm, zeros
from triphase.state.trajectory import Trajectory, Variables, time_l2, xt_norm


class TestTrajectory(unittest.TestCase):
  """Testing the construction of trajectories."""

  def test_must_throw_configuration_error_when_times_dont_start_at_zero(self):
    with pytest.raises(ConfigurationError, match='times must start at 0'):
      Trajectory([1.0], [zeros(SMALL_GRID)])

  def test_must_throw_configuration_error_when_counts_differ(self):
    with pytest.raises(ConfigurationError, match='2 states for 3 times'):
      Trajectory([0.0, 0.1, 0.2], [zeros(SMALL_GRID)] * 2)

  def test_must_throw_configuration_error_when_times_are_not_uniform(self):
    with pytest.raises(ConfigurationError, match='uniformly spaced'):
      Trajectory([0.0, 0.1, 0.3], [zeros(SMALL_GRID)] * 3)

  def test_must_throw_state_error_when_derivatives_are_missing(self):
    traj = Trajectory([0.0], [zeros(SMALL_GRID)])
    with pytest.raises(StateError, match='no stored time derivatives'):
      traj.require_derivs()

  def test_must_expose_grid_and_step(self):
    traj = Trajectory([0.0, 0.5], [zeros(SMALL_GRID)] * 2,
                      variables=Variables.PHYSICAL)

    assert traj.grid == SMALL_GRID
    assert traj.dt == pytest.approx(0.5)
    assert len(traj) == 2
    assert traj.with_report('report').report == 'report'


class TestXTNorm(unittest.TestCase):
  """Testing the X_T norm."""

  def test_must_integrate_constant_values_exactly(self):
    times = np.linspace(0.0, 2.0, 5)

    assert time_l2([3.0] * 5, times) == pytest.approx(3.0 * np.sqrt(2.0))
    assert time_l2([3.0], times[:1]) == 0.0

  def test_must_reduce_to_the_supremum_for_a_single_time(self):
    f = random_field()
    traj = Trajectory([0.0], [f], [zeros(SMALL_GRID)])

    assert xt_norm(traj, PARAMS) == pytest.approx(h_norm(f))
