"""Unit testing the families of initial data."""

import tempfile
import unittest
from os.path import join

import numpy as np
import pytest

from tests.unit.helpers import PARAMS, SMALL_GRID
from triphase.coupling.lift import DEFAULT_TRACE_TOL, profile, \
    project_compatible, relative_trace_gap
from triphase.errors import ConfigurationError
from triphase.io.archive import write_trajectory
from triphase.oracle.fd import oracle_grid
from triphase.scenario import FILE, PURE_LIFT, SINGLE_MODE, Scenario, \
    build_initial_data
from triphase.state.trajectory import Trajectory


class TestScenario(unittest.TestCase):
  """Testing the construction of trace-compatible data."""

  def test_must_build_compatible_bumps(self):
    theta = build_initial_data(Scenario(), SMALL_GRID, PARAMS)

    assert relative_trace_gap(theta, PARAMS) <= DEFAULT_TRACE_TOL
    assert theta.f_s.max() == pytest.approx(1.0, rel=0.1)

  def test_must_sample_the_same_field_on_nested_grids(self):
    coarse = build_initial_data(Scenario(), SMALL_GRID, PARAMS)
    fine = build_initial_data(Scenario(), oracle_grid(SMALL_GRID, 2), PARAMS)

    np.testing.assert_allclose(fine.f_a[::2, ::2, 1::2], coarse.f_a,
                               rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(fine.f_b[::2, ::2, 1::2], coarse.f_b,
                               rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(fine.f_s[::2, ::2], coarse.f_s, rtol=1e-12,
                               atol=1e-14)

  def test_must_extend_the_surface_along_the_profile(self):
    theta = build_initial_data(Scenario(family=PURE_LIFT), SMALL_GRID, PARAMS)
    psi = profile(SMALL_GRID, PARAMS.beta).samples

    np.testing.assert_allclose(theta.f_a, theta.f_s[:, :, None] * psi)
    np.testing.assert_array_equal(theta.f_a, theta.f_b)

  def test_must_put_a_single_mode_into_the_upper_slab(self):
    theta = build_initial_data(Scenario(family=SINGLE_MODE, mode_z=2),
                               SMALL_GRID, PARAMS)

    assert not np.any(theta.f_b) and not np.any(theta.f_s)
    assert theta.max_abs() == pytest.approx(1.0, abs=0.1)

  def test_must_jitter_the_center_with_the_seed(self):
    first = build_initial_data(Scenario(jitter=1.0, seed=3), SMALL_GRID,
                               PARAMS)
    again = build_initial_data(Scenario(jitter=1.0, seed=3), SMALL_GRID,
                               PARAMS)
    other = build_initial_data(Scenario(jitter=1.0, seed=4), SMALL_GRID,
                               PARAMS)

    np.testing.assert_array_equal(first.f_s, again.f_s)
    assert np.max(np.abs(first.f_s - other.f_s)) > 1e-6

  def test_must_read_the_first_state_of_an_archive(self):
    theta = project_compatible(
        build_initial_data(Scenario(), SMALL_GRID, PARAMS), PARAMS)
    with tempfile.TemporaryDirectory() as tmp:
      fp = join(tmp, 'theta0.lz4')
      write_trajectory(Trajectory([0.0], [theta]), fp)
      loaded = build_initial_data(Scenario(family=FILE, path=fp),
                                  SMALL_GRID.with_changes(t_end=0.01),
                                  PARAMS)

    np.testing.assert_allclose(loaded.f_a, theta.f_a, atol=1e-12)
    np.testing.assert_allclose(loaded.f_s, theta.f_s, atol=1e-12)

  def test_must_match_the_traces_of_archived_data(self):
    theta = build_initial_data(Scenario(), SMALL_GRID, PARAMS)
    with tempfile.TemporaryDirectory() as tmp:
      fp = join(tmp, 'theta0.lz4')
      write_trajectory(Trajectory([0.0], [theta]), fp)
      loaded = build_initial_data(Scenario(family=FILE, path=fp), SMALL_GRID,
                                  PARAMS)

    assert relative_trace_gap(theta, PARAMS) > 1e-6
    assert relative_trace_gap(loaded, PARAMS) <= 1e-12

  def test_must_throw_configuration_error_when_archive_grid_differs(self):
    theta = build_initial_data(Scenario(), SMALL_GRID, PARAMS)
    with tempfile.TemporaryDirectory() as tmp:
      fp = join(tmp, 'theta0.lz4')
      write_trajectory(Trajectory([0.0], [theta]), fp)
      with pytest.raises(ConfigurationError, match='lives on another grid'):
        build_initial_data(Scenario(family=FILE, path=fp),
                           SMALL_GRID.with_changes(n_h=16), PARAMS)

  def test_must_throw_configuration_error_when_family_is_unknown(self):
    with pytest.raises(ConfigurationError, match='unknown scenario family'):
      Scenario(family='plume')

  def test_must_throw_configuration_error_when_path_is_missing(self):
    with pytest.raises(ConfigurationError, match='needs a path'):
      Scenario(family=FILE)

  def test_must_throw_configuration_error_when_mode_is_zero(self):
    with pytest.raises(ConfigurationError, match='mode_z must be at least 1'):
      Scenario(family=SINGLE_MODE, mode_z=0)
