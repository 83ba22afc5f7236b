"""Unit testing the checks on stored trajectories."""

import math
import unittest

import numpy as np
import pytest

from tests.unit.helpers import PARAMS, SMALL_GRID, compatible_field, \
    lifted_field
from triphase.coupling.traces import SERIES
from triphase.diagnostics.checks import dyadic_indices, energy_ledger, \
    holder_probe, initial_continuity, trace_gap, uniqueness_gap, \
    weighted_energy_monotone
from triphase.errors import ConfigurationError, DomainError, StateError
from triphase.io.table import Table
from triphase.scenario import SINGLE_MODE, Scenario, build_initial_data
from triphase.spectral.engine import apply_l_power, spectral_norm, \
    to_spectral
from triphase.state.field import zeros
from triphase.state.params import GridSpec
from triphase.state.trajectory import Trajectory, Variables


def _linear(start, slope, n=9, variables=Variables.LIFTED, derivs=True):
  times = SMALL_GRID.dt * np.arange(n)
  states = [start + slope * float(t) for t in times]
  return Trajectory(times, states, [slope] * n if derivs else None,
                    variables)


def _ledger(energies):
  table = Table(('time', 'weighted_energy'))
  table.extend(enumerate(energies))
  return table


class TestEnergyLedger(unittest.TestCase):
  """Testing the weighted energy equality."""

  def test_must_vanish_for_zero_trajectories(self):
    traj = _linear(zeros(SMALL_GRID), zeros(SMALL_GRID), n=3)
    ledger = energy_ledger(traj, PARAMS)

    assert len(ledger) == 3
    assert ledger.meta['max_defect'] == 0.0
    assert ledger.max('weighted_energy') == 0.0

  def test_must_start_without_dissipation(self):
    traj = Trajectory([0.0], [compatible_field()], None, Variables.PHYSICAL)
    ledger = energy_ledger(traj, PARAMS)

    assert ledger.column('cumulative_dissipation')[0] == 0.0
    assert ledger.column('weighted_energy')[0] > 0
    assert ledger.column('dissipation_rate')[0] > 0

  def test_must_balance_a_decaying_mode_to_rounding(self):
    theta0 = build_initial_data(Scenario(family=SINGLE_MODE), SMALL_GRID,
                                PARAMS)
    xi, k = 2 * np.pi / SMALL_GRID.l_h, np.pi / SMALL_GRID.l_z
    lam = PARAMS.kappa_a * (xi ** 2 + k ** 2)
    times = 1e-5 * np.arange(201)
    states = [theta0 * math.exp(-lam * t) for t in times]
    derivs = [s * -lam for s in states]
    ledger = energy_ledger(Trajectory(times, states, derivs,
                                      Variables.PHYSICAL), PARAMS)
    energy = ledger.column('weighted_energy')

    assert ledger.meta['max_defect'] <= 1e-10
    assert energy[-1] == pytest.approx(energy[0] * math.exp(-2 * lam
                                                            * times[-1]),
                                       rel=1e-12)
    assert ledger.column('dissipation_rate')[0] == pytest.approx(
        2 * lam * energy[0], rel=1e-12)

  def test_must_tell_monotone_energies(self):
    assert weighted_energy_monotone(_ledger([3.0, 2.0, 2.0, 1.0]))
    assert not weighted_energy_monotone(_ledger([3.0, 2.0, 2.5]))
    assert weighted_energy_monotone(_ledger([1.0, 1.0 + 1e-13]), rtol=1e-12)
    assert weighted_energy_monotone(_ledger([1.0]))


class TestInitialContinuity(unittest.TestCase):
  """Testing the distances to the initial data."""

  def test_must_use_dyadic_indices(self):
    assert dyadic_indices(4, 20) == [1, 2, 4, 8]
    assert dyadic_indices(10, 5) == [1, 2, 4]
    assert dyadic_indices(3, 1) == []

  def test_must_fit_the_exponent_of_linear_paths(self):
    theta0 = lifted_field()
    traj = _linear(theta0, lifted_field(seed=1))
    table = initial_continuity(traj, theta0)

    assert len(table) == 4
    assert table.meta['exponent'] == pytest.approx(1.0, rel=1e-9)

  def test_must_give_nan_for_stationary_paths(self):
    theta0 = lifted_field()
    table = initial_continuity(_linear(theta0, zeros(SMALL_GRID)), theta0)

    assert np.isnan(table.meta['exponent'])

  def test_must_throw_configuration_error_when_grids_differ(self):
    other = GridSpec(l_h=8.0, n_h=8, l_z=4.0, n_z=4, dt=1e-3, t_end=0.02)
    with pytest.raises(ConfigurationError, match='different grid'):
      initial_continuity(_linear(lifted_field(), lifted_field()),
                         zeros(other))


class TestTraceGap(unittest.TestCase):
  """Testing the trace compatibility over time."""

  def test_must_vanish_for_series_traces_of_lifted_states(self):
    table = trace_gap(_linear(lifted_field(), lifted_field(seed=1)), PARAMS,
                      method=SERIES)

    assert table.meta['max_gap'] <= 1e-12

  def test_must_be_small_for_compatible_temperatures(self):
    traj = Trajectory([0.0], [compatible_field()], None, Variables.PHYSICAL)

    assert trace_gap(traj, PARAMS).meta['max_gap'] <= 1e-10

  def test_must_throw_domain_error_when_method_is_unknown(self):
    with pytest.raises(DomainError, match='isn\'t supported'):
      trace_gap(_linear(lifted_field(), lifted_field()), PARAMS,
                method='spline')


class TestHolderProbe(unittest.TestCase):
  """Testing the Hölder quotients of LV."""

  def test_must_recover_the_slope_of_linear_paths(self):
    slope = lifted_field(seed=2)
    table = holder_probe(_linear(lifted_field(), slope), PARAMS, 1.0)
    expected = spectral_norm(apply_l_power(to_spectral(slope), 1.0, PARAMS))

    np.testing.assert_allclose(table.column('max_ratio'), expected,
                               rtol=1e-8)
    np.testing.assert_allclose(table.column('separation'),
                               SMALL_GRID.dt * np.array([1, 2, 4]))

  def test_must_throw_domain_error_when_exponent_is_zero(self):
    with pytest.raises(DomainError, match='q must be in'):
      holder_probe(_linear(lifted_field(), lifted_field()), PARAMS, 0.0)

  def test_must_throw_domain_error_when_window_is_empty(self):
    with pytest.raises(DomainError, match='window must satisfy'):
      holder_probe(_linear(lifted_field(), lifted_field()), PARAMS, 0.5,
                   window=(0.004, 0.004))


class TestUniquenessGap(unittest.TestCase):
  """Testing the distance of two runs."""

  def test_must_measure_the_distance(self):
    start, slope = lifted_field(), lifted_field(seed=1)
    first = _linear(start, slope)
    second = _linear(start + slope, slope)

    assert uniqueness_gap(first, first) == 0.0
    assert uniqueness_gap(first, second) == pytest.approx(
        spectral_norm(to_spectral(slope)), rel=1e-10)
    assert uniqueness_gap(first, first, PARAMS) == 0.0

  def test_must_throw_configuration_error_when_time_grids_differ(self):
    first = _linear(lifted_field(), lifted_field(), n=4)
    second = _linear(lifted_field(), lifted_field(), n=5)
    with pytest.raises(ConfigurationError, match='different time grids'):
      uniqueness_gap(first, second)

  def test_must_throw_state_error_when_derivatives_are_missing(self):
    traj = _linear(lifted_field(), lifted_field(), derivs=False)
    with pytest.raises(StateError, match='no stored time derivatives'):
      uniqueness_gap(traj, traj, PARAMS)
