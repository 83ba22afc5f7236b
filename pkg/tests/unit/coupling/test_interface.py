"""Unit testing the assembly of the coupling forcing."""

import unittest

import numpy as np
import pytest

from tests.unit.helpers import PARAMS, SMALL_GRID, lifted_field
from triphase.coupling.interface import CouplingScheme, assemble_f, \
    assemble_spectral, forcing_arrays
from triphase.coupling.lift import profile
from triphase.errors import StateError
from triphase.spectral.engine import to_spectral, zeros_spectral
from triphase.state.field import TriField
from triphase.state.params import GridSpec


def _sine_only(grid=SMALL_GRID):
  f_a = np.ones(grid.bulk_shape) * np.sin(np.pi * grid.z / grid.l_z)
  return TriField(f_a, np.zeros(grid.bulk_shape),
                  np.zeros(grid.surface_shape), grid)


class TestForcing(unittest.TestCase):
  """Testing F1, F2 and F3."""

  def test_must_vanish_for_zero_state(self):
    c = zeros_spectral(SMALL_GRID)
    for scheme in CouplingScheme:
      f = assemble_spectral(c, np.zeros(SMALL_GRID.surface_shape), PARAMS,
                            scheme)

      assert not np.any(f.c_a) and not np.any(f.c_b) and not np.any(f.c_s)

  def test_must_couple_bulk_flux_into_surface_literally(self):
    c = to_spectral(_sine_only())
    zero = np.zeros(SMALL_GRID.surface_shape)
    f_a, f_b, f_s = forcing_arrays(c.c_a, c.c_b, c.c_s, zero, SMALL_GRID,
                                   PARAMS, CouplingScheme.LITERAL)
    expected = PARAMS.kappa_a * np.pi / SMALL_GRID.l_z / PARAMS.alpha_s

    assert f_s[0, 0] == pytest.approx(expected, rel=1e-12)
    np.testing.assert_allclose(f_a, 0.0, atol=1e-14)
    np.testing.assert_allclose(f_b, 0.0, atol=1e-14)

  def test_must_spread_surface_forcing_along_the_profile(self):
    c = zeros_spectral(SMALL_GRID)
    c_s = np.zeros(SMALL_GRID.surface_shape, dtype=complex)
    c_s[0, 0] = 1.0
    d_s = np.zeros_like(c_s)
    d_s[0, 0] = 0.5
    f_a, f_b, _ = forcing_arrays(c.c_a, c.c_b, c_s, d_s, SMALL_GRID, PARAMS,
                                 CouplingScheme.LITERAL)
    coeffs = profile(SMALL_GRID, PARAMS.beta).coeffs
    b2 = PARAMS.beta ** 2

    np.testing.assert_allclose(f_a[0, 0], (b2 * PARAMS.kappa_a - 0.5) * coeffs)
    np.testing.assert_allclose(f_b[0, 0], (b2 * PARAMS.kappa_b - 0.5) * coeffs)
    np.testing.assert_allclose(f_a[1:], 0.0)

  def test_must_broadcast_over_a_time_axis(self):
    c0, c1 = to_spectral(lifted_field(seed=1)), to_spectral(lifted_field(seed=2))
    stacked = forcing_arrays(np.stack([c0.c_a, c1.c_a]),
                             np.stack([c0.c_b, c1.c_b]),
                             np.stack([c0.c_s, c1.c_s]),
                             np.stack([c1.c_s, c0.c_s]), SMALL_GRID, PARAMS,
                             CouplingScheme.CONSERVATIVE)
    single = forcing_arrays(c1.c_a, c1.c_b, c1.c_s, c0.c_s, SMALL_GRID,
                            PARAMS, CouplingScheme.CONSERVATIVE)
    for arr, ref in zip(stacked, single):
      np.testing.assert_allclose(arr[1], ref)

  def test_must_agree_between_schemes_on_deep_slabs(self):
    grid = GridSpec(l_h=8.0, n_h=8, l_z=8.0, n_z=63, dt=1e-3, t_end=0.01)
    c = to_spectral(_sine_only(grid))
    zero = np.zeros(grid.surface_shape)
    literal = forcing_arrays(c.c_a, c.c_b, c.c_s, zero, grid, PARAMS,
                             CouplingScheme.LITERAL)[2][0, 0]
    conservative = forcing_arrays(c.c_a, c.c_b, c.c_s, zero, grid, PARAMS,
                                  CouplingScheme.CONSERVATIVE)[2][0, 0]

    assert conservative == pytest.approx(literal, rel=1e-2)

  def test_must_throw_state_error_when_derivative_is_missing(self):
    with pytest.raises(StateError, match='stored time derivative'):
      assemble_f(lifted_field(), None, PARAMS)

  def test_must_assemble_samples(self):
    v = lifted_field()
    f = assemble_f(v, v * 0.0, PARAMS)

    assert f.grid == SMALL_GRID
    assert np.all(np.isfinite(f.f_a))
