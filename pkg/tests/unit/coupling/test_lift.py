"""Unit testing the lift to u-variables and the lifted representation."""

import math
import unittest

import numpy as np
import pytest
from scipy.integrate import quad

from tests.unit.helpers import PARAMS, SMALL_GRID, compatible_field, \
    lifted_field, random_field
from triphase.coupling.lift import LiftedSpectrum, lift_to_u, \
    lower_to_theta, profile, profile_coefficients, project_compatible, \
    relative_trace_gap, trace_gaps, weighted_surface_norm
from triphase.coupling.traces import trace_plus
from triphase.errors import DataError, DomainError
from triphase.spectral.engine import to_spectral
from triphase.state.field import TriField, h_norm
from triphase.state.params import GridSpec, PhysParams

_FINE = GridSpec(l_h=8.0, n_h=8, l_z=8.0, n_z=63, dt=1e-3, t_end=0.01)


class TestProfile(unittest.TestCase):
  """Testing the lift profile."""

  def test_must_match_quadrature_of_sine_coefficients(self):
    grid, beta = SMALL_GRID, 1.5
    coeffs = profile_coefficients(grid, beta)
    for n, k in enumerate(grid.k[:4]):
      value, _ = quad(lambda z: math.exp(-beta * z) * math.sin(k * z), 0,
                      grid.l_z)

      assert coeffs[n] == pytest.approx(2 / grid.l_z * value, rel=1e-10)

  def test_must_account_for_the_norm(self):
    prof = profile(_FINE, 1.0)

    assert prof.norm_sq == pytest.approx((1 - math.exp(-16)) / 2)
    assert prof.tail > 0
    assert prof.tail < profile(SMALL_GRID.with_changes(l_z=8.0), 1.0).tail
    assert prof.far_value == pytest.approx(math.exp(-8))

  def test_must_extrapolate_profile_to_one(self):
    assert profile(_FINE, 1.0).extrapolated == pytest.approx(1.0, rel=1e-3)

  def test_must_throw_domain_error_when_beta_is_not_positive(self):
    with pytest.raises(DomainError, match='beta must be positive'):
      profile(SMALL_GRID, 0.0)


class TestLift(unittest.TestCase):
  """Testing the lift and its inverse."""

  def test_must_build_compatible_data(self):
    theta = compatible_field()

    assert relative_trace_gap(theta, PARAMS) < 1e-12

  def test_must_zero_the_extrapolated_traces(self):
    u = lift_to_u(compatible_field(), PARAMS)

    np.testing.assert_allclose(trace_plus(u.f_a, u.grid), 0.0, atol=1e-12)

  def test_must_invert_the_lift(self):
    theta = compatible_field()
    back = lower_to_theta(lift_to_u(theta, PARAMS), PARAMS)

    np.testing.assert_allclose(back.f_a, theta.f_a, atol=1e-14)
    np.testing.assert_allclose(back.f_b, theta.f_b, atol=1e-14)

  def test_must_throw_data_error_when_traces_are_incompatible(self):
    with pytest.raises(DataError, match='bulk traces differ') as info:
      lift_to_u(random_field(), PARAMS)

    assert info.value.gap > 1e-2

  def test_must_skip_the_check_with_infinite_tolerance(self):
    u = lift_to_u(random_field(), PARAMS, trace_tol=math.inf)

    assert u.grid == SMALL_GRID

  def test_must_project_onto_compatible_data(self):
    theta = project_compatible(random_field(seed=3), PARAMS)
    gap_a, gap_b = trace_gaps(theta, PARAMS)

    np.testing.assert_allclose(gap_a, 0.0, atol=1e-10)
    np.testing.assert_allclose(gap_b, 0.0, atol=1e-10)


class TestWeightedSurfaceNorm(unittest.TestCase):
  """Testing the norm of a surface field extended along the profile."""

  def test_must_match_the_closed_form(self):
    grid = SMALL_GRID.with_changes(l_z=8.0)
    f_s = random_field().f_s
    size = grid.h * math.sqrt(float(np.sum(f_s ** 2)))
    for beta in (0.5, 1.0, 2.0, 4.0):
      params = PhysParams(beta=beta)
      closed = math.sqrt(-math.expm1(-2 * beta * 8.0) / (2 * beta))
      for sign in ('+', '-'):
        measured = weighted_surface_norm(f_s, params, sign, grid) / size

        assert measured == pytest.approx(closed, rel=1e-8)

  def test_must_throw_domain_error_when_sign_is_unknown(self):
    with pytest.raises(DomainError, match='sign must be'):
      weighted_surface_norm(random_field().f_s, PARAMS, 'up', SMALL_GRID)


class TestLiftedSpectrum(unittest.TestCase):
  """Testing the closed-form representation of temperatures."""

  def test_must_reproduce_the_samples(self):
    theta = compatible_field()
    back = LiftedSpectrum.expand(theta, PARAMS).to_field()

    np.testing.assert_allclose(back.f_a, theta.f_a, atol=1e-12)
    np.testing.assert_allclose(back.f_s, theta.f_s, atol=1e-12)

  def test_must_lower_u_variables_like_the_lift(self):
    v = lifted_field()
    lowered = LiftedSpectrum.from_lifted(to_spectral(v), PARAMS.beta)

    np.testing.assert_allclose(lowered.to_field().f_a,
                               lower_to_theta(v, PARAMS).f_a, atol=1e-12)

  def test_must_match_parseval_without_surface_field(self):
    f = random_field()
    theta = TriField(f.f_a, f.f_b, np.zeros(SMALL_GRID.surface_shape),
                     SMALL_GRID)

    assert LiftedSpectrum.expand(theta, PARAMS).energy(PARAMS.alpha_s) == \
        pytest.approx(h_norm(theta) ** 2, rel=1e-10)

  def test_must_integrate_the_profile_exactly(self):
    grid = SMALL_GRID
    ones = np.ones(grid.surface_shape)
    psi = profile(grid, PARAMS.beta)
    theta = TriField(ones[:, :, None] * psi.samples, ones[:, :, None]
                     * psi.samples, ones, grid)
    sp = LiftedSpectrum.expand(theta, PARAMS)
    area = grid.l_h ** 2

    assert sp.l2_inners(sp)[0] == pytest.approx(area * psi.norm_sq)
    assert sp.dirichlet_inners(sp)[0] == \
        pytest.approx(area * PARAMS.beta ** 2 * psi.norm_sq)
    np.testing.assert_allclose(sp.normal_derivs()[0][0, 0], -PARAMS.beta)
    np.testing.assert_allclose(sp.normal_derivs()[1][0, 0], PARAMS.beta)

  def test_must_throw_domain_error_when_trace_policy_is_unknown(self):
    with pytest.raises(DomainError, match='trace policy "exact"'):
      LiftedSpectrum.expand(compatible_field(), PARAMS, traces='exact')
