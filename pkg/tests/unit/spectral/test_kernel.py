"""Unit testing the real-space heat kernels."""

import unittest

import numpy as np
import pytest

from tests.unit.helpers import PARAMS
from triphase.errors import DomainError
from triphase.spectral.engine import apply_semigroup, from_spectral, \
    to_spectral
from triphase.spectral.kernel import eval_kernel_halfspace, \
    eval_kernel_surface, propagate_halfspace, propagate_surface
from triphase.state.field import TriField
from triphase.state.params import GridSpec

_GRID = GridSpec(l_h=16.0, n_h=32, l_z=8.0, n_z=63, dt=0.5, t_end=0.5)


def _bump():
  x1, x2, z = _GRID.mesh()
  return np.exp(-(x1 ** 2 + x2 ** 2) / 2 - (z - 3.0) ** 2 / (2 * 0.25))


class TestKernels(unittest.TestCase):
  """Testing the image kernel and the surface kernel."""

  def test_must_vanish_on_the_interface(self):
    value = eval_kernel_halfspace([0.3, -0.2, 0.0], [0.0, 0.0, 1.0], 0.5, 1.0,
                                  '+')

    assert value == pytest.approx(0.0, abs=1e-15)

  def test_must_be_symmetric(self):
    x, y = np.array([0.1, 0.2, -0.5]), np.array([-0.3, 0.4, -1.5])

    assert eval_kernel_halfspace(x, y, 0.2, 2.0, '-') == \
        pytest.approx(eval_kernel_halfspace(y, x, 0.2, 2.0, '-'))

  def test_must_throw_domain_error_when_point_is_in_other_half_space(self):
    with pytest.raises(DomainError, match='must lie in the half space'):
      eval_kernel_halfspace([0, 0, -1.0], [0, 0, 1.0], 0.5, 1.0, '+')

  def test_must_throw_domain_error_when_time_is_not_positive(self):
    with pytest.raises(DomainError, match='time must be positive'):
      eval_kernel_surface([0.0, 0.0], 0.0, PARAMS)

  def test_must_integrate_surface_kernel_to_one(self):
    x = np.linspace(-10, 10, 401)
    x1, x2 = np.meshgrid(x, x, indexing='ij')
    values = eval_kernel_surface(np.stack([x1, x2], axis=-1), 0.5, PARAMS)

    assert np.sum(values) * (x[1] - x[0]) ** 2 == pytest.approx(1.0,
                                                                 rel=1e-6)

  def test_must_agree_with_spectral_semigroup_in_the_bulk(self):
    f = _bump()
    field = TriField(f, np.zeros(_GRID.bulk_shape),
                     np.zeros(_GRID.surface_shape), _GRID)
    spectral = from_spectral(apply_semigroup(to_spectral(field), 0.5,
                                             PARAMS)).f_a
    kernel = propagate_halfspace(f, _GRID, 0.5, PARAMS.kappa_a)

    assert np.max(np.abs(kernel - spectral)) <= 1e-3 * np.max(spectral)

  def test_must_agree_with_spectral_semigroup_on_the_surface(self):
    x1, x2 = _GRID.x[:, None], _GRID.x[None, :]
    f_s = np.exp(-(x1 ** 2 + x2 ** 2) / 2)
    field = TriField(np.zeros(_GRID.bulk_shape), np.zeros(_GRID.bulk_shape),
                     f_s, _GRID)
    spectral = from_spectral(apply_semigroup(to_spectral(field), 0.5,
                                             PARAMS)).f_s
    kernel = propagate_surface(f_s, _GRID, 0.5, PARAMS)

    assert np.max(np.abs(kernel - spectral)) <= 1e-6 * np.max(spectral)
