"""Per-mode smoothing and approximation bounds of the analytic semigroup."""

import math
from typing import Tuple

import numpy as np

from triphase.errors import DomainError
from triphase.spectral.engine import SpectralTri, apply_l_power, \
    apply_semigroup, spectral_norm
from triphase.state.params import PhysParams


def _search_grid(center: float, decades: float = 8.0,
                 points: int = 400001) -> np.ndarray:
  return center * np.logspace(-decades, decades, points)


def _check(q: float, t: float, *, allow_zero_q: bool = True) -> None:
  if not t > 0:
    raise DomainError(f'time must be positive, but was {t}')
  low_ok = q >= 0 if allow_zero_q else q > 0
  if not (low_ok and q <= 1):
    raise DomainError(f'q must be in {"[" if allow_zero_q else "("}0, 1], '
                      f'but was {q}')


def smoothing_supremum(q: float, t: float) -> Tuple[float, float]:
  """Maximizes `lam^q exp(-t lam)` over a logarithmic grid of eigenvalues.

  Args:
      q (float): exponent in [0, 1].
      t (float): positive time.

  Raises:
      DomainError: if q or t is outside of its domain.

  Returns:
      Tuple[float, float]: the grid maximum and the closed form
      `(q/(e t))^q`.
  """
  _check(q, t)
  closed = (q / (math.e * t)) ** q if q > 0 else 1.0
  if q == 0:
    return 1.0, closed
  lam = _search_grid(q / t)
  measured = float(np.max(np.exp(q * np.log(lam) - t * lam)))
  return measured, closed


def approximation_supremum(q: float, t: float) -> float:
  """Maximizes `(1 - exp(-t lam))/(t lam)^q` over a logarithmic grid of
  eigenvalues; the supremum is at most 1 for q in (0, 1]."""
  _check(q, t, allow_zero_q=False)
  x = _search_grid(1.0)
  return float(np.max(-np.expm1(-x) / x ** q))


def smoothing_ratio(c: SpectralTri, q: float, t: float,
                    params: PhysParams) -> float:
  """Gets `||L^q exp(-tL) c|| / ||c||`, which is bounded by
  `(q/(e t))^q`."""
  _check(q, t)
  norm = spectral_norm(c)
  if norm == 0:
    return 0.0
  return spectral_norm(
      apply_l_power(apply_semigroup(c, t, params), q, params)) / norm
