"""Assembly of the right side `F(v) = (F1, F2, F3)` of the lifted system

    dv/dt + L v = F(v).

F1 and F2 are the surface forcing spread along the lift profile,

    F1 = (-dv_S/dt - kappa_A |xi|^2 v_S + beta^2 kappa_A v_S) psi,

and F3 couples the normal fluxes of the bulk fields back into the surface
equation. F1 and F2 need the time derivative of v_S, which is always the
stored derivative from the evolution law and never a difference quotient.
"""

from enum import Enum
from typing import Optional, Tuple

import numpy as np

from triphase.coupling.lift import profile
from triphase.errors import StateError
from triphase.spectral.engine import SpectralTri, from_spectral, to_spectral
from triphase.state.field import TriField
from triphase.state.params import GridSpec, PhysParams
from triphase.state.typing import ComplexArray


class CouplingScheme(Enum):
  """Discretization of the surface flux term F3.

  LITERAL evaluates `(kappa_A d3 v_A - kappa_B d3 v_B - beta (kappa_A +
  kappa_B) v_S) / alpha_S` with sine-series fluxes. CONSERVATIVE tests the
  surface equation against the lifted profile triple, which adds terms that
  vanish as n_z and l_z grow and makes the discrete weighted energy balance
  exact.
  """
  LITERAL = 1
  CONSERVATIVE = 2


def forcing_arrays(c_a: ComplexArray, c_b: ComplexArray, c_s: ComplexArray,
                   d_s: ComplexArray, grid: GridSpec, params: PhysParams,
                   scheme: CouplingScheme) \
        -> Tuple[ComplexArray, ComplexArray, ComplexArray]:
  """Computes the coefficients of F from the coefficients of v.

  All arrays may carry leading axes, e.g. time, in front of the mode axes.

  Args:
      c_a (ComplexArray): coefficients of v_A, shape (..., n_h, n_h, n_z).
      c_b (ComplexArray): coefficients of v_B.
      c_s (ComplexArray): coefficients of v_S, shape (..., n_h, n_h).
      d_s (ComplexArray): coefficients of the stored dv_S/dt.
      grid (GridSpec): the grid of the coefficients.
      params (PhysParams): the coefficients of the system.
      scheme (CouplingScheme): discretization of F3.

  Returns:
      Tuple[ComplexArray, ComplexArray, ComplexArray]: coefficients of F1, F2
      and F3.
  """
  prof = profile(grid, params.beta)
  mu = grid.mu
  k_a, k_b = params.kappa_a, params.kappa_b
  b2 = params.beta ** 2
  g_a = -d_s - k_a * mu * c_s + b2 * k_a * c_s
  g_b = -d_s - k_b * mu * c_s + b2 * k_b * c_s
  f_a = g_a[..., None] * prof.coeffs
  f_b = g_b[..., None] * prof.coeffs
  if scheme == CouplingScheme.LITERAL:
    f_s = (k_a * (c_a @ grid.k) + k_b * (c_b @ grid.k)
           - params.beta * (k_a + k_b) * c_s) / params.alpha_s
  else:
    tail = prof.tail
    mass = params.alpha_s + 2 * tail
    f_s = (k_a * (c_a @ prof.flux_weights) + k_b * (c_b @ prof.flux_weights)
           - b2 * (k_a + k_b) * (2 * prof.norm_sq - tail) * c_s
           - (k_a + k_b) * tail * mu * c_s
           + 2 * tail * params.kappa_s_tilde * mu * c_s) / mass
  return f_a, f_b, f_s


def assemble_spectral(v: SpectralTri, dv_s: ComplexArray, params: PhysParams,
                      scheme: CouplingScheme = CouplingScheme.LITERAL) \
        -> SpectralTri:
  """Assembles F from coefficients; `dv_s` are the coefficients of the
  stored surface derivative."""
  f_a, f_b, f_s = forcing_arrays(v.c_a, v.c_b, v.c_s, np.asarray(dv_s),
                                 v.grid, params, scheme)
  return SpectralTri(f_a, f_b, f_s, v.grid, v.weight_s)


def assemble_f(v: TriField, dv_dt: Optional[TriField], params: PhysParams,
               scheme: CouplingScheme = CouplingScheme.LITERAL) -> TriField:
  """Assembles F for one sample of a lifted trajectory.

  Args:
      v (TriField): the u-variables at one time.
      dv_dt (TriField): their stored time derivative.
      params (PhysParams): the coefficients of the system.
      scheme (CouplingScheme, optional): discretization of F3. Defaults to
      LITERAL.

  Raises:
      StateError: if the stored derivative is missing.

  Returns:
      TriField: the samples of F1, F2 and F3.
  """
  if dv_dt is None:
    raise StateError('F needs the stored time derivative of v_S')
  c = to_spectral(v)
  d_s = to_spectral(dv_dt).c_s
  return from_spectral(assemble_spectral(c, d_s, params, scheme))
