"""Exceptions raised by the triphase simulator and its verification harness."""

from typing import Optional


class TriphaseError(Exception):
  """Base class of all errors raised by this package."""


class ConfigurationError(TriphaseError, ValueError):
  """The grids, time steps or configuration entries are inconsistent."""

  def __init__(self, message: str, *, line: Optional[int] = None) -> None:
    """Creates a new configuration error.

    Args:
        message (str): description of the problem.
        line (int, optional): line number in the configuration file, which
        caused the error, or None, if the error isn't tied to a file. Defaults
        to None.
    """
    if line is not None:
      message = f'line {line}: {message}'
    super().__init__(message)
    self.line = line


class DomainError(TriphaseError, ValueError):
  """An argument lies outside of its mathematical domain."""


class DataError(TriphaseError, ValueError):
  """The given fields violate a compatibility constraint."""

  def __init__(self, message: str, *, gap: float = float('nan')) -> None:
    super().__init__(message)
    self.gap = gap


class StateError(TriphaseError, RuntimeError):
  """A trajectory lacks data that the operation requires."""


class NonConvergenceError(TriphaseError, RuntimeError):
  """The Picard iteration failed to contract."""

  def __init__(self, message: str, *, report=None,
               window: Optional[int] = None) -> None:
    """Creates a new non-convergence error.

    Args:
        message (str): description of the failure.
        report (SolverReport, optional): the diagnostics collected until the
        failure. Defaults to None.
        window (int, optional): index of the time window that failed. Defaults
        to None.
    """
    if window is not None:
      message = f'window {window}: {message}'
    super().__init__(message)
    self.report = report
    self.window = window
