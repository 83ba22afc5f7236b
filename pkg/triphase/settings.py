"""Process-wide settings read from the environment."""

import os

from triphase.errors import ConfigurationError

THREADS_VARIABLE = 'TRIPHASE_THREADS'


def worker_count() -> int:
  """Gets the maximal number of worker threads.

  The count is read from the environment variable `TRIPHASE_THREADS` and
  defaults to the number of CPUs.

  Raises:
      ConfigurationError: if the variable isn't a positive integer.
  """
  value = os.environ.get(THREADS_VARIABLE)
  if value is None or value.strip() == '':
    return os.cpu_count() or 1
  try:
    count = int(value)
  except ValueError:
    raise ConfigurationError(
        f'{THREADS_VARIABLE} must be a positive integer, but was "{value}"')
  if count <= 0:
    raise ConfigurationError(
        f'{THREADS_VARIABLE} must be a positive integer, but was {count}')
  return count
