"""Unit testing the process-wide settings."""

import os
import unittest
from unittest import mock

import pytest

from triphase.errors import ConfigurationError
from triphase.settings import THREADS_VARIABLE, worker_count


class TestWorkerCount(unittest.TestCase):
  """Testing the thread limit."""

  def test_must_read_the_thread_limit(self):
    with mock.patch.dict(os.environ, {THREADS_VARIABLE: '3'}):
      assert worker_count() == 3

  def test_must_default_to_the_cpu_count(self):
    with mock.patch.dict(os.environ, {THREADS_VARIABLE: ' '}):
      assert worker_count() == (os.cpu_count() or 1)

  def test_must_throw_configuration_error_when_limit_isnt_a_number(self):
    with mock.patch.dict(os.environ, {THREADS_VARIABLE: 'many'}):
      with pytest.raises(ConfigurationError, match='positive integer'):
        worker_count()

  def test_must_throw_configuration_error_when_limit_is_zero(self):
    with mock.patch.dict(os.environ, {THREADS_VARIABLE: '0'}):
      with pytest.raises(ConfigurationError, match='but was 0'):
        worker_count()
