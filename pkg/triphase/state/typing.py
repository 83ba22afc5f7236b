"""Type definitions for state arrays."""

from typing import Sequence, Tuple, Union

import numpy as np

RealArray = np.ndarray
ComplexArray = np.ndarray

Point = Union[Sequence[float], np.ndarray]
Sign = str

Shape = Tuple[int, ...]
