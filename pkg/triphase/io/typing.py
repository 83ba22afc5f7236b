"""Type definitions of the result files."""

from os import PathLike
from typing import Union

FilePath = Union[str, PathLike]

# a table cell, float valued except for label columns
Cell = Union[float, str]
