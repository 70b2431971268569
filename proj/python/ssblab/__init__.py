"""Exact numerics for symmetry breaking, ODLRO and condensate interference."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ContractError,
    Error,
    NoCondensateError,
    ShapeError,
    SizingError,
    ValidationError,
)

__version__ = "0.1.0"
