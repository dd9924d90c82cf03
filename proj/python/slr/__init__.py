"""Sign gesture recognition pipeline.

Skeleton normalization, a from-scratch LSTM classifier, a leave-one-signer-out
evaluation harness and a synthetic gesture generator, backed by the C++ core.
"""

from ._core import *  # noqa: F401,F403
from . import _core

__all__ = [name for name in dir(_core) if not name.startswith("_")]
__version__ = "0.1.0"
