"""McEliece over generalized concatenated codes: construction, attacks and work factors."""

from .errors import GcmError

__version__ = "0.1.0"
__all__ = ["GcmError", "__version__"]
