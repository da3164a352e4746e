"""
sacoder - semantic arithmetic coding over synonymous sets
"""

try:
    from importlib.metadata import version as _metadata_version

    __version__ = _metadata_version("sacoder")
except Exception:
    __version__ = "0.0.0+unknown"

__license__ = "MIT"

from sacoder.cli import cli
from sacoder.errors import SacError

__all__ = ["cli", "SacError", "__version__"]
