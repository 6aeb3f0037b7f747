"""Weighted shifts on graded sequence spaces.

Splitting certificates, shadowing bounds, expansivity verdicts, and conjugacy
maps.  Every structured argument and result is a JSON-shaped dict using the
same schemas as the command-line tool's config and report files (see
docs/formats.md in the source tree).
"""

try:
    # Installed layout: the extension lives inside the package directory.
    from . import _core as _impl
    from ._core import *  # noqa: F401,F403
except ImportError:
    # Build-tree layout: the extension sits on PYTHONPATH next to the package.
    import _core as _impl
    from _core import *  # noqa: F401,F403

__version__ = _impl.__version__
__all__ = [name for name in dir(_impl) if not name.startswith("_")]
