"""Wavelet-based fractal and nonfractal connectivity analysis."""

try:
    from ._fracconn import *  # noqa: F401,F403
    from . import _fracconn as _core
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _fracconn import *  # noqa: F401,F403
    import _fracconn as _core

__doc__ = _core.__doc__
__all__ = [name for name in dir(_core) if not name.startswith("_")]
