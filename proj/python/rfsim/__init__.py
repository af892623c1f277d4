"""Python interface to the rfsim C++ core.

The compiled extension sits inside the package when installed via pip and on
PYTHONPATH next to it when running against a plain CMake build tree.
"""

try:
    from ._rfsim import *  # noqa: F401,F403
    from ._rfsim import __doc__ as _core_doc
except ImportError:
    from _rfsim import *  # noqa: F401,F403
    from _rfsim import __doc__ as _core_doc

__doc__ = _core_doc
