"""Kernel backend selection.

The hot numerical loops in :mod:`eigenpath.kernels` are written once and
compiled with ``numba.njit`` when available.  Setting the environment
variable ``EIGENPATH_NUMBA=0`` (before import) forces the pure-NumPy path:
the same source runs undecorated.  ``EIGENPATH_NUMBA=1`` insists on numba and
raises if it cannot be imported; the default (``auto``) uses numba when
present and falls back silently otherwise.
"""

import os

_flag = os.environ.get("EIGENPATH_NUMBA", "auto").strip().lower()

if _flag in ("0", "false", "off", "numpy"):
    NUMBA_ENABLED = False
elif _flag in ("1", "true", "on", "numba"):
    import numba  # noqa: F401  (raises ImportError if unavailable)

    NUMBA_ENABLED = True
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


if NUMBA_ENABLED:
    from numba import njit
else:

    def njit(*args, **kwargs):
        """Pass-through stand-in for ``numba.njit``."""
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap


def backend_name():
    return "numba" if NUMBA_ENABLED else "numpy"
