"""Kernel dispatch.

The compiled extension is used when it imports; otherwise the pure-Python
versions are used. Set ``RFIDSIM_PURE=1`` to force the fallback, or call
:func:`set_backend` at runtime (the benchmark does this).
"""

import os

from . import _pykernels

try:
    from . import _kernels as _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

BACKEND = None
respond = None
split_scan = None


def available_backends():
    return sorted(BACKENDS)


def set_backend(name):
    """Route :func:`respond` and :func:`split_scan` to the named backend."""
    global BACKEND, respond, split_scan
    try:
        impl = BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown or unavailable backend {name!r}; have {available_backends()}"
        ) from None
    BACKEND = name
    respond = impl.respond
    split_scan = impl.split_scan


if os.environ.get("RFIDSIM_PURE") or _ckernels is None:
    set_backend("python")
else:
    set_backend("cython")
