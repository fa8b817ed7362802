"""Hot numeric kernels with a compiled core and a pure-numpy fallback.

The compiled backend is used when the Cython extension was built; otherwise
the numpy fallback takes over transparently. Set ``MADLAB_BACKEND=python`` or
``MADLAB_BACKEND=compiled`` to force a backend (forcing ``compiled`` raises if
the extension is missing). Both backends are bit-identical by construction;
``tests/test_backends.py`` asserts it.
"""

import os

from . import _pykernels

_requested = os.environ.get("MADLAB_BACKEND", "").strip().lower()

if _requested == "python":
    _impl = _pykernels
elif _requested == "compiled":
    from . import _cykernels as _impl
elif _requested == "":
    try:
        from . import _cykernels as _impl
    except ImportError:
        _impl = _pykernels
else:
    raise ImportError(
        f"MADLAB_BACKEND={_requested!r} not recognized; use 'compiled' or 'python'"
    )

BACKEND = _impl.BACKEND
argmax_counts = _impl.argmax_counts
shifted_argmax_counts = _impl.shifted_argmax_counts
pair_accumulate = _impl.pair_accumulate

__all__ = [
    "BACKEND",
    "argmax_counts",
    "shifted_argmax_counts",
    "pair_accumulate",
]
