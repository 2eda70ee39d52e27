"""Channel-synthesis kernel backend selection.

The compiled Cython extension is used when available; the pure-numpy
implementation is the fallback.  ``BEAMLINK_BACKEND`` forces a choice:

* ``auto`` (default): compiled extension if importable, else numpy.
* ``cython``: compiled extension, raise if missing.
* ``python``: numpy implementation.

Both backends are deterministic run-to-run; they are not guaranteed to be
bit-identical to each other (floating-point accumulation order differs).
"""

from __future__ import annotations

import os

from ..errors import ConfigurationError

_requested = os.environ.get("BEAMLINK_BACKEND", "auto").strip().lower()
if _requested not in {"auto", "cython", "python"}:
    raise ConfigurationError(
        f"BEAMLINK_BACKEND must be one of auto|cython|python, got {_requested!r}")

if _requested == "python":
    from . import _numpy_backend as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "cython":
            raise ConfigurationError(
                "BEAMLINK_BACKEND=cython but the compiled extension is not "
                "available; reinstall the package with a C compiler") from None
        from . import _numpy_backend as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.NAME
beam_channel_tensor = _impl.beam_channel_tensor
omni_channel_batch = _impl.omni_channel_batch

__all__ = ["BACKEND", "beam_channel_tensor", "omni_channel_batch"]
