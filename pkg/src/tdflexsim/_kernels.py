"""Kernel backend selection.

The compiled ``_core`` extension is used when it imports; otherwise the
pure-Python twin in ``_core_py`` is used. Set ``TDFLEXSIM_PURE_PYTHON=1``
to force the fallback.
"""

import logging
import os

from . import _core_py

logger = logging.getLogger(__name__)

if os.environ.get("TDFLEXSIM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _core_py
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        logger.debug("compiled kernels unavailable, using pure-Python fallback")
        _impl = _core_py
        BACKEND = "python"

icr_count = _impl.icr_count
bruteforce_min_icr = _impl.bruteforce_min_icr
tdflex_fill = _impl.tdflex_fill


def backends():
    """Return ``{name: module}`` for every importable backend."""
    found = {"python": _core_py}
    try:
        from . import _core  # type: ignore[attr-defined]

        found["compiled"] = _core
    except ImportError:
        pass
    return found
