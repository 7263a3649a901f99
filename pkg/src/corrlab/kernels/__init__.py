"""Hot-loop kernels with a compiled core and a pure-numpy fallback.

The compiled extension (``corrlab.kernels._fast``) is used when it imported
successfully; otherwise the numpy fallback takes over with identical
semantics (bit-identical outputs). Set CORRLAB_BACKEND=fallback to force
the pure-Python path, e.g. for benchmarking.
"""

from __future__ import annotations

import os

from corrlab.kernels import fallback

_forced = os.environ.get("CORRLAB_BACKEND", "").lower()
_impl = None
if _forced not in ("fallback", "python", "pure"):
    try:
        from corrlab.kernels import _fast as _impl
    except ImportError:
        _impl = None

if _impl is None:
    _impl = fallback
    BACKEND = "fallback"
else:
    BACKEND = "compiled"

joint_trials = _impl.joint_trials
local_trials = _impl.local_trials
binary_trials = _impl.binary_trials
grid_best = _impl.grid_best


def backend() -> str:
    """Name of the active kernel backend ("compiled" or "fallback")."""
    return BACKEND


def implementations() -> dict[str, object]:
    """All importable kernel modules, keyed by backend name."""
    impls: dict[str, object] = {"fallback": fallback}
    try:
        from corrlab.kernels import _fast

        impls["compiled"] = _fast
    except ImportError:
        pass
    return impls
