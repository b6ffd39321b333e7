"""Simulation kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation
when the extension is missing or ``RANKSTOP_PURE=1`` is set.  Both
backends expose the same functions with identical semantics.
"""

import os

from . import pure

if os.environ.get("RANKSTOP_PURE") == "1":
    _impl = pure
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND
threshold_sim = _impl.threshold_sim
cloud_sim = _impl.cloud_sim

# always available regardless of backend (used by tests and oracles)
final_ranks_of = pure.final_ranks_of
cloud_accept_index = pure.cloud_accept_index
