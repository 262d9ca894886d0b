"""Kernel selection: compiled extension when available, pure Python otherwise.

Set BFRANK_PURE_PYTHON=1 to force the fallback (used by the benchmark and
by tests that exercise both paths).
"""

import os

if os.environ.get("BFRANK_PURE_PYTHON") == "1":
    from . import _core_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _core_py as _impl
        BACKEND = "python"

compatible_ys = _impl.compatible_ys
refined_pair_labels = _impl.refined_pair_labels
pair_fingerprint = _impl.pair_fingerprint
extends_to_automorphism = _impl.extends_to_automorphism
map_isomorphic = _impl.map_isomorphic
