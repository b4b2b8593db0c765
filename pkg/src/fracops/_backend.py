"""Backend selection: compiled extension if available, numpy fallback
otherwise.  Set FRACOPS_PURE_PYTHON=1 to force the fallback."""

from __future__ import annotations

import os

if os.environ.get("FRACOPS_PURE_PYTHON", "").strip() in ("1", "true", "yes"):
    from fracops import _core_py as core
else:
    try:
        from fracops import _core as core  # type: ignore[attr-defined]
    except ImportError:
        from fracops import _core_py as core

BACKEND = core.BACKEND
