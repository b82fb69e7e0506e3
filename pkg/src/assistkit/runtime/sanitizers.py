"""Backend selection for the sanitizer kernels.

The compiled extension is used when importable; otherwise the pure-Python
kernels take over. ASSISTKIT_SANITIZER_BACKEND=py|cy forces a choice (cy
raises if the extension is missing). Both backends implement identical
semantics; the test suite cross-checks them against a character-by-character
oracle.
"""

from __future__ import annotations

import os

from . import _sanitize_py

_forced = os.environ.get("ASSISTKIT_SANITIZER_BACKEND", "").strip().lower()

_impl = None
if _forced in ("", "cy"):
    try:
        from . import _sanitize_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        if _forced == "cy":
            raise ImportError(
                "ASSISTKIT_SANITIZER_BACKEND=cy but the compiled extension "
                "assistkit.runtime._sanitize_cy is not built"
            )
        _impl = None
elif _forced != "py":
    raise ValueError(
        f"ASSISTKIT_SANITIZER_BACKEND must be 'py' or 'cy', got {_forced!r}"
    )

if _impl is None:
    _impl = _sanitize_py
    BACKEND = "py"
else:
    BACKEND = "cy"

sanitize_string = _impl.sanitize_string
sanitize_numeric = _impl.sanitize_numeric
