"""Backend selection for the trajectory stepper.

Prefers the compiled extension when it imported cleanly; falls back to the
pure-Python twin otherwise. Set CUSKETCH_BACKEND=python (or =compiled) to
force a choice; forcing "compiled" without the extension is an error.
"""

from __future__ import annotations

import os

from . import _reference

_forced = os.environ.get("CUSKETCH_BACKEND", "").strip().lower()

try:
    from . import _speedups  # type: ignore[attr-defined]
except ImportError:
    _speedups = None

if _forced == "python":
    BACKEND = "python"
elif _forced == "compiled":
    if _speedups is None:
        raise ImportError(
            "CUSKETCH_BACKEND=compiled but the cusketch._speedups extension "
            "is not built"
        )
    BACKEND = "compiled"
elif _forced:
    raise ValueError(f"unknown CUSKETCH_BACKEND value: {_forced!r}")
else:
    BACKEND = "compiled" if _speedups is not None else "python"

run_steps = _speedups.run_steps if BACKEND == "compiled" else _reference.run_steps

VARIANT_CU = _reference.VARIANT_CU
VARIANT_LB = _reference.VARIANT_LB
VARIANT_UB = _reference.VARIANT_UB
