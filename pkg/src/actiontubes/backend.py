"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the pure
NumPy twin takes over. ``ACTIONTUBES_BACKEND=python`` forces the fallback,
``ACTIONTUBES_BACKEND=compiled`` demands the extension (and errors when it
is missing) so benchmarks and tests can pin a backend.
"""

from __future__ import annotations

import os

from . import _kernels_py


def _select():
    choice = os.environ.get("ACTIONTUBES_BACKEND", "").strip().lower()
    if choice == "python":
        return _kernels_py
    try:
        from . import _kernels  # compiled extension, absent without a C toolchain
    except ImportError:
        if choice == "compiled":
            raise ImportError(
                "ACTIONTUBES_BACKEND=compiled but the actiontubes._kernels "
                "extension is not built; run `python setup.py build_ext --inplace` "
                "or reinstall the package"
            )
        return _kernels_py
    if choice not in ("", "compiled"):
        raise ValueError(f"unknown ACTIONTUBES_BACKEND value: {choice!r}")
    return _kernels


kernels = _select()

BACKEND_NAME: str = kernels.NAME
